#ifndef CRN_PHI_HPP
#define CRN_PHI_HPP

#include <cstdint>
#include <memory>

#include "crn/theta.hpp"

namespace crn {

/* Step-1 factor of a theta over its step: a function phi with
 *
 *   theta(z) = phi(z) phi(z-1) ... phi(z-step+1)   for z >= step.
 *
 * Built by the recursion phi(z) = theta(z) / (phi(z-1) ... phi(z-step+1))
 * from the base values phi(0) = 0 and phi(1 .. step-1) = 1 — except that
 * phi(1) may carry a free positive constant C when the factorization is not
 * pinned by a network (see factor_theta_over_step).
 *
 * Values are memoized in evaluation order; reads are safe from concurrent
 * threads and never observe a partially computed prefix.
 */
class PhiFunction {
 public:
  double operator()(std::int64_t z) const;
  /// Precompute values for 0..z_max.
  void materialize(std::int64_t z_max) const;

  std::int64_t step() const;
  double free_constant() const;
  const ThetaFunction& theta() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  explicit PhiFunction(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  friend PhiFunction build_phi(const ThetaFunction&);
  friend PhiFunction factor_theta_over_step(const ThetaFunction&, std::int64_t, double);
};

/// Factor of theta over its own step alpha (free constant fixed at 1).
/// With alpha = 1 this is theta itself. Division by zero cannot occur when
/// theta honors its positivity contract; it is still checked and reported.
PhiFunction build_phi(const ThetaFunction& theta);

/// Factor theta over an explicit step m >= 2 with phi(1) = C > 0, for thetas
/// whose own step need not match m. Signals NumericalError if any computed
/// phi value is <= 0 or non-finite.
PhiFunction factor_theta_over_step(const ThetaFunction& theta, std::int64_t m, double c);

/// Wrap a factor as a step-1 species rate factor (alpha = 1), carrying enough
/// metadata to serialize the generating theta and constant.
ThetaFunction theta_from_factorization(const PhiFunction& phi);

}  // namespace crn

#endif
