#ifndef CRN_THETA_HPP
#define CRN_THETA_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crn/common.hpp"
#include "crn/expr.hpp"

namespace crn {

/// A finite-domain table was probed past its last entry.
class ThetaDomainError : public Error {
 public:
  using Error::Error;
};

/* Per-species rate factor theta on the nonnegative integers, with a step
 * size alpha. Contract: theta(z) = 0 for z < alpha and theta(z) > 0 for
 * z >= alpha. The zero half is enforced at construction (and evaluation
 * clamps z < alpha to exactly 0); positivity above alpha is probed by
 * validate_assumption(), since it cannot be decided for arbitrary
 * expressions.
 *
 * Negative arguments evaluate to 0, which keeps intensities total and
 * vanishing at the boundary of the state space.
 */
class ThetaFunction {
 public:
  enum class Kind { FallingFactorial, Expression, Table, Factored };

  /// theta(z) = z (z-1) ... (z-alpha+1); with alpha = 1 this is theta(z) = z,
  /// the stochastic mass-action factor.
  static ThetaFunction falling_factorial(std::int64_t alpha);
  static ThetaFunction from_expression(std::int64_t alpha, const std::string& text);
  /// values[z] for z = 0 .. values.size()-1; probing past the end throws
  /// ThetaDomainError. `source` names where the table came from.
  static ThetaFunction from_table(std::int64_t alpha, std::vector<double> values,
                                  std::string source = {});
  /// Arbitrary callable backend (used for factored species factors).
  static ThetaFunction from_callable(std::int64_t alpha, std::function<double(std::int64_t)> fn,
                                     std::string description);

  std::int64_t alpha() const;
  Kind kind() const;
  double operator()(std::int64_t z) const;

  bool finite_domain() const;
  /// One past the last tabulated z (only for Kind::Table).
  std::int64_t domain_end() const;

  const std::string& expression_text() const;  // empty unless Expression/Factored
  const std::vector<double>& table() const;
  const std::string& description() const;

  /// Metadata for factored thetas (set by theta_from_factorization).
  std::int64_t factor_step() const;
  double factor_constant() const;

  bool same_definition(const ThetaFunction& other) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
  ThetaFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend ThetaFunction with_factor_metadata(ThetaFunction, std::string, std::int64_t, double);
};

/// Internal: attach (raw expression, step, C) metadata to a factored theta so
/// network files can be round-tripped.
ThetaFunction with_factor_metadata(ThetaFunction t, std::string raw_expr, std::int64_t step,
                                   double c);

}  // namespace crn

#endif
