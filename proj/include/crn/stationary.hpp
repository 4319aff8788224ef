#ifndef CRN_STATIONARY_HPP
#define CRN_STATIONARY_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "crn/kinetics.hpp"
#include "crn/state_class.hpp"

namespace crn {

/* Product-form invariant measure
 *
 *   pi(x) = prod_i c_i^{x_i} / prod_{j=0}^{floor(x_i/alpha_i)-1} theta_i(x_i - j alpha_i)
 *
 * where c is a complex-balanced equilibrium of the associated deterministic
 * mass-action system. With every alpha_i = 1 and theta_i(z) = z this is the
 * product-Poisson measure.
 *
 * Everything is evaluated in log space: c^x and the theta products overflow
 * doubles for counts in the hundreds. Per-species log-denominator prefix
 * sums are cached (long double accumulation) and safe to read concurrently.
 */
class ProductFormMeasure {
 public:
  ProductFormMeasure(std::vector<double> c, std::vector<ThetaFunction> thetas);
  static ProductFormMeasure for_model(const KineticModel& model, std::vector<double> c);

  int dims() const { return static_cast<int>(log_c_.size()); }
  const std::vector<double>& c() const { return c_; }
  const ThetaFunction& theta(int i) const { return thetas_.at(static_cast<size_t>(i)); }

  /// log of the unnormalized pi; throws SupportError off the support.
  double log_pi(std::span<const std::int64_t> x) const;
  /// As above but nullopt off the support.
  std::optional<double> try_log_pi(std::span<const std::int64_t> x) const;
  bool in_support(std::span<const std::int64_t> x) const { return try_log_pi(x).has_value(); }

  /// Precompute denominator caches up to the given per-species maxima.
  void materialize(std::span<const std::int64_t> coord_max) const;

 private:
  struct Cache;
  std::vector<double> c_;
  std::vector<double> log_c_;
  std::vector<ThetaFunction> thetas_;
  std::vector<std::shared_ptr<Cache>> caches_;

  long double denom_log(int species, std::int64_t x) const;
};

/// A probability vector over an enumerated class.
struct DistributionVector {
  std::shared_ptr<const StateClass> states;
  std::vector<double> probs;           // sums to 1
  double log_norm = 0.0;               // log of the normalization constant
  std::vector<double> log_unnorm;      // per-state log pi (log prob + log_norm)
  double boundary_mass = 0.0;          // total mass on clipped box faces
  double max_boundary_prob = 0.0;      // largest single-state mass there

  double prob_of(std::span<const std::int64_t> x) const;
};

/// Normalize the measure over the class via log-sum-exp. States off the
/// support get probability zero; throws NumericalError when no state is in
/// the support. Boundary tail-mass diagnostics are attached for box-bounded
/// classes.
DistributionVector normalize(const ProductFormMeasure& measure,
                             std::shared_ptr<const StateClass> states);

/// Pushforward under x -> coeffs . x, as a 1-dimensional distribution whose
/// "states" are the functional values.
DistributionVector marginal_functional(const DistributionVector& dist,
                                       std::span<const std::int64_t> coeffs);

/// Pushforward onto a subset of coordinates.
DistributionVector marginal_species(const DistributionVector& dist, std::span<const int> species);

/// Restrict to {x : coeffs . x = value} and renormalize (a conditional
/// distribution).
DistributionVector condition_on_functional(const DistributionVector& dist,
                                           std::span<const std::int64_t> coeffs,
                                           std::int64_t value);

/* Relative residual of the stationary balance at x, using the unnormalized
 * measure:
 *
 *   | sum_k lambda_k(x - xi_k) pi(x - xi_k) 1{x - xi_k >= 0} - pi(x) sum_k lambda_k(x) |
 *   ------------------------------------------------------------------------------
 *                                pi(x) sum_k lambda_k(x)
 *
 * Ratios pi(y)/pi(x) are taken in log space.
 */
double stationary_balance_residual(const ProductFormMeasure& measure, const KineticModel& model,
                                   std::span<const std::int64_t> x);

}  // namespace crn

#endif
