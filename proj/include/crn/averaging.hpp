#ifndef CRN_AVERAGING_HPP
#define CRN_AVERAGING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "crn/ctmc.hpp"
#include "crn/equilibrium.hpp"
#include "crn/kinetics.hpp"
#include "crn/stationary.hpp"

namespace crn {

/// Rate constants of the dimerization system
///   2 S1 <-> S2   (k1 x1(x1-1) forward, k2 x2 back),
///   0 -> S2 (k3),  S1 -> 0 (k4 x1).
struct DimerParams {
  double k1, k2, k3, k4;
};

/// The full four-reaction dimer model (mass action).
KineticModel dimer_full_model(const DimerParams& p);

/// Building block: 2 S1 <-> S2 with forward intensity
/// forward_kappa * (x1(x1-1) + theta_shift * 1{x1>1}) and reverse
/// reverse_kappa * x2. theta_shift = 0 gives plain mass action.
KineticModel dimer_fast_subsystem(double forward_kappa, double reverse_kappa, double theta_shift);

/// Quasi-equilibrium fast subsystem: 2 S1 <-> S2, forward k1 x1(x1-1),
/// reverse k4 x2 (mass action).
KineticModel qea_fast_subsystem(const DimerParams& p);

/// Constrained fast subsystem: 2 S1 <-> S2 with forward
/// k1 x1(x1-1) + k3 1{x1>1} (theta1(z) = z(z-1) + (k3/k1) 1{z>1}, step 2)
/// and reverse (k2 + k4) x2.
KineticModel constrained_fast_subsystem(const DimerParams& p);

// ---- reduced models ----------------------------------------------------------

enum class ReductionKind { QEA, Constrained };

/// Slow-variable model with tabulated effective rates
/// lambda_bar_k(s) = E_{pi_s}[lambda_k(X)], where pi_s is the analytic
/// stationary distribution of the fast subsystem on {w . x = s}.
struct ReducedModel {
  ReductionKind provenance;
  std::vector<std::int64_t> slow_weights;
  std::int64_t s_min = 0, s_max = 0;
  struct SlowChannel {
    int reaction;            // index into the full model
    std::int64_t s_change;   // w . (nu' - nu)
    std::vector<double> rates;  // indexed by s - s_min
  };
  std::vector<SlowChannel> channels;

  double rate(size_t channel, std::int64_t s) const {
    return channels.at(channel).rates.at(static_cast<size_t>(s - s_min));
  }
};

/// Tabulate effective rates of the given slow reactions over s in
/// [s_min, s_max]. The fast subsystem must satisfy the product-form
/// hypotheses; per-s normalization failures are rethrown with the failing s.
ReducedModel effective_rates(const KineticModel& fast, const KineticModel& full,
                             std::span<const int> slow_reactions,
                             std::span<const std::int64_t> slow_weights, std::int64_t s_min,
                             std::int64_t s_max, ReductionKind tag);

/// Simulate the reduced slow chain; effective rates are derived lazily per
/// visited slow state and memoized. The trajectory is 1-dimensional in s.
Trajectory slow_scale_ssa(const KineticModel& fast, const KineticModel& full,
                          std::span<const int> slow_reactions,
                          std::span<const std::int64_t> slow_weights, std::int64_t s0,
                          double t_max, std::uint64_t seed,
                          SsaMethod method = SsaMethod::Direct,
                          std::uint64_t max_jumps = ~std::uint64_t{0});

// ---- comparison metrics ------------------------------------------------------

/* Distributions are joined on the intersection of their state keys and both
 * renormalized there before the metric is taken; comparing distributions over
 * identical classes is unaffected. Throws NumericalError when the common
 * support is empty.
 */

/// ||p - q||_2 / ||q||_2 with q the reference.
double rel_l2(const DistributionVector& p, const DistributionVector& q_reference);

/// Total variation distance, half the l1 difference.
double tv_distance(const DistributionVector& a, const DistributionVector& b);

/// Stationary expected share of propensity carried by the given reactions:
/// sum_x pi(x) sum_{k in fast} lambda_k(x) / sum_x pi(x) sum_k lambda_k(x).
double fast_fraction(const DistributionVector& dist, std::span<const int> fast_reactions,
                     const KineticModel& model);

}  // namespace crn

#endif
