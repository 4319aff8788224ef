#ifndef CRN_CTMC_HPP
#define CRN_CTMC_HPP

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "crn/stationary.hpp"

namespace crn {

/* Generator of the chain truncated to a finite class. Transitions whose
 * target leaves the class are removed and the diagonal holds only the kept
 * outflow, so every row sums to zero and the matrix stays a proper generator
 * (clipped mass is reported, not lost silently).
 *
 * Stored as the adjoint A^T (entry (to, from) = rate), which is what both the
 * stationary solve and the residual check consume.
 */
struct TruncatedGenerator {
  std::shared_ptr<const StateClass> states;
  Eigen::SparseMatrix<double> adjoint;
  double max_exit_rate = 0.0;        // max kept outflow over states
  double clipped_rate_total = 0.0;   // summed rate of removed transitions
  std::int64_t clipped_transitions = 0;

  /// ||pi A||_inf for a probability vector over the class.
  double residual_inf(std::span<const double> pi) const;
};

TruncatedGenerator build_generator(const KineticModel& model,
                                   std::shared_ptr<const StateClass> states);

struct NullspaceOptions {
  std::size_t direct_threshold = 200000;  // states; above this use the iterative path
  double residual_rtol = 1e-10;           // contract: ||pi A||_inf <= rtol * max_exit_rate
  int max_refine_sweeps = 50000;          // uniformized power polishing budget
  double ilut_droptol = 1e-5;
  int ilut_fill = 20;
};

/// Closed communicating classes (no exits) and transient states of the
/// truncated chain, from an SCC decomposition of the positive-rate digraph.
struct CommunicatingStructure {
  std::vector<std::vector<std::uint32_t>> closed_classes;
  std::vector<std::uint32_t> transient;
};

CommunicatingStructure communicating_structure(const TruncatedGenerator& gen);

/* Stationary distribution from the generator null space: one balance row is
 * replaced by the normalization and the system is solved directly (sparse LU)
 * up to direct_threshold states, iteratively above it; either way the result
 * must meet the residual contract or NumericalError is thrown.
 *
 * Requires a unique closed communicating class; transient states get
 * probability zero. With several closed classes the distribution is not
 * unique and NumericalError reports the decomposition — use
 * stationary_per_closed_class to solve each one.
 */
DistributionVector stationary_nullspace(const TruncatedGenerator& gen,
                                        const NullspaceOptions& options = {});

std::vector<DistributionVector> stationary_per_closed_class(
    const TruncatedGenerator& gen, const NullspaceOptions& options = {});

// ---- exact stochastic simulation -------------------------------------------

enum class SsaMethod { Direct, NextReaction };

struct Trajectory {
  std::vector<double> times;            // times[0] = 0; strictly increasing
  std::vector<std::int64_t> states_flat;  // dims per entry, aligned with times
  std::vector<int> reactions;           // reactions[j] fired at times[j+1]
  int dims = 0;
  double t_end = 0.0;                   // horizon (last jump time if jump-limited)
  bool absorbed = false;                // total intensity hit zero
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;

  size_t num_states() const { return times.size(); }
  std::span<const std::int64_t> state(size_t i) const {
    return {states_flat.data() + i * static_cast<size_t>(dims), static_cast<size_t>(dims)};
  }
};

/// Statistically exact sample path. Both methods draw from the same law (not
/// the same paths). Runs until t_max or max_jumps, whichever comes first;
/// absorption (zero total intensity) ends the path and is flagged.
Trajectory simulate(const KineticModel& model, const State& x0, double t_max, std::uint64_t seed,
                    SsaMethod method = SsaMethod::Direct, std::uint64_t stream = 0,
                    std::uint64_t max_jumps = ~std::uint64_t{0});

/// Independent trajectories on streams 0..count-1, optionally in parallel;
/// results do not depend on the worker count.
std::vector<Trajectory> simulate_ensemble(const KineticModel& model, const State& x0, double t_max,
                                          std::uint64_t seed, SsaMethod method, int count,
                                          std::uint64_t max_jumps = ~std::uint64_t{0});

/// Occupation-time-weighted histogram over [burn_in, t_end]; the sojourn in
/// progress at t_end is truncated there.
DistributionVector empirical_distribution(const Trajectory& traj, double burn_in);
DistributionVector empirical_distribution(std::span<const Trajectory> trajs, double burn_in);

}  // namespace crn

#endif
