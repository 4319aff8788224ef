#ifndef CRN_EQUILIBRIUM_HPP
#define CRN_EQUILIBRIUM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crn/network.hpp"

namespace crn {

/// One linear anchor w . c = value pinning a stoichiometric compatibility
/// class (one per conservation vector).
struct ClassConstraint {
  std::vector<double> weights;
  double value;
};

struct Equilibrium {
  std::vector<double> concentrations;  // componentwise > 0
  double residual = 0.0;               // max relative complex-balance residual
  std::vector<ClassConstraint> class_anchor;
  int iterations = 0;
  std::string warning;  // set when the network is not weakly reversible with deficiency 0
};

struct EquilibriumOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
  int restarts = 4;
  std::uint64_t seed = 0x5eedULL;  // perturbed restarts are reproducible
};

/// Right-hand side of the deterministic mass-action ODE,
/// sum_k kappa_k prod_i x_i^{nu_ki} (nu_k' - nu_k).
std::vector<double> mass_action_rhs(const ReactionNetwork& net, std::span<const double> x);
std::vector<double> mass_action_rhs(const ReactionNetwork& net, std::span<const double> kappas,
                                    std::span<const double> x);

/// Relative complex-balance residual per complex (order of net.complexes()):
/// |inflow - outflow| / max(inflow, outflow, 1e-300).
std::vector<double> complex_balance_residual(const ReactionNetwork& net,
                                             std::span<const double> c);
std::vector<double> complex_balance_residual(const ReactionNetwork& net,
                                             std::span<const double> kappas,
                                             std::span<const double> c);

/* Find a positive complex-balanced equilibrium satisfying the constraints.
 *
 * Damped Gauss-Newton in log concentrations on the stacked system
 * {per-complex balance equations, constraints}, with a descent fallback on the
 * squared residual and seeded restarts. When the network is weakly reversible
 * with deficiency 0, existence and uniqueness within the class hold for every
 * kappa; otherwise a warning is attached and convergence is not guaranteed.
 *
 * Throws NumericalError (with the last iterate embedded in the message) on
 * non-convergence, and ValidationError for plainly infeasible constraints.
 */
Equilibrium solve_complex_balanced(const ReactionNetwork& net,
                                   const std::vector<ClassConstraint>& constraints,
                                   const EquilibriumOptions& options = {});

}  // namespace crn

#endif
