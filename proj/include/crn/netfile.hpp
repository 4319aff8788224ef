#ifndef CRN_NETFILE_HPP
#define CRN_NETFILE_HPP

#include <string>
#include <utility>
#include <vector>

#include "crn/kinetics.hpp"

namespace crn {

/* Network file format, one directive per line; '#' starts a comment.
 *
 *   species S1 S2 ...
 *   theta <species> [alpha=<int>] expr="<expression>" | table=<path>
 *                   [factor_step=<int>] [C=<real>]
 *   reaction <complex> -> <complex> kappa=<real>
 *
 * Complexes are written like `2 S1 + S2`, or `0` for the empty complex.
 * Species without a theta directive get the default falling factorial of
 * their step. An explicit alpha must equal the gcd of the species' source
 * stoichiometries. With factor_step=m the given expression is a rate factor
 * over step m; the species factor is derived from it by the step-m
 * factorization with free constant C (default 1), and the species' own step
 * must be 1. Table files hold one theta value per line starting at z = 0.
 *
 * Parsing yields a model that passes validate_assumption, or throws
 * ParseError/ValidationError with a position and the violated clause.
 */
KineticModel parse_network(const std::string& text, const std::string& filename = "<input>");
KineticModel parse_network_file(const std::string& path);

std::string serialize_network(const KineticModel& model);

bool models_equal(const KineticModel& a, const KineticModel& b);

/// Parse "S1 + 2 S2" style integer linear combinations of species names;
/// returns the coefficient vector.
std::vector<std::int64_t> parse_linear_functional(const std::string& text,
                                                  const ReactionNetwork& net);

/// Parse "S1 + 2 S2 = 300" into (weights, value).
std::pair<std::vector<std::int64_t>, double> parse_linear_constraint(const std::string& text,
                                                                     const ReactionNetwork& net);

}  // namespace crn

#endif
