#ifndef CRN_KINETICS_HPP
#define CRN_KINETICS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crn/network.hpp"
#include "crn/theta.hpp"

namespace crn {

/// Per-species step sizes alpha_i = gcd of the source stoichiometries over
/// all reactions (gcd ignores zeros; a species absent from every source
/// complex gets alpha = 1), and the induced split: slow-step species have
/// alpha > 1.
struct SpeciesPartition {
  std::vector<std::int64_t> alpha;
  std::vector<bool> step_above_one;  // the S2 side of the split
};

SpeciesPartition species_partition(const ReactionNetwork& net);

/// A network plus per-species theta factors. Intensities follow
///   lambda_k(x) = kappa_k prod_i prod_{j=0}^{nu_ki/alpha_i - 1} theta_i(x_i - j alpha_i)
/// with the empty product equal to one.
class KineticModel {
 public:
  KineticModel(std::shared_ptr<const ReactionNetwork> net, std::vector<ThetaFunction> thetas);

  /// Default thetas: falling factorials of the partition step. Reproduces
  /// stochastic mass action.
  static KineticModel mass_action(std::shared_ptr<const ReactionNetwork> net);

  const ReactionNetwork& network() const { return *net_; }
  const std::shared_ptr<const ReactionNetwork>& network_ptr() const { return net_; }
  const std::vector<ThetaFunction>& thetas() const { return thetas_; }
  const ThetaFunction& theta(int species) const { return thetas_.at(static_cast<size_t>(species)); }
  const SpeciesPartition& partition() const { return partition_; }

  /// lambda_k(x). Throws std::out_of_range for a bad reaction index and
  /// ValidationError if the model fails the step-divisibility condition.
  double intensity(int reaction, std::span<const std::int64_t> x) const;
  std::vector<double> intensities(std::span<const std::int64_t> x) const;
  double total_intensity(std::span<const std::int64_t> x) const;

 private:
  std::shared_ptr<const ReactionNetwork> net_;
  std::vector<ThetaFunction> thetas_;
  SpeciesPartition partition_;
  struct SourceTerm {
    int species;
    std::int64_t reps;   // nu_ki / alpha_i, or -1 when alpha does not divide nu
    std::int64_t alpha;
  };
  std::vector<std::vector<SourceTerm>> source_terms_;
};

enum class AssumptionCheck {
  StepMatchesSources,   // (a) theta step equals the gcd partition value
  ZeroPattern,          // (b) theta(z) = 0 iff z < alpha, probed on [0, z_max]
  PositiveRateConstants // (c) kappa_k > 0
};

struct ValidationIssue {
  AssumptionCheck condition;
  int species = -1;
  int reaction = -1;
  bool domain_exhausted = false;  // a theta table ran out before z_max
  std::string message;
};

struct ValidationReport {
  bool pass = true;
  std::vector<ValidationIssue> issues;  // in check order; first() is the lead violation
  const ValidationIssue* first() const { return issues.empty() ? nullptr : &issues.front(); }
};

/// Probe the model against its kinetic contract. probe_max = 0 selects the
/// default 10 * alpha_i + 100 per species. Failures are report entries, not
/// exceptions.
ValidationReport validate_assumption(const KineticModel& model, std::int64_t probe_max = 0);

}  // namespace crn

#endif
