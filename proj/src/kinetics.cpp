#include "crn/kinetics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace crn {

SpeciesPartition species_partition(const ReactionNetwork& net) {
  const int d = net.num_species();
  SpeciesPartition p;
  p.alpha.assign(static_cast<size_t>(d), 0);
  for (int k = 0; k < net.num_reactions(); ++k) {
    const State& src = net.source_counts(k);
    for (int i = 0; i < d; ++i)
      p.alpha[static_cast<size_t>(i)] =
          std::gcd(p.alpha[static_cast<size_t>(i)], src[static_cast<size_t>(i)]);
  }
  // species never consumed: gcd over an empty set is 0, use step 1
  for (auto& a : p.alpha)
    if (a == 0) a = 1;
  p.step_above_one.resize(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    p.step_above_one[static_cast<size_t>(i)] = p.alpha[static_cast<size_t>(i)] > 1;
  return p;
}

KineticModel::KineticModel(std::shared_ptr<const ReactionNetwork> net,
                           std::vector<ThetaFunction> thetas)
    : net_(std::move(net)), thetas_(std::move(thetas)) {
  if (!net_) throw ValidationError("kinetic model needs a network");
  if (static_cast<int>(thetas_.size()) != net_->num_species())
    throw ValidationError("one theta per species required");
  partition_ = species_partition(*net_);

  source_terms_.resize(static_cast<size_t>(net_->num_reactions()));
  for (int k = 0; k < net_->num_reactions(); ++k) {
    for (const auto& [species, nu] : net_->reaction(k).source.terms()) {
      std::int64_t a = thetas_[static_cast<size_t>(species)].alpha();
      SourceTerm term{species, nu % a == 0 ? nu / a : -1, a};
      source_terms_[static_cast<size_t>(k)].push_back(term);
    }
  }
}

KineticModel KineticModel::mass_action(std::shared_ptr<const ReactionNetwork> net) {
  SpeciesPartition p = species_partition(*net);
  std::vector<ThetaFunction> thetas;
  thetas.reserve(p.alpha.size());
  for (std::int64_t a : p.alpha) thetas.push_back(ThetaFunction::falling_factorial(a));
  return KineticModel(std::move(net), std::move(thetas));
}

double KineticModel::intensity(int reaction, std::span<const std::int64_t> x) const {
  if (reaction < 0 || reaction >= net_->num_reactions())
    throw std::out_of_range("reaction index " + std::to_string(reaction) + " out of range");
  double lambda = net_->reaction(reaction).kappa;
  for (const SourceTerm& t : source_terms_[static_cast<size_t>(reaction)]) {
    if (t.reps < 0)
      throw ValidationError(
          "intensity undefined: theta step does not divide a source stoichiometry "
          "(run validate_assumption for details)");
    const ThetaFunction& theta = thetas_[static_cast<size_t>(t.species)];
    std::int64_t xi = x[static_cast<size_t>(t.species)];
    for (std::int64_t j = 0; j < t.reps; ++j) {
      double f = theta(xi - j * t.alpha);
      if (f == 0.0) return 0.0;
      lambda *= f;
    }
  }
  return lambda;
}

std::vector<double> KineticModel::intensities(std::span<const std::int64_t> x) const {
  std::vector<double> out(static_cast<size_t>(net_->num_reactions()));
  for (int k = 0; k < net_->num_reactions(); ++k) out[static_cast<size_t>(k)] = intensity(k, x);
  return out;
}

double KineticModel::total_intensity(std::span<const std::int64_t> x) const {
  double total = 0.0;
  for (int k = 0; k < net_->num_reactions(); ++k) total += intensity(k, x);
  return total;
}

ValidationReport validate_assumption(const KineticModel& model, std::int64_t probe_max) {
  ValidationReport report;
  const ReactionNetwork& net = model.network();
  const SpeciesPartition& part = model.partition();
  auto add = [&report](ValidationIssue issue) {
    report.pass = false;
    report.issues.push_back(std::move(issue));
  };

  // (a) theta steps consistent with the gcd partition (this also gives
  // divisibility of every source stoichiometry)
  for (int i = 0; i < net.num_species(); ++i) {
    std::int64_t got = model.theta(i).alpha();
    std::int64_t want = part.alpha[static_cast<size_t>(i)];
    if (got != want) {
      std::ostringstream os;
      os << "condition (a): theta step for species '" << net.species()[static_cast<size_t>(i)].name
         << "' is " << got << " but the source gcd is " << want;
      add({AssumptionCheck::StepMatchesSources, i, -1, false, os.str()});
    }
  }

  // (b) zero pattern: theta(z) = 0 below alpha (structural) and > 0 on
  // [alpha, z_max]
  for (int i = 0; i < net.num_species(); ++i) {
    const ThetaFunction& theta = model.theta(i);
    std::int64_t z_max = probe_max > 0 ? probe_max : 10 * theta.alpha() + 100;
    for (std::int64_t z = theta.alpha(); z <= z_max; ++z) {
      double v;
      try {
        v = theta(z);
      } catch (const ThetaDomainError& e) {
        std::ostringstream os;
        os << "condition (b): theta for species '" << net.species()[static_cast<size_t>(i)].name
           << "' exhausted its domain before the probe bound " << z_max << ": " << e.what();
        add({AssumptionCheck::ZeroPattern, i, -1, true, os.str()});
        break;
      }
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "condition (b): theta(" << z << ") = " << v << " for species '"
           << net.species()[static_cast<size_t>(i)].name << "' must be positive for z >= "
           << theta.alpha();
        add({AssumptionCheck::ZeroPattern, i, -1, false, os.str()});
        break;
      }
    }
  }

  // (c) positive rate constants (enforced at construction; re-checked so the
  // report is self-contained)
  for (int k = 0; k < net.num_reactions(); ++k) {
    if (!(net.reaction(k).kappa > 0.0)) {
      add({AssumptionCheck::PositiveRateConstants, -1, k, false,
           "condition (c): kappa must be positive for reaction " + std::to_string(k)});
    }
  }
  return report;
}

}  // namespace crn
