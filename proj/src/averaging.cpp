#include "crn/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "crn/rng.hpp"

namespace crn {

namespace {

Complex cplx(std::vector<std::pair<int, std::int64_t>> terms) { return Complex(std::move(terms)); }

std::shared_ptr<const ReactionNetwork> dimer_pair_network(double kf, double kr) {
  std::vector<Reaction> reactions;
  reactions.push_back({cplx({{0, 2}}), cplx({{1, 1}}), kf});
  reactions.push_back({cplx({{1, 1}}), cplx({{0, 2}}), kr});
  return std::make_shared<ReactionNetwork>(std::vector<std::string>{"S1", "S2"},
                                           std::move(reactions));
}

}  // namespace

KineticModel dimer_full_model(const DimerParams& p) {
  std::vector<Reaction> reactions;
  reactions.push_back({cplx({{0, 2}}), cplx({{1, 1}}), p.k1});  // 2 S1 -> S2
  reactions.push_back({cplx({{1, 1}}), cplx({{0, 2}}), p.k2});  // S2 -> 2 S1
  reactions.push_back({Complex(), cplx({{1, 1}}), p.k3});       // 0 -> S2
  reactions.push_back({cplx({{0, 1}}), Complex(), p.k4});       // S1 -> 0
  auto net = std::make_shared<ReactionNetwork>(std::vector<std::string>{"S1", "S2"},
                                               std::move(reactions));
  return KineticModel::mass_action(std::move(net));
}

KineticModel dimer_fast_subsystem(double forward_kappa, double reverse_kappa, double theta_shift) {
  auto net = dimer_pair_network(forward_kappa, reverse_kappa);
  std::vector<ThetaFunction> thetas;
  if (theta_shift == 0.0) {
    thetas.push_back(ThetaFunction::falling_factorial(2));
  } else {
    std::ostringstream os;
    os.precision(17);
    os << "x*(x-1) + " << theta_shift << "*ind(x>1)";
    thetas.push_back(ThetaFunction::from_expression(2, os.str()));
  }
  thetas.push_back(ThetaFunction::falling_factorial(1));
  return KineticModel(std::move(net), std::move(thetas));
}

KineticModel qea_fast_subsystem(const DimerParams& p) {
  return dimer_fast_subsystem(p.k1, p.k4, 0.0);
}

KineticModel constrained_fast_subsystem(const DimerParams& p) {
  return dimer_fast_subsystem(p.k1, p.k2 + p.k4, p.k3 / p.k1);
}

namespace {

// analytic fast-class distribution machinery shared by effective_rates and
// the slow-scale driver
struct FastAverager {
  const KineticModel& fast;
  const KineticModel& full;
  std::vector<int> slow_reactions;
  std::vector<std::int64_t> weights;
  ProductFormMeasure measure;

  FastAverager(const KineticModel& fast_model, const KineticModel& full_model,
               std::span<const int> slow, std::span<const std::int64_t> w)
      : fast(fast_model),
        full(full_model),
        slow_reactions(slow.begin(), slow.end()),
        weights(w.begin(), w.end()),
        measure(make_measure(fast_model, w)) {}

  static ProductFormMeasure make_measure(const KineticModel& fast_model,
                                         std::span<const std::int64_t> w) {
    ValidationReport rep = validate_assumption(fast_model);
    if (!rep.pass)
      throw ValidationError("fast subsystem fails its kinetic contract: " +
                            rep.first()->message);
    StructureReport structure = analyze_structure(fast_model.network());
    if (!(structure.deficiency == 0 && structure.weakly_reversible))
      throw ValidationError(
          "fast subsystem must be weakly reversible with deficiency zero for the "
          "analytic stationary distribution");
    // any complex-balanced equilibrium gives the same class distributions;
    // anchor the class sum at 1
    std::vector<double> wd(w.size());
    for (size_t i = 0; i < w.size(); ++i) wd[i] = static_cast<double>(w[i]);
    Equilibrium eq = solve_complex_balanced(fast_model.network(), {{wd, 1.0}});
    return ProductFormMeasure::for_model(fast_model, eq.concentrations);
  }

  std::vector<double> channel_rates(std::int64_t s) const {
    std::shared_ptr<const StateClass> cls;
    try {
      cls = StateClass::conservation(weights, s);
      DistributionVector dist = normalize(measure, cls);
      std::vector<double> rates;
      rates.reserve(slow_reactions.size());
      for (int k : slow_reactions) {
        double avg = 0.0;
        for (size_t i = 0; i < cls->size(); ++i)
          avg += dist.probs[i] * full.intensity(k, cls->state(i));
        rates.push_back(avg);
      }
      return rates;
    } catch (const Error& e) {
      throw NumericalError("effective-rate computation failed at slow state s=" +
                           std::to_string(s) + ": " + e.what());
    }
  }
};

}  // namespace

ReducedModel effective_rates(const KineticModel& fast, const KineticModel& full,
                             std::span<const int> slow_reactions,
                             std::span<const std::int64_t> slow_weights, std::int64_t s_min,
                             std::int64_t s_max, ReductionKind tag) {
  if (s_min < 0 || s_max < s_min) throw ValidationError("bad slow-variable range");
  FastAverager av(fast, full, slow_reactions, slow_weights);

  ReducedModel reduced;
  reduced.provenance = tag;
  reduced.slow_weights.assign(slow_weights.begin(), slow_weights.end());
  reduced.s_min = s_min;
  reduced.s_max = s_max;
  for (int k : slow_reactions) {
    const State& xi = full.network().net_change(k);
    std::int64_t ds = 0;
    for (size_t i = 0; i < slow_weights.size(); ++i) ds += slow_weights[i] * xi[i];
    reduced.channels.push_back({k, ds, {}});
    reduced.channels.back().rates.reserve(static_cast<size_t>(s_max - s_min + 1));
  }
  for (std::int64_t s = s_min; s <= s_max; ++s) {
    std::vector<double> rates = av.channel_rates(s);
    for (size_t c = 0; c < reduced.channels.size(); ++c)
      reduced.channels[c].rates.push_back(rates[c]);
  }
  return reduced;
}

Trajectory slow_scale_ssa(const KineticModel& fast, const KineticModel& full,
                          std::span<const int> slow_reactions,
                          std::span<const std::int64_t> slow_weights, std::int64_t s0,
                          double t_max, std::uint64_t seed, SsaMethod method,
                          std::uint64_t max_jumps) {
  if (s0 < 0) throw ValidationError("slow state must be nonnegative");
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
  FastAverager av(fast, full, slow_reactions, slow_weights);

  std::vector<std::int64_t> s_change;
  for (int k : slow_reactions) {
    const State& xi = full.network().net_change(k);
    std::int64_t ds = 0;
    for (size_t i = 0; i < slow_weights.size(); ++i) ds += slow_weights[i] * xi[i];
    s_change.push_back(ds);
  }
  std::unordered_map<std::int64_t, std::vector<double>> memo;
  auto rates_at = [&](std::int64_t s) -> const std::vector<double>& {
    auto it = memo.find(s);
    if (it == memo.end()) it = memo.emplace(s, av.channel_rates(s)).first;
    return it->second;
  };

  const size_t kk = s_change.size();
  RngStream rng(seed);
  Trajectory traj;
  traj.dims = 1;
  traj.rng_seed = seed;
  traj.times.push_back(0.0);
  traj.states_flat.push_back(s0);

  std::vector<double> next_fire(kk), internal_t(kk, 0.0);
  if (method == SsaMethod::NextReaction)
    for (size_t k = 0; k < kk; ++k) next_fire[k] = rng.exponential();

  std::int64_t s = s0;
  double t = 0.0;
  std::uint64_t jumps = 0;
  while (t < t_max && jumps < max_jumps) {
    const std::vector<double>& rates = rates_at(s);
    double total = 0.0;
    for (double r : rates) total += r;
    if (total <= 0.0) {
      traj.absorbed = true;
      break;
    }
    int fired = -1;
    double dt = 0.0;
    if (method == SsaMethod::Direct) {
      dt = rng.exponential(total);
      double u = rng.uniform() * total;
      double acc = 0.0;
      int last_positive = -1;
      for (size_t k = 0; k < kk; ++k) {
        if (rates[k] <= 0.0) continue;
        last_positive = static_cast<int>(k);
        acc += rates[k];
        if (u < acc) {
          fired = static_cast<int>(k);
          break;
        }
      }
      if (fired < 0) fired = last_positive;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < kk; ++k) {
        if (rates[k] <= 0.0) continue;
        double cand = (next_fire[k] - internal_t[k]) / rates[k];
        if (cand < best) {
          best = cand;
          fired = static_cast<int>(k);
        }
      }
      dt = best;
      for (size_t k = 0; k < kk; ++k) internal_t[k] += rates[k] * dt;
      next_fire[static_cast<size_t>(fired)] += rng.exponential();
    }
    if (t + dt > t_max) {
      t = t_max;
      break;
    }
    t += dt;
    s += s_change[static_cast<size_t>(fired)];
    traj.times.push_back(t);
    traj.states_flat.push_back(s);
    traj.reactions.push_back(slow_reactions[static_cast<size_t>(fired)]);
    ++jumps;
  }
  if (traj.absorbed)
    traj.t_end = std::isfinite(t_max) ? t_max : traj.times.back();
  else if (jumps >= max_jumps)
    traj.t_end = traj.times.back();
  else
    traj.t_end = t_max;
  return traj;
}

namespace {

struct JoinedPair {
  std::vector<double> p, q;
};

JoinedPair join_renormalized(const DistributionVector& a, const DistributionVector& b) {
  JoinedPair out;
  for (size_t i = 0; i < a.states->size(); ++i) {
    auto idx = b.states->find(a.states->state(i));
    if (!idx) continue;
    out.p.push_back(a.probs[i]);
    out.q.push_back(b.probs[*idx]);
  }
  if (out.p.empty()) throw NumericalError("distributions share no states");
  double sp = pairwise_sum(out.p);
  double sq = pairwise_sum(out.q);
  if (!(sp > 0.0) || !(sq > 0.0))
    throw NumericalError("distributions carry no mass on the common states");
  for (double& v : out.p) v /= sp;
  for (double& v : out.q) v /= sq;
  return out;
}

}  // namespace

double rel_l2(const DistributionVector& p, const DistributionVector& q_reference) {
  JoinedPair j = join_renormalized(p, q_reference);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < j.p.size(); ++i) {
    double d = j.p[i] - j.q[i];
    num += d * d;
    den += j.q[i] * j.q[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

double tv_distance(const DistributionVector& a, const DistributionVector& b) {
  JoinedPair j = join_renormalized(a, b);
  double sum = 0.0;
  for (size_t i = 0; i < j.p.size(); ++i) sum += std::fabs(j.p[i] - j.q[i]);
  return 0.5 * sum;
}

double fast_fraction(const DistributionVector& dist, std::span<const int> fast_reactions,
                     const KineticModel& model) {
  std::vector<bool> is_fast(static_cast<size_t>(model.network().num_reactions()), false);
  for (int k : fast_reactions) is_fast.at(static_cast<size_t>(k)) = true;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < dist.states->size(); ++i) {
    if (dist.probs[i] == 0.0) continue;
    auto x = dist.states->state(i);
    for (int k = 0; k < model.network().num_reactions(); ++k) {
      double w = dist.probs[i] * model.intensity(k, x);
      den += w;
      if (is_fast[static_cast<size_t>(k)]) num += w;
    }
  }
  if (!(den > 0.0)) throw NumericalError("distribution has zero total intensity");
  return num / den;
}

}  // namespace crn
