#include "crn/ctmc.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "crn/rng.hpp"

namespace crn {

double TruncatedGenerator::residual_inf(std::span<const double> pi) const {
  Eigen::Map<const Eigen::VectorXd> p(pi.data(), static_cast<Eigen::Index>(pi.size()));
  Eigen::VectorXd r = adjoint * p;
  return r.cwiseAbs().maxCoeff();
}

TruncatedGenerator build_generator(const KineticModel& model,
                                   std::shared_ptr<const StateClass> states) {
  const ReactionNetwork& net = model.network();
  const int d = net.num_species();
  if (states->dims() != d) throw ValidationError("class dimension does not match the network");
  const size_t n = states->size();

  TruncatedGenerator gen;
  gen.states = states;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * static_cast<size_t>(net.num_reactions() + 1));
  std::vector<double> diag(n, 0.0);
  State y(static_cast<size_t>(d));
  for (size_t from = 0; from < n; ++from) {
    auto x = states->state(from);
    for (int k = 0; k < net.num_reactions(); ++k) {
      double rate = model.intensity(k, x);
      if (rate <= 0.0) continue;
      const State& xi = net.net_change(k);
      for (int i = 0; i < d; ++i) y[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + xi[static_cast<size_t>(i)];
      auto to = states->find(y);
      if (!to) {
        gen.clipped_rate_total += rate;
        ++gen.clipped_transitions;
        continue;
      }
      trips.emplace_back(static_cast<int>(*to), static_cast<int>(from), rate);
      diag[from] += rate;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), -diag[i]);
    gen.max_exit_rate = std::max(gen.max_exit_rate, diag[i]);
  }
  gen.adjoint.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  gen.adjoint.setFromTriplets(trips.begin(), trips.end());
  gen.adjoint.makeCompressed();
  return gen;
}

CommunicatingStructure communicating_structure(const TruncatedGenerator& gen) {
  const auto& at = gen.adjoint;
  const int n = static_cast<int>(at.cols());

  // iterative Tarjan on the positive-rate digraph (edges from = column)
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0),
      comp(static_cast<size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<size_t>(n), false);
  std::vector<int> stack;
  int next_index = 0, scc_count = 0;
  struct Frame {
    int v;
    Eigen::SparseMatrix<double>::InnerIterator it;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root, {at, root}});
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      bool descended = false;
      while (f.it) {
        int w = static_cast<int>(f.it.row());
        double rate = f.it.value();
        ++f.it;
        if (w == f.v || rate <= 0.0) continue;
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<size_t>(w)] = true;
          call.push_back({w, {at, w}});
          descended = true;
          break;
        }
        if (on_stack[static_cast<size_t>(w)])
          low[static_cast<size_t>(f.v)] =
              std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
      }
      if (descended) continue;
      if (low[static_cast<size_t>(f.v)] == index[static_cast<size_t>(f.v)]) {
        for (;;) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<size_t>(w)] = false;
          comp[static_cast<size_t>(w)] = scc_count;
          if (w == f.v) break;
        }
        ++scc_count;
      }
      int v = f.v;
      call.pop_back();
      if (!call.empty())
        low[static_cast<size_t>(call.back().v)] =
            std::min(low[static_cast<size_t>(call.back().v)], low[static_cast<size_t>(v)]);
    }
  }

  std::vector<bool> has_exit(static_cast<size_t>(scc_count), false);
  for (int from = 0; from < n; ++from)
    for (Eigen::SparseMatrix<double>::InnerIterator it(at, from); it; ++it) {
      int to = static_cast<int>(it.row());
      if (to == from || it.value() <= 0.0) continue;
      if (comp[static_cast<size_t>(to)] != comp[static_cast<size_t>(from)])
        has_exit[static_cast<size_t>(comp[static_cast<size_t>(from)])] = true;
    }

  CommunicatingStructure out;
  std::vector<int> closed_id(static_cast<size_t>(scc_count), -1);
  for (int c = 0; c < scc_count; ++c)
    if (!has_exit[static_cast<size_t>(c)]) {
      closed_id[static_cast<size_t>(c)] = static_cast<int>(out.closed_classes.size());
      out.closed_classes.emplace_back();
    }
  for (int v = 0; v < n; ++v) {
    int cid = closed_id[static_cast<size_t>(comp[static_cast<size_t>(v)])];
    if (cid >= 0)
      out.closed_classes[static_cast<size_t>(cid)].push_back(static_cast<std::uint32_t>(v));
    else
      out.transient.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Solve pi^T A = 0, sum pi = 1 on a subset of states: one balance row of the
// adjoint is replaced by all-ones. Returns the sub-distribution.
Eigen::VectorXd solve_on_subset(const SpMat& at, const std::vector<std::uint32_t>& subset,
                                double max_exit_rate, const NullspaceOptions& opt) {
  const size_t m = subset.size();
  if (m == 1) return Eigen::VectorXd::Ones(1);

  std::vector<int> global_to_local(static_cast<size_t>(at.cols()), -1);
  for (size_t i = 0; i < m; ++i) global_to_local[subset[i]] = static_cast<int>(i);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(at.nonZeros()));
  for (size_t j = 0; j < m; ++j) {
    for (SpMat::InnerIterator it(at, static_cast<int>(subset[j])); it; ++it) {
      int li = global_to_local[static_cast<size_t>(it.row())];
      if (li < 0) continue;  // edges leaving a closed class do not exist; diagonal stays consistent
      trips.emplace_back(li, static_cast<int>(j), it.value());
    }
  }
  SpMat sub(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  sub.setFromTriplets(trips.begin(), trips.end());
  sub.makeCompressed();

  double target = opt.residual_rtol * std::max(max_exit_rate, 1e-300);

  auto try_solve = [&](size_t replaced_row) -> Eigen::VectorXd {
    std::vector<Eigen::Triplet<double>> t2;
    t2.reserve(static_cast<size_t>(sub.nonZeros()) + m);
    for (int c = 0; c < sub.outerSize(); ++c)
      for (SpMat::InnerIterator it(sub, c); it; ++it)
        if (static_cast<size_t>(it.row()) != replaced_row)
          t2.emplace_back(it.row(), it.col(), it.value());
    for (size_t j = 0; j < m; ++j)
      t2.emplace_back(static_cast<int>(replaced_row), static_cast<int>(j), 1.0);
    SpMat sys(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    sys.setFromTriplets(t2.begin(), t2.end());
    sys.makeCompressed();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    rhs[static_cast<Eigen::Index>(replaced_row)] = 1.0;

    Eigen::VectorXd pi;
    if (m <= opt.direct_threshold) {
      Eigen::SparseLU<SpMat> lu;
      lu.analyzePattern(sys);
      lu.factorize(sys);
      if (lu.info() != Eigen::Success)
        throw NumericalError("sparse LU factorization of the balance system failed");
      pi = lu.solve(rhs);
    } else {
      // row-equilibrated BiCGSTAB with incomplete-LU preconditioning
      Eigen::VectorXd row_max = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (int c = 0; c < sys.outerSize(); ++c)
        for (SpMat::InnerIterator it(sys, c); it; ++it)
          row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
      for (int c = 0; c < sys.outerSize(); ++c)
        for (SpMat::InnerIterator it(sys, c); it; ++it) it.valueRef() /= row_max[it.row()];
      Eigen::VectorXd rhs_scaled = rhs.cwiseQuotient(row_max);
      Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> solver;
      solver.preconditioner().setDroptol(opt.ilut_droptol);
      solver.preconditioner().setFillfactor(opt.ilut_fill);
      solver.setTolerance(1e-14);
      solver.setMaxIterations(4000);
      solver.compute(sys);
      pi = solver.solve(rhs_scaled);
    }
    return pi;
  };

  auto polish = [&](Eigen::VectorXd pi) -> Eigen::VectorXd {
    // uniformized power sweeps from a good start: pi <- pi + (A^T pi)/Lambda
    double lambda = std::max(max_exit_rate, 1e-300) * 1.05;
    for (int sweep = 0; sweep < opt.max_refine_sweeps; ++sweep) {
      Eigen::VectorXd r = sub * pi;
      if (r.cwiseAbs().maxCoeff() <= target) break;
      pi += r / lambda;
      pi = pi.cwiseMax(0.0);
      pi /= pi.sum();
    }
    return pi;
  };

  size_t first_row = m / 2;
  for (int attempt = 0; attempt < 2; ++attempt) {
    size_t row = attempt == 0 ? first_row : 0;
    Eigen::VectorXd pi;
    try {
      pi = try_solve(row);
    } catch (const NumericalError&) {
      if (attempt == 1) throw;
      continue;
    }
    if (!pi.allFinite()) continue;
    pi = pi.cwiseMax(0.0);
    double total = pi.sum();
    if (!(total > 0.0)) continue;
    pi /= total;
    if ((sub * pi).cwiseAbs().maxCoeff() > target) pi = polish(std::move(pi));
    if ((sub * pi).cwiseAbs().maxCoeff() <= target) return pi;
  }
  throw NumericalError("stationary null-space solve failed to meet the residual bound");
}

}  // namespace

DistributionVector stationary_nullspace(const TruncatedGenerator& gen,
                                        const NullspaceOptions& options) {
  CommunicatingStructure cs = communicating_structure(gen);
  if (cs.closed_classes.size() != 1) {
    std::ostringstream os;
    os << "stationary distribution is not unique on this class: " << cs.closed_classes.size()
       << " closed communicating classes";
    os << " (sizes";
    for (const auto& c : cs.closed_classes) os << ' ' << c.size();
    os << "; " << cs.transient.size() << " transient states);"
       << " solve per closed class instead";
    throw NumericalError(os.str());
  }
  Eigen::VectorXd sub_pi =
      solve_on_subset(gen.adjoint, cs.closed_classes[0], gen.max_exit_rate, options);

  DistributionVector dist;
  dist.states = gen.states;
  dist.probs.assign(gen.states->size(), 0.0);
  for (size_t i = 0; i < cs.closed_classes[0].size(); ++i)
    dist.probs[cs.closed_classes[0][i]] = sub_pi[static_cast<Eigen::Index>(i)];
  dist.log_unnorm.resize(dist.probs.size());
  for (size_t i = 0; i < dist.probs.size(); ++i)
    dist.log_unnorm[i] =
        dist.probs[i] > 0 ? std::log(dist.probs[i]) : -std::numeric_limits<double>::infinity();
  if (dist.states->bounds()) {
    for (size_t i = 0; i < dist.probs.size(); ++i)
      if (dist.states->on_boundary_shell(i)) {
        dist.boundary_mass += dist.probs[i];
        dist.max_boundary_prob = std::max(dist.max_boundary_prob, dist.probs[i]);
      }
  }
  return dist;
}

std::vector<DistributionVector> stationary_per_closed_class(const TruncatedGenerator& gen,
                                                            const NullspaceOptions& options) {
  CommunicatingStructure cs = communicating_structure(gen);
  std::vector<DistributionVector> out;
  for (const auto& cls : cs.closed_classes) {
    Eigen::VectorXd sub_pi = solve_on_subset(gen.adjoint, cls, gen.max_exit_rate, options);
    DistributionVector dist;
    dist.states = gen.states;
    dist.probs.assign(gen.states->size(), 0.0);
    for (size_t i = 0; i < cls.size(); ++i) dist.probs[cls[i]] = sub_pi[static_cast<Eigen::Index>(i)];
    dist.log_unnorm.resize(dist.probs.size());
    for (size_t i = 0; i < dist.probs.size(); ++i)
      dist.log_unnorm[i] =
          dist.probs[i] > 0 ? std::log(dist.probs[i]) : -std::numeric_limits<double>::infinity();
    out.push_back(std::move(dist));
  }
  return out;
}

// ---- simulation -------------------------------------------------------------

Trajectory simulate(const KineticModel& model, const State& x0, double t_max, std::uint64_t seed,
                    SsaMethod method, std::uint64_t stream, std::uint64_t max_jumps) {
  const ReactionNetwork& net = model.network();
  const int d = net.num_species();
  const int kk = net.num_reactions();
  if (static_cast<int>(x0.size()) != d) throw ValidationError("x0 dimension mismatch");
  for (std::int64_t v : x0)
    if (v < 0) throw ValidationError("x0 must be componentwise nonnegative");
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");

  RngStream rng(seed, stream);
  Trajectory traj;
  traj.dims = d;
  traj.rng_seed = seed;
  traj.rng_stream = stream;
  traj.times.push_back(0.0);
  traj.states_flat.insert(traj.states_flat.end(), x0.begin(), x0.end());

  State x = x0;
  std::vector<double> rates(static_cast<size_t>(kk));
  double t = 0.0;
  std::uint64_t jumps = 0;

  // next-reaction bookkeeping: unit-rate internal clocks per channel
  std::vector<double> next_fire(static_cast<size_t>(kk)), internal_t(static_cast<size_t>(kk), 0.0);
  if (method == SsaMethod::NextReaction)
    for (int k = 0; k < kk; ++k) next_fire[static_cast<size_t>(k)] = rng.exponential();

  while (t < t_max && jumps < max_jumps) {
    double total = 0.0;
    for (int k = 0; k < kk; ++k) {
      rates[static_cast<size_t>(k)] = model.intensity(k, x);
      total += rates[static_cast<size_t>(k)];
    }
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
      for (int k = 0; k < kk; ++k) {
        if (rates[static_cast<size_t>(k)] <= 0.0) continue;
        last_positive = k;
        acc += rates[static_cast<size_t>(k)];
        if (u < acc) {
          fired = k;
          break;
        }
      }
      if (fired < 0) fired = last_positive;  // roundoff at u ~ total
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < kk; ++k) {
        double r = rates[static_cast<size_t>(k)];
        if (r <= 0.0) continue;
        double cand = (next_fire[static_cast<size_t>(k)] - internal_t[static_cast<size_t>(k)]) / r;
        if (cand < best) {
          best = cand;
          fired = k;
        }
      }
      dt = best;
      for (int k = 0; k < kk; ++k)
        internal_t[static_cast<size_t>(k)] += rates[static_cast<size_t>(k)] * dt;
      next_fire[static_cast<size_t>(fired)] += rng.exponential();
    }
    if (t + dt > t_max) {
      t = t_max;
      break;
    }
    t += dt;
    const State& xi = net.net_change(fired);
    for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] += xi[static_cast<size_t>(i)];
    traj.times.push_back(t);
    traj.states_flat.insert(traj.states_flat.end(), x.begin(), x.end());
    traj.reactions.push_back(fired);
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

std::vector<Trajectory> simulate_ensemble(const KineticModel& model, const State& x0, double t_max,
                                          std::uint64_t seed, SsaMethod method, int count,
                                          std::uint64_t max_jumps) {
  std::vector<Trajectory> out(static_cast<size_t>(count));
  int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i)
      out[static_cast<size_t>(i)] =
          simulate(model, x0, t_max, seed, method, static_cast<std::uint64_t>(i), max_jumps);
    return out;
  }
  std::atomic_int next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        out[static_cast<size_t>(i)] =
            simulate(model, x0, t_max, seed, method, static_cast<std::uint64_t>(i), max_jumps);
      }
    });
  for (auto& th : pool) th.join();
  return out;
}

namespace {

void accumulate_occupation(const Trajectory& traj, double burn_in,
                           std::map<State, double>& occupancy, double& total_time) {
  if (!(traj.t_end > burn_in))
    throw ValidationError("trajectory does not extend past the burn-in time");
  for (size_t i = 0; i < traj.num_states(); ++i) {
    double t0 = traj.times[i];
    double t1 = (i + 1 < traj.num_states()) ? traj.times[i + 1] : traj.t_end;
    double lo = std::max(t0, burn_in);
    double hi = t1;
    if (hi <= lo) continue;
    auto s = traj.state(i);
    occupancy[State(s.begin(), s.end())] += hi - lo;
    total_time += hi - lo;
  }
}

}  // namespace

DistributionVector empirical_distribution(std::span<const Trajectory> trajs, double burn_in) {
  if (trajs.empty()) throw ValidationError("no trajectories");
  std::map<State, double> occupancy;
  double total = 0.0;
  for (const Trajectory& traj : trajs) accumulate_occupation(traj, burn_in, occupancy, total);
  if (!(total > 0.0)) throw ValidationError("no occupation time past burn-in");

  std::vector<State> keys;
  keys.reserve(occupancy.size());
  std::vector<double> probs;
  probs.reserve(occupancy.size());
  for (auto& [k, w] : occupancy) {
    keys.push_back(k);
    probs.push_back(w / total);
  }
  DistributionVector dist;
  dist.states = StateClass::explicit_states(std::move(keys));
  dist.probs = std::move(probs);
  dist.log_unnorm.resize(dist.probs.size());
  for (size_t i = 0; i < dist.probs.size(); ++i) dist.log_unnorm[i] = std::log(dist.probs[i]);
  return dist;
}

DistributionVector empirical_distribution(const Trajectory& traj, double burn_in) {
  return empirical_distribution(std::span<const Trajectory>(&traj, 1), burn_in);
}

}  // namespace crn
