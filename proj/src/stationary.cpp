#include "crn/stationary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

namespace crn {

namespace {
constexpr long double kOffSupport = std::numeric_limits<long double>::infinity();
}

struct ProductFormMeasure::Cache {
  mutable std::shared_mutex mu;
  // logden[z] = sum_{j=0}^{floor(z/alpha)-1} log theta(z - j alpha);
  // +inf marks arguments with a nonpositive theta factor (off support)
  std::vector<long double> logden;
};

ProductFormMeasure::ProductFormMeasure(std::vector<double> c, std::vector<ThetaFunction> thetas)
    : c_(std::move(c)), thetas_(std::move(thetas)) {
  if (c_.size() != thetas_.size())
    throw ValidationError("measure needs one concentration per theta");
  if (c_.empty()) throw ValidationError("empty measure");
  log_c_.reserve(c_.size());
  for (double v : c_) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("equilibrium concentrations must be positive and finite");
    log_c_.push_back(std::log(v));
  }
  caches_.reserve(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) caches_.push_back(std::make_shared<Cache>());
}

ProductFormMeasure ProductFormMeasure::for_model(const KineticModel& model,
                                                 std::vector<double> c) {
  return ProductFormMeasure(std::move(c), model.thetas());
}

long double ProductFormMeasure::denom_log(int species, std::int64_t x) const {
  Cache& cache = *caches_[static_cast<size_t>(species)];
  {
    std::shared_lock lock(cache.mu);
    if (static_cast<size_t>(x) < cache.logden.size())
      return cache.logden[static_cast<size_t>(x)];
  }
  std::unique_lock lock(cache.mu);
  const ThetaFunction& theta = thetas_[static_cast<size_t>(species)];
  const std::int64_t alpha = theta.alpha();
  while (static_cast<std::int64_t>(cache.logden.size()) <= x) {
    std::int64_t z = static_cast<std::int64_t>(cache.logden.size());
    long double v;
    if (z < alpha) {
      v = 0.0L;  // empty product
    } else {
      double f = theta(z);
      long double prev = cache.logden[static_cast<size_t>(z - alpha)];
      v = (f > 0.0 && std::isfinite(f)) ? prev + std::log(static_cast<long double>(f))
                                        : kOffSupport;
    }
    cache.logden.push_back(v);
  }
  return cache.logden[static_cast<size_t>(x)];
}

void ProductFormMeasure::materialize(std::span<const std::int64_t> coord_max) const {
  for (int i = 0; i < dims(); ++i)
    if (coord_max[static_cast<size_t>(i)] >= 0) denom_log(i, coord_max[static_cast<size_t>(i)]);
}

std::optional<double> ProductFormMeasure::try_log_pi(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != dims()) throw ValidationError("state dimension mismatch");
  long double sum = 0.0L;
  for (int i = 0; i < dims(); ++i) {
    std::int64_t xi = x[static_cast<size_t>(i)];
    if (xi < 0) return std::nullopt;
    long double den = denom_log(i, xi);
    if (den == kOffSupport) return std::nullopt;
    sum += static_cast<long double>(xi) * static_cast<long double>(log_c_[static_cast<size_t>(i)]) - den;
  }
  return static_cast<double>(sum);
}

double ProductFormMeasure::log_pi(std::span<const std::int64_t> x) const {
  if (auto v = try_log_pi(x)) return *v;
  throw SupportError("state " + format_state(x) + " is outside the measure's support");
}

double DistributionVector::prob_of(std::span<const std::int64_t> x) const {
  auto idx = states->find(x);
  return idx ? probs[*idx] : 0.0;
}

DistributionVector normalize(const ProductFormMeasure& measure,
                             std::shared_ptr<const StateClass> states) {
  if (!states || states->size() == 0) throw ValidationError("cannot normalize over an empty class");
  if (states->dims() != measure.dims()) throw ValidationError("class/measure dimension mismatch");

  measure.materialize(states->coordinate_max());

  const size_t n = states->size();
  std::vector<double> logs(n);
  auto eval_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      auto v = measure.try_log_pi(states->state(i));
      logs[i] = v ? *v : -std::numeric_limits<double>::infinity();
    }
  };
  int workers = thread_count();
  if (workers > 1 && n > 4096) {
    // fixed chunk grid: results are identical for any worker count
    const size_t chunk = 4096;
    std::vector<std::thread> pool;
    std::atomic_size_t next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          size_t c = next.fetch_add(1);
          size_t lo = c * chunk;
          if (lo >= n) return;
          eval_range(lo, std::min(n, lo + chunk));
        }
      });
    for (auto& t : pool) t.join();
  } else {
    eval_range(0, n);
  }

  double log_norm = log_sum_exp(logs);
  if (!std::isfinite(log_norm))
    throw NumericalError("all states of the class lie outside the measure's support");

  DistributionVector dist;
  dist.states = std::move(states);
  dist.log_norm = log_norm;
  dist.log_unnorm = std::move(logs);
  dist.probs.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double l = dist.log_unnorm[i];
    dist.probs[i] = std::isfinite(l) ? std::exp(l - log_norm) : 0.0;
  }
  // exact final renormalization (deterministic pairwise sum)
  double total = pairwise_sum(dist.probs);
  for (double& p : dist.probs) p /= total;
  dist.log_norm += std::log(total);

  if (dist.states->bounds()) {
    for (size_t i = 0; i < n; ++i)
      if (dist.states->on_boundary_shell(i)) {
        dist.boundary_mass += dist.probs[i];
        dist.max_boundary_prob = std::max(dist.max_boundary_prob, dist.probs[i]);
      }
  }
  return dist;
}

namespace {

DistributionVector keyed_distribution(std::map<State, double> acc) {
  std::vector<State> keys;
  std::vector<double> probs;
  keys.reserve(acc.size());
  probs.reserve(acc.size());
  for (auto& [k, p] : acc) {
    keys.push_back(k);
    probs.push_back(p);
  }
  DistributionVector out;
  out.states = StateClass::explicit_states(std::move(keys));
  out.probs.resize(probs.size());
  out.log_unnorm.resize(probs.size());
  // explicit_states sorts lexicographically; std::map already delivered that order
  for (size_t i = 0; i < probs.size(); ++i) {
    out.probs[i] = probs[i];
    out.log_unnorm[i] = std::log(probs[i]);
  }
  return out;
}

}  // namespace

DistributionVector marginal_functional(const DistributionVector& dist,
                                       std::span<const std::int64_t> coeffs) {
  if (static_cast<int>(coeffs.size()) != dist.states->dims())
    throw ValidationError("functional dimension mismatch");
  std::map<State, double> acc;
  for (size_t i = 0; i < dist.states->size(); ++i) {
    auto x = dist.states->state(i);
    std::int64_t v = 0;
    for (size_t j = 0; j < coeffs.size(); ++j) v += coeffs[j] * x[j];
    acc[State{v}] += dist.probs[i];
  }
  return keyed_distribution(std::move(acc));
}

DistributionVector marginal_species(const DistributionVector& dist, std::span<const int> species) {
  if (species.empty()) throw ValidationError("empty species subset");
  std::map<State, double> acc;
  for (size_t i = 0; i < dist.states->size(); ++i) {
    auto x = dist.states->state(i);
    State key;
    key.reserve(species.size());
    for (int s : species) key.push_back(x[static_cast<size_t>(s)]);
    acc[std::move(key)] += dist.probs[i];
  }
  return keyed_distribution(std::move(acc));
}

DistributionVector condition_on_functional(const DistributionVector& dist,
                                           std::span<const std::int64_t> coeffs,
                                           std::int64_t value) {
  std::vector<State> keys;
  std::vector<double> probs;
  std::vector<double> logu;
  for (size_t i = 0; i < dist.states->size(); ++i) {
    auto x = dist.states->state(i);
    std::int64_t v = 0;
    for (size_t j = 0; j < coeffs.size(); ++j) v += coeffs[j] * x[j];
    if (v != value) continue;
    keys.emplace_back(x.begin(), x.end());
    probs.push_back(dist.probs[i]);
    logu.push_back(dist.log_unnorm.empty() ? std::log(dist.probs[i]) : dist.log_unnorm[i]);
  }
  if (keys.empty()) throw NumericalError("no states satisfy the conditioning constraint");
  double total = pairwise_sum(probs);
  if (!(total > 0.0))
    throw NumericalError("conditioning set has zero probability");
  DistributionVector out;
  out.states = StateClass::explicit_states(keys);  // already lex-sorted per class order
  out.probs.resize(probs.size());
  out.log_unnorm.resize(probs.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    size_t pos = *out.states->find(keys[i]);
    out.probs[pos] = probs[i] / total;
    out.log_unnorm[pos] = logu[i];
  }
  out.log_norm = dist.log_norm + std::log(total);
  return out;
}

double stationary_balance_residual(const ProductFormMeasure& measure, const KineticModel& model,
                                   std::span<const std::int64_t> x) {
  const ReactionNetwork& net = model.network();
  double log_px = measure.log_pi(x);
  long double inflow = 0.0L;
  long double outflow = 0.0L;
  State y(x.begin(), x.end());
  for (int k = 0; k < net.num_reactions(); ++k) {
    outflow += model.intensity(k, x);
    const State& xi = net.net_change(k);
    bool ok = true;
    for (int i = 0; i < net.num_species(); ++i) {
      y[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - xi[static_cast<size_t>(i)];
      if (y[static_cast<size_t>(i)] < 0) ok = false;
    }
    if (!ok) continue;
    double lam = model.intensity(k, y);
    if (lam <= 0.0) continue;
    auto log_py = measure.try_log_pi(y);
    if (!log_py) continue;  // pi(y) = 0
    inflow += static_cast<long double>(lam) *
              std::exp(static_cast<long double>(*log_py) - static_cast<long double>(log_px));
  }
  long double denom = std::max<long double>(outflow, 1e-300L);
  return static_cast<double>(std::fabs(static_cast<double>(inflow - outflow)) / denom);
}

}  // namespace crn
