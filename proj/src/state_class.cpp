#include "crn/state_class.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace crn {

namespace {

std::uint64_t hash_state(std::span<const std::int64_t> x) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int64_t v : x) {
    std::uint64_t u = static_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (u >> (8 * b)) & 0xff;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace

bool Box::contains(std::span<const std::int64_t> x) const {
  for (size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

std::int64_t Box::volume() const {
  std::int64_t v = 1;
  for (size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) return 0;
    std::int64_t side = hi[i] - lo[i] + 1;
    if (v > (std::int64_t{1} << 62) / side) throw ValidationError("box too large to enumerate");
    v *= side;
  }
  return v;
}

StateClass::StateClass(std::vector<std::int64_t> flat, int dims, Kind kind,
                       std::optional<Box> bounds)
    : flat_(std::move(flat)), dims_(dims), kind_(kind), bounds_(std::move(bounds)) {
  if (kind_ == Kind::Box) {
    arithmetic_index_ = true;
    strides_.assign(static_cast<size_t>(dims_), 1);
    for (int i = dims_ - 2; i >= 0; --i)
      strides_[static_cast<size_t>(i)] =
          strides_[static_cast<size_t>(i + 1)] *
          (bounds_->hi[static_cast<size_t>(i + 1)] - bounds_->lo[static_cast<size_t>(i + 1)] + 1);
  } else {
    build_index();
  }
}

void StateClass::build_index() {
  index_.reserve(size() * 2);
  for (size_t i = 0; i < size(); ++i)
    index_[hash_state(state(i))].push_back(static_cast<std::uint32_t>(i));
}

State StateClass::state_vector(size_t i) const {
  auto s = state(i);
  return State(s.begin(), s.end());
}

std::optional<size_t> StateClass::find(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != dims_) return std::nullopt;
  if (arithmetic_index_) {
    if (!bounds_->contains(x)) return std::nullopt;
    std::int64_t idx = 0;
    for (int i = 0; i < dims_; ++i)
      idx += (x[static_cast<size_t>(i)] - bounds_->lo[static_cast<size_t>(i)]) *
             strides_[static_cast<size_t>(i)];
    return static_cast<size_t>(idx);
  }
  auto it = index_.find(hash_state(x));
  if (it == index_.end()) return std::nullopt;
  for (std::uint32_t cand : it->second) {
    auto s = state(cand);
    if (std::equal(s.begin(), s.end(), x.begin(), x.end())) return cand;
  }
  return std::nullopt;
}

bool StateClass::on_boundary_shell(size_t i) const {
  if (!bounds_) return false;
  auto x = state(i);
  for (int j = 0; j < dims_; ++j) {
    if (x[static_cast<size_t>(j)] == bounds_->hi[static_cast<size_t>(j)]) return true;
    if (bounds_->lo[static_cast<size_t>(j)] > 0 &&
        x[static_cast<size_t>(j)] == bounds_->lo[static_cast<size_t>(j)])
      return true;
  }
  return false;
}

std::vector<std::int64_t> StateClass::coordinate_max() const {
  std::vector<std::int64_t> mx(static_cast<size_t>(dims_), 0);
  for (size_t i = 0; i < size(); ++i) {
    auto s = state(i);
    for (int j = 0; j < dims_; ++j)
      mx[static_cast<size_t>(j)] = std::max(mx[static_cast<size_t>(j)], s[static_cast<size_t>(j)]);
  }
  return mx;
}

std::shared_ptr<const StateClass> StateClass::conservation(std::vector<std::int64_t> weights,
                                                           std::int64_t total) {
  if (weights.empty()) throw ValidationError("conservation class needs at least one species");
  for (std::int64_t w : weights)
    if (w < 1)
      throw ValidationError(
          "conservation class is unbounded: every weight must be >= 1 to enumerate "
          "{x >= 0 : w.x = m}");
  if (total < 0) throw ValidationError("conservation class total must be >= 0");

  int d = static_cast<int>(weights.size());
  std::vector<std::int64_t> flat;
  State x(static_cast<size_t>(d), 0);
  // depth-first over coordinates in order gives lexicographic enumeration
  auto rec = [&](auto&& self, int i, std::int64_t remaining) -> void {
    if (i == d - 1) {
      if (remaining % weights[static_cast<size_t>(i)] == 0) {
        x[static_cast<size_t>(i)] = remaining / weights[static_cast<size_t>(i)];
        flat.insert(flat.end(), x.begin(), x.end());
      }
      return;
    }
    for (std::int64_t v = 0; v * weights[static_cast<size_t>(i)] <= remaining; ++v) {
      x[static_cast<size_t>(i)] = v;
      self(self, i + 1, remaining - v * weights[static_cast<size_t>(i)]);
    }
    x[static_cast<size_t>(i)] = 0;
  };
  rec(rec, 0, total);
  return std::shared_ptr<const StateClass>(
      new StateClass(std::move(flat), d, Kind::Conservation, std::nullopt));
}

std::shared_ptr<const StateClass> StateClass::box(Box b) {
  if (b.lo.size() != b.hi.size() || b.lo.empty()) throw ValidationError("malformed box");
  for (size_t i = 0; i < b.lo.size(); ++i) {
    if (b.lo[i] < 0 || b.hi[i] < b.lo[i]) throw ValidationError("malformed box bounds");
  }
  std::int64_t n = b.volume();
  int d = b.dims();
  std::vector<std::int64_t> flat;
  flat.reserve(static_cast<size_t>(n) * static_cast<size_t>(d));
  State x(b.lo.begin(), b.lo.end());
  for (std::int64_t c = 0; c < n; ++c) {
    flat.insert(flat.end(), x.begin(), x.end());
    for (int i = d - 1; i >= 0; --i) {
      if (++x[static_cast<size_t>(i)] <= b.hi[static_cast<size_t>(i)]) break;
      x[static_cast<size_t>(i)] = b.lo[static_cast<size_t>(i)];
    }
  }
  return std::shared_ptr<const StateClass>(new StateClass(std::move(flat), d, Kind::Box, std::move(b)));
}

std::shared_ptr<const StateClass> StateClass::reachable(const KineticModel& model,
                                                        const State& seed, const Box& bounds) {
  const ReactionNetwork& net = model.network();
  int d = net.num_species();
  if (static_cast<int>(seed.size()) != d || bounds.dims() != d)
    throw ValidationError("seed/box dimension mismatch");
  if (!bounds.contains(seed)) throw ValidationError("seed state outside the box");

  struct VecHash {
    size_t operator()(const State& s) const { return hash_state(s); }
  };
  std::unordered_set<State, VecHash> seen;
  std::deque<State> queue;
  seen.insert(seed);
  queue.push_back(seed);
  while (!queue.empty()) {
    State x = std::move(queue.front());
    queue.pop_front();
    for (int k = 0; k < net.num_reactions(); ++k) {
      if (model.intensity(k, x) <= 0.0) continue;
      State y = x;
      const State& xi = net.net_change(k);
      for (int i = 0; i < d; ++i) y[static_cast<size_t>(i)] += xi[static_cast<size_t>(i)];
      if (!bounds.contains(y)) continue;
      if (seen.insert(y).second) queue.push_back(y);
    }
  }
  std::vector<State> states(seen.begin(), seen.end());
  std::sort(states.begin(), states.end());
  std::vector<std::int64_t> flat;
  flat.reserve(states.size() * static_cast<size_t>(d));
  for (const State& s : states) flat.insert(flat.end(), s.begin(), s.end());
  return std::shared_ptr<const StateClass>(
      new StateClass(std::move(flat), d, Kind::Reachable, bounds));
}

std::shared_ptr<const StateClass> StateClass::explicit_states(std::vector<State> states,
                                                              std::optional<Box> bounds) {
  if (states.empty()) throw ValidationError("empty state class");
  int d = static_cast<int>(states.front().size());
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  std::vector<std::int64_t> flat;
  flat.reserve(states.size() * static_cast<size_t>(d));
  for (const State& s : states) {
    if (static_cast<int>(s.size()) != d) throw ValidationError("inconsistent state dimensions");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return std::shared_ptr<const StateClass>(
      new StateClass(std::move(flat), d, Kind::Explicit, std::move(bounds)));
}

}  // namespace crn
