#ifndef CRN_STATE_CLASS_HPP
#define CRN_STATE_CLASS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "crn/kinetics.hpp"

namespace crn {

struct Box {
  std::vector<std::int64_t> lo, hi;  // inclusive bounds per species

  int dims() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const std::int64_t> x) const;
  /// Number of lattice points; throws on overflow past 2^62.
  std::int64_t volume() const;
};

/// A finite enumerated set of states with an index map. States are kept in
/// lexicographic order so outputs are reproducible.
class StateClass {
 public:
  enum class Kind { Conservation, Box, Reachable, Explicit };

  /// { x >= 0 : w . x = total }. Throws ValidationError when some weight is
  /// < 1 (the class would be infinite).
  static std::shared_ptr<const StateClass> conservation(std::vector<std::int64_t> weights,
                                                        std::int64_t total);
  static std::shared_ptr<const StateClass> box(Box b);
  /// Breadth-first closure of the seed under reaction jumps with positive
  /// intensity, restricted to the box.
  static std::shared_ptr<const StateClass> reachable(const KineticModel& model, const State& seed,
                                                     const Box& bounds);
  static std::shared_ptr<const StateClass> explicit_states(std::vector<State> states,
                                                           std::optional<Box> bounds = {});

  size_t size() const { return flat_.size() / static_cast<size_t>(dims_); }
  int dims() const { return dims_; }
  std::span<const std::int64_t> state(size_t i) const {
    return {flat_.data() + i * static_cast<size_t>(dims_), static_cast<size_t>(dims_)};
  }
  State state_vector(size_t i) const;
  std::optional<size_t> find(std::span<const std::int64_t> x) const;

  Kind kind() const { return kind_; }
  const std::optional<Box>& bounds() const { return bounds_; }
  /// True when the state touches a clipped box face: a coordinate at the
  /// upper bound, or at a strictly positive lower bound.
  bool on_boundary_shell(size_t i) const;
  /// Maximum of each coordinate over the class.
  std::vector<std::int64_t> coordinate_max() const;

 private:
  StateClass(std::vector<std::int64_t> flat, int dims, Kind kind, std::optional<Box> bounds);
  void build_index();

  std::vector<std::int64_t> flat_;
  int dims_;
  Kind kind_;
  std::optional<Box> bounds_;
  bool arithmetic_index_ = false;  // pure box: index computed from strides
  std::vector<std::int64_t> strides_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index_;  // hash -> candidates
};

}  // namespace crn

#endif
