#ifndef CRN_RNG_HPP
#define CRN_RNG_HPP

#include <cstdint>

namespace crn {

/// Counter-based random stream: every output is a bijective hash (splitmix64
/// finalizer) of (key, counter), where the key is derived from a user seed and
/// a stream id. Streams with distinct (seed, stream) pairs are independent and
/// a run is reproducible from those two numbers alone.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform double in [0, 1).
  double uniform();
  /// Exponential variate with the given rate (> 0).
  double exponential(double rate = 1.0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // UniformRandomBitGenerator interface
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace crn

#endif
