#include "crn/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace crn {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  key_ = mix64(mix64(seed + kGamma) ^ (stream * 0xda942042e4dd58b5ULL + kGamma));
}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (++counter_) * kGamma); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential(): rate must be > 0");
  // u in [0,1) => 1-u in (0,1], log is finite
  return -std::log1p(-uniform()) / rate;
}

}  // namespace crn
