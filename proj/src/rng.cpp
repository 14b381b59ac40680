#include "gsde/rng.hpp"

#include <cmath>
#include <numbers>

namespace gsde {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function.
std::uint64_t finalize(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t hash64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  return finalize(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

RngStream RngStream::for_path(std::uint64_t master_seed, std::string_view measure_id,
                              std::uint64_t path_index) noexcept {
  std::uint64_t key = mix64(master_seed, hash64("path"));
  key = mix64(key, hash64(measure_id));
  key = mix64(key, path_index);
  return RngStream(key);
}

RngStream RngStream::sub(std::string_view tag) const noexcept {
  return RngStream(mix64(key_, hash64(tag)));
}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return finalize(key_ + counter_ * kGolden);
}

double RngStream::next_uniform() noexcept {
  // 53 mantissa bits, offset by half an ulp so 0 and 1 are unreachable.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() noexcept {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gsde
