#pragma once

#include <cstdint>
#include <string_view>

namespace gsde {

// 64-bit FNV-1a, used to fold string labels into stream keys.
std::uint64_t hash64(std::string_view s) noexcept;

// Order-sensitive combiner for deriving child keys from a parent key.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept;

// Deterministic counter-based random stream (SplitMix64 core).
//
// Draw i is a pure function of (key, i): there is no hidden state beyond the
// draw counter, so a stream derived from the same (master seed, measure id,
// path index) tuple replays bit-for-bit no matter which thread consumes it
// or in what order paths are generated. This is the concurrency contract the
// batch kernels rely on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) noexcept : key_(key) {}

  // Stream owning all randomness of one simulated path.
  static RngStream for_path(std::uint64_t master_seed, std::string_view measure_id,
                            std::uint64_t path_index) noexcept;

  // Independent child stream identified by a tag ("vol", "gauss", ...).
  // Children depend only on the parent's key, not on how many draws the
  // parent has already made.
  RngStream sub(std::string_view tag) const noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform strictly inside (0,1).
  double next_uniform() noexcept;

  // Standard normal via Box-Muller (cosine branch); two uniforms per draw.
  double next_normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gsde
