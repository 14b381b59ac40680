#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gsde/grid.hpp"
#include "gsde/rng.hpp"

namespace gsde {

struct VolBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// A measure on path space, encoded by the law of its per-step volatility
// density. bounds() brackets every variance rate the spec can realize;
// construction rejects anything outside (0, inf).
class VolatilitySpec {
 public:
  enum class Kind { Constant, PiecewiseConstant, RegimeSwitching, Mixture };

  // Fixed variance rate sigma^2.
  static VolatilitySpec constant(double variance_rate);

  // Deterministic schedule: values[0] on [0, breakpoints[0]), values[i] on
  // [breakpoints[i-1], breakpoints[i]), values.back() afterwards. Requires
  // values.size() == breakpoints.size() + 1.
  static VolatilitySpec piecewise(std::vector<double> breakpoints,
                                  std::vector<double> values);

  // Markov chain on the given variance rates: initial state uniform, then at
  // each step with probability switch_prob jump to a uniformly chosen other
  // state.
  static VolatilitySpec regime_switching(std::vector<double> states,
                                         double switch_prob);

  // Fair-or-weighted coin over two component specs; weight is the
  // probability of the left component. Bounds are the envelope of the two.
  static VolatilitySpec mixture(VolatilitySpec left, VolatilitySpec right,
                                double weight);

  Kind kind() const noexcept { return kind_; }
  const VolBounds& bounds() const noexcept { return bounds_; }

  double constant_value() const;
  const std::vector<double>& breakpoints() const;
  const std::vector<double>& piece_values() const;
  const std::vector<double>& states() const;
  double switch_prob() const;
  const VolatilitySpec& left() const;
  const VolatilitySpec& right() const;
  double weight() const;

  std::string describe() const;

 private:
  VolatilitySpec() = default;

  Kind kind_ = Kind::Constant;
  VolBounds bounds_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;  // constant value, piecewise values, or states
  double prob_ = 0.0;           // switch_prob or mixture weight
  std::shared_ptr<const VolatilitySpec> left_;
  std::shared_ptr<const VolatilitySpec> right_;
};

struct Member {
  std::string id;
  VolatilitySpec spec;
};

class MeasureFamily {
 public:
  explicit MeasureFamily(std::vector<Member> members);

  const std::vector<Member>& members() const noexcept { return members_; }
  const VolBounds& envelope() const noexcept { return envelope_; }
  std::size_t size() const noexcept { return members_.size(); }
  const Member& at(std::size_t i) const { return members_.at(i); }
  const Member* find(std::string_view id) const noexcept;

 private:
  std::vector<Member> members_;
  VolBounds envelope_;
};

struct PathProvenance {
  std::string measure_id;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  std::string key() const;
};

// One discretized canonical path: driver values B, the generator-side
// volatility record that produced the increments, and the running pathwise
// QV estimator sum of squared increments.
struct DriverPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;       // B_0..B_N, B_0 = 0
  std::vector<double> vol_record;   // mu_0..mu_{N-1}
  std::vector<double> qv_pathwise;  // starts at 0, cumulative (dB)^2
  PathProvenance provenance;
  std::string branch_tag;  // component label when sampled under a Mixture
};

struct VolSample {
  std::vector<double> mu;
  std::string branch_tag;
};

// Draws one per-step variance-rate sequence. Mixture specs flip the coin on
// the "mixture_branch" child stream and delegate to the chosen component on
// the "mixture_component" child stream, so a mixture draw tagged "left"
// reproduces the left component's draw bit for bit.
VolSample sample_vol_path(const VolatilitySpec& spec, const TimeGrid& grid,
                          RngStream stream);

// Samples a full driver path: mu from the "vol" child stream, increments
// dB_k = sqrt(mu_k dt) Z_k with standard normals from the "gauss" child
// stream.
DriverPath sample_driver(const VolatilitySpec& spec,
                         std::shared_ptr<const TimeGrid> grid,
                         RngStream stream, PathProvenance provenance = {});

// The fair mixture of two specs, the simulation analogue of the measure
// (P+Q)/2.
VolatilitySpec average_measure(const VolatilitySpec& p,
                               const VolatilitySpec& q);

// count paths under one family member, path i drawn from the stream derived
// from (master_seed, member.id, i). Parallel over paths; the serial variant
// is the reference the parallel one must match bitwise.
std::vector<DriverPath> sample_batch(const Member& member,
                                     std::shared_ptr<const TimeGrid> grid,
                                     std::size_t count,
                                     std::uint64_t master_seed,
                                     int threads = 0);
std::vector<DriverPath> sample_batch_serial(const Member& member,
                                            std::shared_ptr<const TimeGrid> grid,
                                            std::size_t count,
                                            std::uint64_t master_seed);

}  // namespace gsde
