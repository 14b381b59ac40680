#include "gsde/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "gsde/errors.hpp"
#include "gsde/format.hpp"
#include "gsde/parallel.hpp"

namespace gsde {

namespace {

void require_rate(double v, const char* what) {
  GSDE_REQUIRE(ConstructionError, std::isfinite(v) && v > 0.0,
               std::string(what) + " must be a finite positive variance rate");
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace

VolatilitySpec VolatilitySpec::constant(double variance_rate) {
  require_rate(variance_rate, "Constant value");
  VolatilitySpec s;
  s.kind_ = Kind::Constant;
  s.values_ = {variance_rate};
  s.bounds_ = {variance_rate, variance_rate};
  return s;
}

VolatilitySpec VolatilitySpec::piecewise(std::vector<double> breakpoints,
                                         std::vector<double> values) {
  GSDE_REQUIRE(ConstructionError, !values.empty(),
               "PiecewiseConstant needs at least one value");
  GSDE_REQUIRE(ConstructionError, breakpoints.size() + 1 == values.size(),
               "PiecewiseConstant needs exactly one more value than breakpoints");
  for (double v : values) require_rate(v, "PiecewiseConstant value");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    GSDE_REQUIRE(ConstructionError,
                 std::isfinite(breakpoints[i]) && breakpoints[i] > 0.0,
                 "PiecewiseConstant breakpoints must be positive times");
    if (i > 0)
      GSDE_REQUIRE(ConstructionError, breakpoints[i] > breakpoints[i - 1],
                   "PiecewiseConstant breakpoints must be strictly increasing");
  }
  VolatilitySpec s;
  s.kind_ = Kind::PiecewiseConstant;
  s.breakpoints_ = std::move(breakpoints);
  s.values_ = std::move(values);
  s.bounds_ = {*std::min_element(s.values_.begin(), s.values_.end()),
               *std::max_element(s.values_.begin(), s.values_.end())};
  return s;
}

VolatilitySpec VolatilitySpec::regime_switching(std::vector<double> states,
                                                double switch_prob) {
  GSDE_REQUIRE(ConstructionError, !states.empty(),
               "RegimeSwitching needs at least one state");
  for (double v : states) require_rate(v, "RegimeSwitching state");
  GSDE_REQUIRE(ConstructionError,
               std::isfinite(switch_prob) && switch_prob >= 0.0 && switch_prob <= 1.0,
               "RegimeSwitching switch_prob must lie in [0,1]");
  VolatilitySpec s;
  s.kind_ = Kind::RegimeSwitching;
  s.values_ = std::move(states);
  s.prob_ = switch_prob;
  s.bounds_ = {*std::min_element(s.values_.begin(), s.values_.end()),
               *std::max_element(s.values_.begin(), s.values_.end())};
  return s;
}

VolatilitySpec VolatilitySpec::mixture(VolatilitySpec left, VolatilitySpec right,
                                       double weight) {
  GSDE_REQUIRE(ConstructionError,
               std::isfinite(weight) && weight >= 0.0 && weight <= 1.0,
               "Mixture weight must lie in [0,1]");
  VolatilitySpec s;
  s.kind_ = Kind::Mixture;
  s.bounds_ = {std::min(left.bounds_.lower, right.bounds_.lower),
               std::max(left.bounds_.upper, right.bounds_.upper)};
  s.prob_ = weight;
  s.left_ = std::make_shared<const VolatilitySpec>(std::move(left));
  s.right_ = std::make_shared<const VolatilitySpec>(std::move(right));
  return s;
}

double VolatilitySpec::constant_value() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::Constant, "spec is not Constant");
  return values_[0];
}

const std::vector<double>& VolatilitySpec::breakpoints() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::PiecewiseConstant,
               "spec is not PiecewiseConstant");
  return breakpoints_;
}

const std::vector<double>& VolatilitySpec::piece_values() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::PiecewiseConstant,
               "spec is not PiecewiseConstant");
  return values_;
}

const std::vector<double>& VolatilitySpec::states() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::RegimeSwitching,
               "spec is not RegimeSwitching");
  return values_;
}

double VolatilitySpec::switch_prob() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::RegimeSwitching,
               "spec is not RegimeSwitching");
  return prob_;
}

const VolatilitySpec& VolatilitySpec::left() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::Mixture, "spec is not Mixture");
  return *left_;
}

const VolatilitySpec& VolatilitySpec::right() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::Mixture, "spec is not Mixture");
  return *right_;
}

double VolatilitySpec::weight() const {
  GSDE_REQUIRE(GsdeError, kind_ == Kind::Mixture, "spec is not Mixture");
  return prob_;
}

std::string VolatilitySpec::describe() const {
  switch (kind_) {
    case Kind::Constant:
      return "Constant(" + format_double(values_[0]) + ")";
    case Kind::PiecewiseConstant:
      return "PiecewiseConstant(breakpoints=[" + join_doubles(breakpoints_) +
             "],values=[" + join_doubles(values_) + "])";
    case Kind::RegimeSwitching:
      return "RegimeSwitching(states=[" + join_doubles(values_) +
             "],switch_prob=" + format_double(prob_) + ")";
    case Kind::Mixture:
      return "Mixture(" + left_->describe() + "," + right_->describe() +
             ",weight=" + format_double(prob_) + ")";
  }
  return "?";
}

MeasureFamily::MeasureFamily(std::vector<Member> members)
    : members_(std::move(members)) {
  GSDE_REQUIRE(ConstructionError, !members_.empty(),
               "measure family must have at least one member");
  std::set<std::string> seen;
  for (const Member& m : members_) {
    GSDE_REQUIRE(ConstructionError, !m.id.empty(),
                 "measure family member needs a non-empty id");
    GSDE_REQUIRE(ConstructionError, seen.insert(m.id).second,
                 "duplicate measure id '" + m.id + "'");
  }
  envelope_ = members_.front().spec.bounds();
  for (const Member& m : members_) {
    envelope_.lower = std::min(envelope_.lower, m.spec.bounds().lower);
    envelope_.upper = std::max(envelope_.upper, m.spec.bounds().upper);
  }
}

const Member* MeasureFamily::find(std::string_view id) const noexcept {
  for (const Member& m : members_)
    if (m.id == id) return &m;
  return nullptr;
}

std::string PathProvenance::key() const {
  return measure_id + ":" + format_u64(seed) + ":" + format_u64(path_index);
}

VolSample sample_vol_path(const VolatilitySpec& spec, const TimeGrid& grid,
                          RngStream stream) {
  const std::size_t n = grid.step_count;
  VolSample out;
  out.mu.resize(n);
  switch (spec.kind()) {
    case VolatilitySpec::Kind::Constant:
      std::fill(out.mu.begin(), out.mu.end(), spec.constant_value());
      break;
    case VolatilitySpec::Kind::PiecewiseConstant: {
      const auto& bp = spec.breakpoints();
      const auto& vals = spec.piece_values();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t seg =
            std::upper_bound(bp.begin(), bp.end(), grid.points[k]) - bp.begin();
        out.mu[k] = vals[seg];
      }
      break;
    }
    case VolatilitySpec::Kind::RegimeSwitching: {
      const auto& st = spec.states();
      const std::size_t m = st.size();
      std::size_t cur = std::min<std::size_t>(
          m - 1, static_cast<std::size_t>(stream.next_uniform() * static_cast<double>(m)));
      out.mu[0] = st[cur];
      for (std::size_t k = 1; k < n; ++k) {
        if (m > 1 && stream.next_uniform() < spec.switch_prob()) {
          const std::size_t hop = 1 + std::min<std::size_t>(
              m - 2, static_cast<std::size_t>(stream.next_uniform() *
                                              static_cast<double>(m - 1)));
          cur = (cur + hop) % m;
        }
        out.mu[k] = st[cur];
      }
      break;
    }
    case VolatilitySpec::Kind::Mixture: {
      const bool take_left =
          stream.sub("mixture_branch").next_uniform() < spec.weight();
      const VolatilitySpec& comp = take_left ? spec.left() : spec.right();
      VolSample inner =
          sample_vol_path(comp, grid, stream.sub("mixture_component"));
      out.mu = std::move(inner.mu);
      out.branch_tag = take_left ? "left" : "right";
      if (!inner.branch_tag.empty()) out.branch_tag += "/" + inner.branch_tag;
      break;
    }
  }
  return out;
}

DriverPath sample_driver(const VolatilitySpec& spec,
                         std::shared_ptr<const TimeGrid> grid,
                         RngStream stream, PathProvenance provenance) {
  GSDE_REQUIRE(ConstructionError, grid != nullptr, "sample_driver needs a grid");
  const std::size_t n = grid->step_count;
  const double dt = grid->dt();

  VolSample vol = sample_vol_path(spec, *grid, stream.sub("vol"));
  RngStream gauss = stream.sub("gauss");

  DriverPath path;
  path.grid = std::move(grid);
  path.vol_record = std::move(vol.mu);
  path.branch_tag = std::move(vol.branch_tag);
  path.provenance = std::move(provenance);
  path.values.resize(n + 1);
  path.qv_pathwise.resize(n + 1);
  path.values[0] = 0.0;
  path.qv_pathwise[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double db = std::sqrt(path.vol_record[k] * dt) * gauss.next_normal();
    path.values[k + 1] = path.values[k] + db;
    path.qv_pathwise[k + 1] = path.qv_pathwise[k] + db * db;
  }
  return path;
}

VolatilitySpec average_measure(const VolatilitySpec& p, const VolatilitySpec& q) {
  return VolatilitySpec::mixture(p, q, 0.5);
}

std::vector<DriverPath> sample_batch(const Member& member,
                                     std::shared_ptr<const TimeGrid> grid,
                                     std::size_t count,
                                     std::uint64_t master_seed, int threads) {
  std::vector<DriverPath> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    out[i] = sample_driver(member.spec, grid,
                           RngStream::for_path(master_seed, member.id, i),
                           PathProvenance{member.id, master_seed, i});
  });
  return out;
}

std::vector<DriverPath> sample_batch_serial(const Member& member,
                                            std::shared_ptr<const TimeGrid> grid,
                                            std::size_t count,
                                            std::uint64_t master_seed) {
  std::vector<DriverPath> out(count);
  serial_for(count, [&](std::size_t i) {
    out[i] = sample_driver(member.spec, grid,
                           RngStream::for_path(master_seed, member.id, i),
                           PathProvenance{member.id, master_seed, i});
  });
  return out;
}

}  // namespace gsde
