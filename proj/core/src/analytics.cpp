#include "stcmac/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "stcmac/error.hpp"
#include "stcmac/geometry.hpp"
#include "stcmac/parallel.hpp"

namespace stcmac {
namespace {

std::function<double(double)> weight_function(const ScenarioConfig& cfg, WeightingMode mode) {
  const Coverage cov = cfg.coverage;
  if (mode == WeightingMode::Radial) return [cov](double l) { return radial_pdf(cov, l); };
  if (cov.shape() == Shape::Disk) return [R = cov.radius()](double l) { return link_pdf_disk(l, R); };
  return [R = cov.radius(), a = cov.alpha()](double l) { return link_pdf_ellipse(l, R, a); };
}

// Conditional expectation over D_k of area(l) / A under the chosen weighting.
class SegmentAverager {
 public:
  SegmentAverager(const ScenarioConfig& cfg, const Segment& seg, const AnalyticOptions& opts)
      : cfg_(cfg), seg_(seg), opts_(opts), weight_(weight_function(cfg, opts.weighting)) {
    for (double x : area_kinks(cfg)) {
      if (x > seg.range.lo && x < seg.range.hi) splits_.push_back(x);
    }
    const double lo = seg.range.lo;
    const double hi = seg.range.hi;
    const double scale =
        (hi - lo) * std::max({weight_(lo), weight_(0.5 * (lo + hi)), weight_(hi), 1e-300});
    QuadratureOptions q = opts.quadrature;
    q.abs_tol *= scale;
    mass_ = integrate_piecewise(weight_, lo, hi, splits_, q);
    if (!(mass_ > 0.0)) {
      throw NumericError("segment [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] has zero weight under " + to_string(opts.weighting) + " weighting");
    }
  }

  double average(const std::function<double(double)>& area) const {
    const double inv_area = 1.0 / cfg_.coverage.area();
    QuadratureOptions q = opts_.quadrature;
    q.abs_tol *= mass_;
    const double num = integrate_piecewise([&](double l) { return weight_(l) * area(l) * inv_area; }, seg_.range.lo,
                                           seg_.range.hi, splits_, q);
    return std::clamp(num / mass_, 0.0, 1.0);
  }

 private:
  const ScenarioConfig& cfg_;
  const Segment& seg_;
  const AnalyticOptions& opts_;
  std::function<double(double)> weight_;
  std::vector<double> splits_;
  double mass_ = 0.0;
};

bool overlapping_irs(const ScenarioConfig& cfg) { return cfg.slot_length() <= 2.0 * cfg.packet_duration; }

}  // namespace

const char* to_string(WeightingMode mode) noexcept { return mode == WeightingMode::LinkPdf ? "link" : "radial"; }

std::optional<WeightingMode> parse_weighting(std::string_view text) {
  if (text == "link") return WeightingMode::LinkPdf;
  if (text == "radial") return WeightingMode::Radial;
  return std::nullopt;
}

double transmit_prob(double lambda, double t_slot) { return -std::expm1(-lambda * t_slot); }

double segment_prob(const Segment& seg, const ScenarioConfig& cfg) {
  return annulus_area(cfg.coverage, seg.range.lo, seg.range.hi) / cfg.coverage.area();
}

SlotProbabilities prob_in_irs(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts) {
  SlotProbabilities out;
  const SegmentAverager avg(cfg, seg, opts);
  for (int dm : seg.slots) {
    const double p = avg.average([&](double l) { return ir_area(l, dm, cfg); });
    out.per_offset[dm] = p;
    out.total += p;
  }
  return out;
}

SlotProbabilities prob_in_dirs(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts) {
  SlotProbabilities out;
  if (!overlapping_irs(cfg)) return out;
  const SegmentAverager avg(cfg, seg, opts);
  for (int dm : seg.slots) {
    if (!std::binary_search(seg.slots.begin(), seg.slots.end(), dm + 1)) continue;
    const double p = avg.average([&](double l) { return dir_area(l, dm, cfg); });
    out.per_offset[dm] = p;
    out.total += p;
  }
  return out;
}

double conditional_success(double P_z, double P_o, double p_t, int num_nodes, bool overlapping) {
  if (num_nodes <= 1) return 1.0;
  const double n = num_nodes - 1.0;
  if (!overlapping) return std::pow(std::max(0.0, 1.0 - p_t * P_z), n);
  const double quiet = 1.0 - p_t;
  return std::pow(quiet * (1.0 - P_o + quiet * P_o), n);
}

double success_prob_segment(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts) {
  const double p_t = transmit_prob(cfg.arrival_rate, cfg.slot_length());
  if (overlapping_irs(cfg)) {
    return conditional_success(0.0, prob_in_dirs(seg, cfg, opts).total, p_t, cfg.num_nodes, true);
  }
  return conditional_success(prob_in_irs(seg, cfg, opts).total, 0.0, p_t, cfg.num_nodes, false);
}

AnalyticResult analyze(const ScenarioConfig& cfg, const AnalyticOptions& opts) {
  validate(cfg);
  AnalyticResult out;
  out.scenario = cfg;
  out.weighting = opts.weighting;
  out.slot_length = cfg.slot_length();
  out.overlapping = overlapping_irs(cfg);
  out.p_t = transmit_prob(cfg.arrival_rate, out.slot_length);

  const Segmentation seg = segments(cfg);
  out.max_offset = seg.max_offset;
  for (const Segment& s : seg.segments) {
    SegmentProbabilities row;
    row.range = s.range;
    row.slots = s.slots;
    row.P_k = segment_prob(s, cfg);
    auto irs = prob_in_irs(s, cfg, opts);
    row.p_z = std::move(irs.per_offset);
    row.P_z = irs.total;
    auto dirs = prob_in_dirs(s, cfg, opts);
    row.p_o = std::move(dirs.per_offset);
    row.P_o = dirs.total;
    row.P_s = conditional_success(row.P_z, row.P_o, out.p_t, cfg.num_nodes, out.overlapping);
    out.P_s += row.P_k * row.P_s;
    out.segments.push_back(std::move(row));
  }
  out.throughput = cfg.num_nodes * cfg.arrival_rate * cfg.packet_duration * out.P_s;
  return out;
}

double success_prob(const ScenarioConfig& cfg, const AnalyticOptions& opts) { return analyze(cfg, opts).P_s; }

double throughput(const ScenarioConfig& cfg, const AnalyticOptions& opts) { return analyze(cfg, opts).throughput; }

double psi(const ScenarioConfig& cfg, double guard, const AnalyticOptions& opts) {
  const double tf = cfg.packet_duration;
  ScenarioConfig at = cfg;
  at.guard_coefficient = guard / cfg.tau();
  validate(at);
  double overlap = 0.0;
  for (const Segment& s : segments(at).segments) {
    overlap += segment_prob(s, at) * prob_in_dirs(s, at, opts).total;
  }
  return (tf - guard) / (tf + guard) - overlap;
}

const char* to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::Beta:
      return "beta";
    case SweepParam::PacketDuration:
      return "tf";
    case SweepParam::Nodes:
      return "n";
    case SweepParam::ArrivalRate:
      return "lambda";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view text) {
  if (text == "beta") return SweepParam::Beta;
  if (text == "tf" || text == "t_f") return SweepParam::PacketDuration;
  if (text == "n" || text == "N" || text == "n_nodes") return SweepParam::Nodes;
  if (text == "lambda") return SweepParam::ArrivalRate;
  return std::nullopt;
}

ScenarioConfig with_param(ScenarioConfig cfg, SweepParam param, double value) {
  switch (param) {
    case SweepParam::Beta:
      cfg.guard_coefficient = value;
      break;
    case SweepParam::PacketDuration:
      cfg.packet_duration = value;
      break;
    case SweepParam::Nodes:
      if (value != std::round(value)) throw ConfigError("n_nodes", "sweep value " + std::to_string(value) + " is not an integer");
      cfg.num_nodes = static_cast<int>(value);
      break;
    case SweepParam::ArrivalRate:
      cfg.arrival_rate = value;
      break;
  }
  validate(cfg);
  return cfg;
}

std::vector<double> linear_grid(double from, double to, std::size_t steps) {
  if (steps == 0) throw ConfigError("steps", "must be >= 1");
  if (!std::isfinite(from) || !std::isfinite(to)) throw ConfigError("from/to", "must be finite");
  if (steps == 1) return {from};
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  out.back() = to;
  return out;
}

SweepResult sweep(const ScenarioConfig& cfg, SweepParam param, std::span<const double> grid,
                  const AnalyticOptions& opts, unsigned threads) {
  if (grid.empty()) throw ConfigError("grid", "sweep grid is empty");
  std::vector<ScenarioConfig> configs;
  configs.reserve(grid.size());
  for (double value : grid) configs.push_back(with_param(cfg, param, value));

  SweepResult out;
  out.param = param;
  out.points.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const AnalyticResult r = analyze(configs[i], opts);
    out.points[i] = {grid[i], r.P_s, r.throughput};
  });
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i].P_s > out.points[out.argmax_ps].P_s) out.argmax_ps = i;
    if (out.points[i].throughput > out.points[out.argmax_throughput].throughput) out.argmax_throughput = i;
  }
  return out;
}

GuardOptimum maximize_guard(const ScenarioConfig& cfg, const AnalyticOptions& opts, std::size_t grid_points) {
  validate(cfg);
  const double tf = cfg.packet_duration;
  const double tau = cfg.tau();
  auto eval = [&](double guard) {
    ScenarioConfig c = cfg;
    c.guard_coefficient = guard / tau;
    return success_prob(c, opts);
  };

  const std::vector<double> grid = linear_grid(0.0, tf, std::max<std::size_t>(grid_points, 3));
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = eval(grid[i]);
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());

  GuardOptimum out;
  out.endpoint_P_s = values.front();
  out.guard_interval = grid[best];
  out.P_s = values[best];

  // Golden-section search on the bracket around the best grid point.
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > 1e-4 * tf) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  for (auto [g, f] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (f > out.P_s) {
      out.P_s = f;
      out.guard_interval = g;
    }
  }
  out.guard_coefficient = out.guard_interval / tau;
  out.throughput = cfg.num_nodes * cfg.arrival_rate * tf * out.P_s;
  return out;
}

}  // namespace stcmac
