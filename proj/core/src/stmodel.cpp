#include "stcmac/stmodel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stcmac {
namespace {

// Relative width (w.r.t. alpha R) below which an overlap or gap counts as touching.
constexpr double kTouch = 1e-12;

double checked_distance(double d, const ScenarioConfig& cfg) {
  const double hi = cfg.coverage.max_range();
  if (!(d >= 0.0) || d > hi * (1.0 + 1e-12)) {
    throw std::domain_error("sender distance " + std::to_string(d) + " outside coverage [0, " + std::to_string(hi) +
                            "]");
  }
  return std::min(d, hi);
}

std::optional<Interval> intersect(const std::optional<Interval>& a, const std::optional<Interval>& b, double touch) {
  if (!a || !b) return std::nullopt;
  const Interval out{std::max(a->lo, b->lo), std::min(a->hi, b->hi)};
  if (out.width() <= touch) return std::nullopt;
  return out;
}

void sort_unique(std::vector<double>& xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  xs = std::move(out);
}

}  // namespace

const char* to_string(IrShape shape) noexcept {
  switch (shape) {
    case IrShape::Empty:
      return "empty";
    case IrShape::Circle:
      return "circle";
    case IrShape::Annulus:
      return "annulus";
    case IrShape::FullCover:
      return "full";
  }
  return "?";
}

double slot_length(const ScenarioConfig& cfg) { return cfg.slot_length(); }

bool collides(const Transmission& a, const Transmission& b, const ScenarioConfig& cfg) {
  const double dt = static_cast<double>(a.slot_index - b.slot_index) * cfg.slot_length();
  return std::abs(dt + (a.distance - b.distance) / cfg.sound_speed) < cfg.packet_duration;
}

bool interferes(double d_i, double x, int slot_offset, const ScenarioConfig& cfg) {
  return std::abs(slot_offset * cfg.slot_length() + (d_i - x) / cfg.sound_speed) < cfg.packet_duration;
}

int max_interference_slots(const ScenarioConfig& cfg) {
  const double span = (cfg.max_delay() + cfg.packet_duration) / cfg.slot_length();
  // The small shift keeps exact ratios (e.g. beta = 1 on a disk) from rounding up.
  return std::max(0, static_cast<int>(std::ceil(span - 1e-12)) - 1);
}

std::optional<Interval> ir_interval(double d_i, int slot_offset, const ScenarioConfig& cfg) {
  d_i = checked_distance(d_i, cfg);
  const double v = cfg.sound_speed;
  const double shift = slot_offset * cfg.slot_length();
  const double lo = std::max(0.0, d_i + v * (shift - cfg.packet_duration));
  const double hi = std::min(cfg.coverage.max_range(), d_i + v * (shift + cfg.packet_duration));
  if (!(hi > lo)) return std::nullopt;
  return Interval{lo, hi};
}

IrShape classify_ir(const std::optional<Interval>& interval, const Coverage& cov) {
  if (!interval) return IrShape::Empty;
  if (interval->lo <= 0.0) return interval->hi >= cov.max_range() ? IrShape::FullCover : IrShape::Circle;
  return IrShape::Annulus;
}

std::vector<double> segment_breakpoints(const ScenarioConfig& cfg) {
  const double range = cfg.coverage.max_range();
  const double v = cfg.sound_speed;
  const double ts = cfg.slot_length();
  const double tf = cfg.packet_duration;
  const int M = max_interference_slots(cfg);
  const double tol = kTouch * range;

  std::vector<double> pts{0.0, range};
  for (int dm = -M; dm <= M; ++dm) {
    for (double sign : {-1.0, 1.0}) {
      // An IR endpoint d + v (dm t_slot + sign t_f) crosses 0 or alpha R.
      for (double edge : {0.0, range}) {
        const double d = edge - v * (dm * ts + sign * tf);
        if (d > tol && d < range - tol) pts.push_back(d);
      }
    }
  }
  sort_unique(pts, tol);
  pts.front() = 0.0;
  pts.back() = range;
  return pts;
}

std::size_t Segmentation::locate(double d) const {
  if (segments.empty()) throw std::logic_error("empty segmentation");
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), d);
  const auto idx = static_cast<std::ptrdiff_t>(it - breakpoints.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(segments.size()) - 1));
}

Segmentation segments(const ScenarioConfig& cfg) {
  Segmentation out;
  out.max_offset = max_interference_slots(cfg);
  out.breakpoints = segment_breakpoints(cfg);
  for (std::size_t k = 0; k + 1 < out.breakpoints.size(); ++k) {
    Segment seg{{out.breakpoints[k], out.breakpoints[k + 1]}, {}};
    const double mid = 0.5 * (seg.range.lo + seg.range.hi);
    for (int dm = -out.max_offset; dm <= out.max_offset; ++dm) {
      if (ir_interval(mid, dm, cfg)) seg.slots.push_back(dm);
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

std::vector<Interval> cfr_set(double d_i, const ScenarioConfig& cfg) {
  const double range = cfg.coverage.max_range();
  const int M = max_interference_slots(cfg);

  // IRs move outwards monotonically with the offset, so they are already sorted by lo.
  std::vector<Interval> irs;
  for (int dm = -M; dm <= M; ++dm) {
    if (auto ir = ir_interval(d_i, dm, cfg)) irs.push_back(*ir);
  }

  std::vector<Interval> gaps;
  double cursor = 0.0;
  for (const Interval& ir : irs) {
    if (ir.lo - cursor > kTouch * range) gaps.push_back({cursor, ir.lo});
    cursor = std::max(cursor, ir.hi);
  }
  if (range - cursor > kTouch * range) gaps.push_back({cursor, range});
  return gaps;
}

std::vector<DirEntry> dir_intervals(double d_i, const ScenarioConfig& cfg) {
  const int M = max_interference_slots(cfg);
  const double touch = kTouch * cfg.coverage.max_range();
  std::vector<DirEntry> out;
  for (int dm = -M; dm < M; ++dm) {
    out.push_back({dm, intersect(ir_interval(d_i, dm, cfg), ir_interval(d_i, dm + 1, cfg), touch)});
  }
#ifndef NDEBUG
  for (int dm = -M; dm + 2 <= M; ++dm) {
    assert(!intersect(ir_interval(d_i, dm, cfg), ir_interval(d_i, dm + 2, cfg), touch));
  }
#endif
  return out;
}

double ir_area(double d_i, int slot_offset, const ScenarioConfig& cfg) {
  const auto ir = ir_interval(d_i, slot_offset, cfg);
  return ir ? annulus_area(cfg.coverage, ir->lo, ir->hi) : 0.0;
}

double dir_area(double d_i, int slot_offset, const ScenarioConfig& cfg) {
  const auto dir = intersect(ir_interval(d_i, slot_offset, cfg), ir_interval(d_i, slot_offset + 1, cfg),
                             kTouch * cfg.coverage.max_range());
  return dir ? annulus_area(cfg.coverage, dir->lo, dir->hi) : 0.0;
}

RegionReport region_report(double d_i, const ScenarioConfig& cfg) {
  RegionReport report;
  report.d_i = d_i;
  const int M = max_interference_slots(cfg);
  for (int dm = -M; dm <= M; ++dm) {
    const auto ir = ir_interval(d_i, dm, cfg);
    if (!ir) continue;
    report.irs.push_back({dm, *ir, classify_ir(ir, cfg.coverage), annulus_area(cfg.coverage, ir->lo, ir->hi)});
  }
  for (const DirEntry& e : dir_intervals(d_i, cfg)) {
    const double area = e.interval ? annulus_area(cfg.coverage, e.interval->lo, e.interval->hi) : 0.0;
    report.dirs.push_back({e.slot_offset, e.interval, area});
  }
  report.cfr = cfr_set(d_i, cfg);
  for (const Interval& gap : report.cfr) report.cfr_area += annulus_area(cfg.coverage, gap.lo, gap.hi);
  return report;
}

std::vector<double> area_kinks(const ScenarioConfig& cfg) {
  const double range = cfg.coverage.max_range();
  const double R = cfg.coverage.radius();
  const double v = cfg.sound_speed;
  const double ts = cfg.slot_length();
  const double tf = cfg.packet_duration;
  const int M = max_interference_slots(cfg);

  std::vector<double> pts;
  if (cfg.coverage.shape() == Shape::Ellipse) pts.push_back(R);
  for (int dm = -M; dm <= M; ++dm) {
    for (double sign : {-1.0, 1.0}) {
      for (double edge : {0.0, R, range}) {
        const double d = edge - v * (dm * ts + sign * tf);
        if (d > 0.0 && d < range) pts.push_back(d);
      }
    }
  }
  sort_unique(pts, kTouch * range);
  return pts;
}

}  // namespace stcmac
