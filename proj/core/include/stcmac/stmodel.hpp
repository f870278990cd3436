#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stcmac/scenario.hpp"

namespace stcmac {

// Space-time collision geometry around the sink.
//
// A tagged node at sink distance d_i sends in slot 0. Another node at distance
// x sending `slot_offset` (dm) slots earlier collides with it iff
//   |dm * t_slot + (d_i - x) / v| < t_f,
// i.e. iff x lies in the interference region (IR) of offset dm:
//   (d_i + v (dm t_slot - t_f), d_i + v (dm t_slot + t_f)) clipped to [0, alpha R].
// Equality is non-colliding.

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class IrShape { Empty, Circle, Annulus, FullCover };

const char* to_string(IrShape shape) noexcept;

double slot_length(const ScenarioConfig& cfg);

// Symmetric. Uses the slot difference so large slot indices lose no precision.
bool collides(const Transmission& a, const Transmission& b, const ScenarioConfig& cfg);

// True iff a node at distance x sending slot_offset slots before the tagged
// node (at d_i) collides with it. Same predicate as collides().
bool interferes(double d_i, double x, int slot_offset, const ScenarioConfig& cfg);

/// Largest slot offset that can still collide: ceil((tau_max + t_f) / t_slot) - 1,
/// where tau_max is the coverage's maximum propagation delay.
int max_interference_slots(const ScenarioConfig& cfg);

/// IR of `slot_offset` for a sender at d_i, or nullopt when it misses the coverage.
std::optional<Interval> ir_interval(double d_i, int slot_offset, const ScenarioConfig& cfg);

IrShape classify_ir(const std::optional<Interval>& interval, const Coverage& cov);

/// Sender distances at which some IR endpoint crosses 0 or alpha R, plus the
/// coverage ends. Sorted and deduplicated.
std::vector<double> segment_breakpoints(const ScenarioConfig& cfg);

struct Segment {
  Interval range;          // D_k, closed-open except the last
  std::vector<int> slots;  // C_k, ascending
};

struct Segmentation {
  int max_offset = 0;  // M
  std::vector<double> breakpoints;
  std::vector<Segment> segments;

  std::size_t size() const noexcept { return segments.size(); }
  // Index of the segment containing d (clamped to the coverage).
  std::size_t locate(double d) const;
};

Segmentation segments(const ScenarioConfig& cfg);

/// Distances in [0, alpha R] from which no slot offset collides with a sender at d_i.
std::vector<Interval> cfr_set(double d_i, const ScenarioConfig& cfg);

/// Overlap of the IRs of `slot_offset` and `slot_offset + 1`.
struct DirEntry {
  int slot_offset = 0;
  std::optional<Interval> interval;
};

/// One entry per consecutive pair (dm, dm + 1) with -M <= dm < M.
std::vector<DirEntry> dir_intervals(double d_i, const ScenarioConfig& cfg);

/// Coverage area of the IR (S1) / DIR (S2); zero when empty.
double ir_area(double d_i, int slot_offset, const ScenarioConfig& cfg);
double dir_area(double d_i, int slot_offset, const ScenarioConfig& cfg);

struct RegionReport {
  struct Ir {
    int slot_offset;
    Interval interval;
    IrShape shape;
    double area;
  };
  struct Dir {
    int slot_offset;  // overlap of slot_offset and slot_offset + 1
    std::optional<Interval> interval;
    double area;
  };

  double d_i = 0.0;
  std::vector<Ir> irs;
  std::vector<Dir> dirs;
  std::vector<Interval> cfr;
  double cfr_area = 0.0;
};

RegionReport region_report(double d_i, const ScenarioConfig& cfg);

/// Sender distances where an IR endpoint crosses 0, R or alpha R. The area
/// integrands of the analytic model are smooth between consecutive points.
std::vector<double> area_kinks(const ScenarioConfig& cfg);

}  // namespace stcmac
