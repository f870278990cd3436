#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stcmac/quadrature.hpp"
#include "stcmac/scenario.hpp"
#include "stcmac/stmodel.hpp"

namespace stcmac {

// How a sender's distance is weighted inside a segment when averaging IR/DIR
// areas. LinkPdf uses the link-distance density of the coverage shape (disk
// or ellipse closed form); Radial uses the exact sink-distance density of a
// uniformly placed node.
enum class WeightingMode { LinkPdf, Radial };

const char* to_string(WeightingMode mode) noexcept;
std::optional<WeightingMode> parse_weighting(std::string_view text);

struct AnalyticOptions {
  WeightingMode weighting = WeightingMode::LinkPdf;
  QuadratureOptions quadrature{};
};

struct SegmentProbabilities {
  Interval range;
  std::vector<int> slots;    // C_k
  double P_k = 0.0;          // sender falls in D_k
  std::map<int, double> p_z;  // offset -> P(interferer in IR of that offset)
  double P_z = 0.0;
  std::map<int, double> p_o;  // dm -> P(interferer in DIR of dm and dm + 1)
  double P_o = 0.0;
  double P_s = 0.0;  // success probability given the sender is in D_k
};

struct AnalyticResult {
  ScenarioConfig scenario;
  WeightingMode weighting = WeightingMode::LinkPdf;
  int max_offset = 0;
  double slot_length = 0.0;
  bool overlapping = false;  // t_slot <= 2 t_f: adjacent IRs overlap
  double p_t = 0.0;
  std::vector<SegmentProbabilities> segments;
  double P_s = 0.0;
  double throughput = 0.0;
};

/// Probability that a Poisson(lambda) source has at least one arrival in a slot.
double transmit_prob(double lambda, double t_slot);

/// Share of the coverage area covered by sender distances in `seg`.
double segment_prob(const Segment& seg, const ScenarioConfig& cfg);

struct SlotProbabilities {
  std::map<int, double> per_offset;
  double total = 0.0;
};

SlotProbabilities prob_in_irs(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts = {});
SlotProbabilities prob_in_dirs(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts = {});

/// Non-collision probability of a sender with N - 1 interferers.
///
/// Without overlap (t_slot > 2 t_f) an interferer must be silent in the one
/// slot whose IR holds it: (1 - p_t P_z)^(N-1). With overlap, interferers in a
/// DIR must be silent for two slots:
/// ((1 - p_t)(1 - P_o + (1 - p_t) P_o))^(N-1).
double conditional_success(double P_z, double P_o, double p_t, int num_nodes, bool overlapping);

double success_prob_segment(const Segment& seg, const ScenarioConfig& cfg, const AnalyticOptions& opts = {});

AnalyticResult analyze(const ScenarioConfig& cfg, const AnalyticOptions& opts = {});
double success_prob(const ScenarioConfig& cfg, const AnalyticOptions& opts = {});
/// N * lambda * t_f * P_s, normalized by the packet duration.
double throughput(const ScenarioConfig& cfg, const AnalyticOptions& opts = {});

/// (t_f - a)/(t_f + a) - sum_k P_k P_o,k evaluated with guard interval a.
/// Positive means a guard of a beats a guard of t_f.
double psi(const ScenarioConfig& cfg, double guard, const AnalyticOptions& opts = {});

enum class SweepParam { Beta, PacketDuration, Nodes, ArrivalRate };

const char* to_string(SweepParam p) noexcept;
std::optional<SweepParam> parse_sweep_param(std::string_view text);

// Copy of cfg with one parameter replaced. Throws ConfigError on invalid values.
ScenarioConfig with_param(ScenarioConfig cfg, SweepParam param, double value);

std::vector<double> linear_grid(double from, double to, std::size_t steps);

struct SweepPoint {
  double value = 0.0;
  double P_s = 0.0;
  double throughput = 0.0;
};

struct SweepResult {
  SweepParam param = SweepParam::Beta;
  std::vector<SweepPoint> points;  // grid order
  std::size_t argmax_ps = 0;
  std::size_t argmax_throughput = 0;
};

SweepResult sweep(const ScenarioConfig& cfg, SweepParam param, std::span<const double> grid,
                  const AnalyticOptions& opts = {}, unsigned threads = 0);

struct GuardOptimum {
  double guard_interval = 0.0;  // beta * tau
  double guard_coefficient = 0.0;
  double P_s = 0.0;
  double throughput = 0.0;
  double endpoint_P_s = 0.0;  // P_s at beta = 0 (equal to beta tau = t_f)
};

// Best guard interval in [0, t_f]: grid scan followed by golden-section
// refinement (tolerance 1e-4 t_f) around the best grid point.
GuardOptimum maximize_guard(const ScenarioConfig& cfg, const AnalyticOptions& opts = {}, std::size_t grid_points = 41);

}  // namespace stcmac
