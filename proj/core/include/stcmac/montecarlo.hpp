#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "stcmac/scenario.hpp"
#include "stcmac/stmodel.hpp"

namespace stcmac {

// Geometric Monte Carlo check of the per-segment probabilities.
//
// Each run drops a tagged sender and interferers uniformly into the coverage
// and gates every interferer's activity in each slot offset by an independent
// Bernoulli(p_t) draw. Runs are grouped in fixed blocks of kMcBlockSize; block
// b draws from substream derive_seed(seed, b), so results do not depend on the
// number of worker threads.

inline constexpr std::uint64_t kMcBlockSize = 4096;

enum class McMode { TableEstimate, GeneralPs };

struct McConfig {
  ScenarioConfig scenario;
  std::uint64_t runs = 100000;
  std::uint64_t seed = 1;
  McMode mode = McMode::TableEstimate;
  unsigned threads = 0;
};

void validate(const McConfig& mc);

/// Sample mean with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::uint64_t trials = 0;
};

struct McSegment {
  Interval range;
  std::vector<int> slots;
  std::uint64_t senders = 0;  // n_k
  Estimate P_k;
  // Conditional on the sender being in this segment; empty when senders == 0.
  std::map<int, Estimate> p_z;
  std::optional<Estimate> P_z;  // mean number of IRs holding the interferer
  std::map<int, Estimate> p_o;
  std::optional<Estimate> P_o;
  std::optional<Estimate> P_s;
  std::optional<Estimate> collision_free;  // interferer outside every IR
};

struct McEstimate {
  ScenarioConfig scenario;  // num_nodes forced to 2
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  int max_offset = 0;
  double p_t = 0.0;
  std::vector<McSegment> segments;
  Estimate P_s;
};

/// Two-node estimate of every table cell (N is ignored and taken as 2).
McEstimate estimate_table(const McConfig& mc);

/// Success probability of a tagged sender with N - 1 gated interferers.
Estimate estimate_success_prob(const McConfig& mc);

}  // namespace stcmac
