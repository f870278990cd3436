#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stcmac/scenario.hpp"

namespace stcmac {

// Gated: a node sends in slot m iff at least one packet arrived during slot
// m - 1 (extra arrivals coalesce). Queued: FIFO buffer, one packet per slot
// while the backlog is non-empty.
enum class QueueMode { Gated, Queued };

const char* to_string(QueueMode mode) noexcept;

struct SimConfig {
  ScenarioConfig scenario;
  std::uint64_t num_slots = 100000;
  std::uint64_t warmup_slots = 100;
  QueueMode queue = QueueMode::Gated;
  std::uint64_t replications = 1;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

void validate(const SimConfig& sim);

struct ReplicationResult {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
};

struct SimResult {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double P_s = 1.0;  // successes / attempts; 1 when nothing was sent
  double P_s_se = 0.0;
  double P_s_ci = 0.0;          // 95% half-width (Student-t over replications)
  double observed_time = 0.0;   // counted slots * t_slot, summed over replications
  double throughput_measured = 0.0;  // successes * t_f / observed_time
  double throughput_model = 0.0;     // N * lambda * t_f * P_s
  std::vector<ReplicationResult> replications;
};

/// Every transmission of one replication, sorted by (slot, node).
///
/// Nodes are placed once; Poisson arrivals run over continuous time up to
/// num_slots + M slots so that the last counted slots still see later
/// interferers.
std::vector<Transmission> generate_trace(const SimConfig& sim, std::uint64_t replication);

/// Success flag per transmission of a slot-sorted trace. Only neighbours with
/// |slot offset| <= M are examined.
std::vector<bool> resolve_collisions(std::span<const Transmission> trace, const ScenarioConfig& cfg);

ReplicationResult run_replication(const SimConfig& sim, std::uint64_t replication);

SimResult run(const SimConfig& sim);

}  // namespace stcmac
