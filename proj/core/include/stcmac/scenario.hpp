#pragma once

#include <cstdint>

#include "stcmac/geometry.hpp"

namespace stcmac {

/// Physical and protocol parameters of one slotted network around a sink.
///
/// Times are in seconds, lengths in metres. Normalized units (tau = 1, R = 1)
/// are obtained with sound_speed = 1 and a unit-radius coverage.
struct ScenarioConfig {
  double packet_duration = 1.0;    // t_f
  double guard_coefficient = 0.0;  // beta; the guard interval is beta * tau
  double sound_speed = 1500.0;     // v
  Coverage coverage = Coverage::disk(1500.0);
  double arrival_rate = 0.0;  // lambda, Poisson packets/s per node
  int num_nodes = 1;          // N

  /// Horizontal maximum propagation delay R / v.
  double tau() const noexcept { return coverage.radius() / sound_speed; }
  /// Maximum propagation delay over the whole coverage, alpha R / v.
  double max_delay() const noexcept { return coverage.max_range() / sound_speed; }
  double guard_interval() const noexcept { return guard_coefficient * tau(); }
  double slot_length() const noexcept { return packet_duration + guard_interval(); }
};

// Throws ConfigError naming the first invalid field.
void validate(const ScenarioConfig& cfg);

/// A packet sent by `node_id` at the start of slot `slot_index` from `distance`
/// metres away from the sink.
struct Transmission {
  int node_id = 0;
  std::int64_t slot_index = 0;
  double distance = 0.0;

  double send_time(double slot_length) const noexcept { return static_cast<double>(slot_index) * slot_length; }
};

}  // namespace stcmac
