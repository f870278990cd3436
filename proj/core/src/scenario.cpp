#include "stcmac/scenario.hpp"

#include <cmath>

#include "stcmac/error.hpp"

namespace stcmac {

void validate(const ScenarioConfig& cfg) {
  auto finite_positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!finite_positive(cfg.packet_duration)) throw ConfigError("t_f", "packet duration must be positive");
  if (!std::isfinite(cfg.guard_coefficient) || cfg.guard_coefficient < 0.0) {
    throw ConfigError("beta", "guard coefficient must be >= 0");
  }
  if (!finite_positive(cfg.sound_speed)) throw ConfigError("v", "propagation speed must be positive");
  if (!std::isfinite(cfg.arrival_rate) || cfg.arrival_rate < 0.0) {
    throw ConfigError("lambda", "arrival rate must be >= 0");
  }
  if (cfg.num_nodes < 1) throw ConfigError("n_nodes", "need at least one node");
  if (cfg.coverage.shape() == Shape::Disk && cfg.coverage.alpha() != 1.0) {
    throw ConfigError("alpha", "disk coverage requires alpha = 1");
  }
}

}  // namespace stcmac
