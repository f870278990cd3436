#pragma once

#include <random>

#include "stcmac/scenario.hpp"

namespace testing_support {

// Normalized units: v = 1, R = 1, so tau = 1.
inline stcmac::ScenarioConfig normalized(double t_f, double beta, double lambda = 0.5, int n = 2,
                                         double alpha = 1.0) {
  stcmac::ScenarioConfig cfg;
  cfg.sound_speed = 1.0;
  cfg.coverage = alpha == 1.0 ? stcmac::Coverage::disk(1.0) : stcmac::Coverage::ellipse(1.0, alpha);
  cfg.packet_duration = t_f;
  cfg.guard_coefficient = beta;
  cfg.arrival_rate = lambda;
  cfg.num_nodes = n;
  return cfg;
}

inline stcmac::ScenarioConfig table2() { return normalized(0.1, 0.4); }
inline stcmac::ScenarioConfig table3() { return normalized(0.7, 0.4); }

// SI-unit scenario with the physical defaults (v = R = 1500).
inline stcmac::ScenarioConfig physical(double t_f, double beta, double lambda, int n, double alpha = 1.0) {
  stcmac::ScenarioConfig cfg;
  cfg.coverage = alpha == 1.0 ? stcmac::Coverage::disk(1500.0) : stcmac::Coverage::ellipse(1500.0, alpha);
  cfg.packet_duration = t_f;
  cfg.guard_coefficient = beta;
  cfg.arrival_rate = lambda;
  cfg.num_nodes = n;
  return cfg;
}

// Random valid scenario: R, v, alpha, t_f and beta spread over several
// orders of magnitude of M and both IR cases.
struct ScenarioGen {
  std::mt19937_64 rng;
  explicit ScenarioGen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  stcmac::ScenarioConfig operator()() {
    stcmac::ScenarioConfig cfg;
    const double R = uniform(0.5, 3000.0);
    cfg.sound_speed = uniform(0.5, 2000.0);
    const double tau = R / cfg.sound_speed;
    const bool ellipse = uniform(0.0, 1.0) < 0.5;
    cfg.coverage = ellipse ? stcmac::Coverage::ellipse(R, uniform(1.0, 2.5)) : stcmac::Coverage::disk(R);
    cfg.packet_duration = tau * uniform(0.02, 1.5);
    cfg.guard_coefficient = uniform(0.0, 1.0) < 0.1 ? 0.0 : uniform(0.0, 2.0);
    cfg.arrival_rate = uniform(0.0, 2.0) / tau;
    cfg.num_nodes = integer(1, 20);
    return cfg;
  }
};

}  // namespace testing_support
