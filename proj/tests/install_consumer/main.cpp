#include <cmath>
#include <cstdio>

#include "stcmac/analytics.hpp"

int main() {
  stcmac::ScenarioConfig cfg;
  cfg.packet_duration = 0.9;
  cfg.guard_coefficient = 0.6;
  cfg.arrival_rate = 0.1;
  cfg.num_nodes = 10;
  const double ps = stcmac::success_prob(cfg);
  std::printf("P_s = %.6f\n", ps);
  return ps > 0.0 && ps < 1.0 ? 0 : 1;
}
