#include "stcmac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "stcmac/error.hpp"
#include "stcmac/geometry.hpp"
#include "stcmac/parallel.hpp"
#include "stcmac/rng.hpp"
#include "stcmac/stmodel.hpp"

namespace stcmac {

const char* to_string(QueueMode mode) noexcept { return mode == QueueMode::Gated ? "gated" : "queued"; }

void validate(const SimConfig& sim) {
  validate(sim.scenario);
  if (sim.num_slots == 0) throw ConfigError("slots", "must be >= 1");
  if (sim.warmup_slots >= sim.num_slots) throw ConfigError("warmup", "must be smaller than the number of slots");
  if (sim.replications == 0) throw ConfigError("reps", "must be >= 1");
}

std::vector<Transmission> generate_trace(const SimConfig& sim, std::uint64_t replication) {
  const ScenarioConfig& cfg = sim.scenario;
  const double t_slot = cfg.slot_length();
  const auto horizon = static_cast<std::int64_t>(sim.num_slots) + max_interference_slots(cfg);
  const double end_time = static_cast<double>(horizon) * t_slot;
  const double range = cfg.coverage.max_range();

  Rng rng = make_stream(sim.seed, replication);
  std::vector<double> distance(static_cast<std::size_t>(cfg.num_nodes));
  for (double& d : distance) d = std::min(range, norm(sample_uniform_point(cfg.coverage, rng)));

  std::vector<Transmission> trace;
  if (cfg.arrival_rate <= 0.0) return trace;
  std::exponential_distribution<double> gap(cfg.arrival_rate);

  for (int node = 0; node < cfg.num_nodes; ++node) {
    const double d = distance[static_cast<std::size_t>(node)];
    if (sim.queue == QueueMode::Gated) {
      std::int64_t last_slot = -1;
      for (double t = gap(rng); t < end_time; t += gap(rng)) {
        // An arrival during slot m - 1 is sent at the start of slot m.
        const auto slot = static_cast<std::int64_t>(std::floor(t / t_slot)) + 1;
        if (slot != last_slot && slot < horizon) trace.push_back({node, slot, d});
        last_slot = slot;
      }
    } else {
      std::uint64_t backlog = 0;
      double next_arrival = gap(rng);
      for (std::int64_t slot = 1; slot < horizon; ++slot) {
        const double slot_start = static_cast<double>(slot) * t_slot;
        while (next_arrival < slot_start) {
          ++backlog;
          next_arrival += gap(rng);
        }
        if (backlog > 0) {
          trace.push_back({node, slot, d});
          --backlog;
        }
      }
    }
  }
  std::sort(trace.begin(), trace.end(), [](const Transmission& a, const Transmission& b) {
    return std::tie(a.slot_index, a.node_id) < std::tie(b.slot_index, b.node_id);
  });
  return trace;
}

std::vector<bool> resolve_collisions(std::span<const Transmission> trace, const ScenarioConfig& cfg) {
  const std::int64_t M = max_interference_slots(cfg);
  std::vector<bool> ok(trace.size(), true);
  std::size_t window_start = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::int64_t slot = trace[i].slot_index;
    while (trace[window_start].slot_index < slot - M) ++window_start;
    for (std::size_t j = window_start; j < trace.size() && trace[j].slot_index <= slot + M; ++j) {
      if (j != i && collides(trace[i], trace[j], cfg)) {
        ok[i] = false;
        break;
      }
    }
  }
  return ok;
}

ReplicationResult run_replication(const SimConfig& sim, std::uint64_t replication) {
  const std::vector<Transmission> trace = generate_trace(sim, replication);
  const std::vector<bool> ok = resolve_collisions(trace, sim.scenario);
  ReplicationResult out;
  const auto first = static_cast<std::int64_t>(sim.warmup_slots);
  const auto last = static_cast<std::int64_t>(sim.num_slots);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::int64_t slot = trace[i].slot_index;
    if (slot < first || slot >= last) continue;
    ++out.attempts;
    if (ok[i]) ++out.successes;
  }
  return out;
}

SimResult run(const SimConfig& sim) {
  validate(sim);
  const ScenarioConfig& cfg = sim.scenario;

  SimResult out;
  out.replications.resize(sim.replications);
  parallel_for(sim.replications, sim.threads,
               [&](std::size_t r) { out.replications[r] = run_replication(sim, r); });

  for (const ReplicationResult& r : out.replications) {
    out.attempts += r.attempts;
    out.successes += r.successes;
  }
  if (out.attempts > 0) out.P_s = static_cast<double>(out.successes) / static_cast<double>(out.attempts);

  // Spread of per-replication success ratios; a single replication falls back to the binomial error.
  std::vector<double> ratios;
  for (const ReplicationResult& r : out.replications) {
    if (r.attempts > 0) ratios.push_back(static_cast<double>(r.successes) / static_cast<double>(r.attempts));
  }
  if (ratios.size() >= 2) {
    double mean = 0.0;
    for (double x : ratios) mean += x;
    mean /= static_cast<double>(ratios.size());
    double ss = 0.0;
    for (double x : ratios) ss += (x - mean) * (x - mean);
    const double n = static_cast<double>(ratios.size());
    out.P_s_se = std::sqrt(ss / (n - 1.0) / n);
    const boost::math::students_t dist(n - 1.0);
    out.P_s_ci = boost::math::quantile(boost::math::complement(dist, 0.025)) * out.P_s_se;
  } else if (out.attempts > 0) {
    out.P_s_se = std::sqrt(out.P_s * (1.0 - out.P_s) / static_cast<double>(out.attempts));
    out.P_s_ci = 1.959963984540054 * out.P_s_se;
  }

  out.observed_time = static_cast<double>(sim.replications) *
                      static_cast<double>(sim.num_slots - sim.warmup_slots) * cfg.slot_length();
  out.throughput_measured = static_cast<double>(out.successes) * cfg.packet_duration / out.observed_time;
  out.throughput_model = cfg.num_nodes * cfg.arrival_rate * cfg.packet_duration * out.P_s;
  return out;
}

}  // namespace stcmac
