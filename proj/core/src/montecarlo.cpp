#include "stcmac/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "stcmac/analytics.hpp"
#include "stcmac/error.hpp"
#include "stcmac/geometry.hpp"
#include "stcmac/parallel.hpp"
#include "stcmac/rng.hpp"

namespace stcmac {
namespace {

struct SegmentCounts {
  std::uint64_t senders = 0;
  std::vector<std::uint64_t> z_hits;  // indexed by offset + M
  std::vector<std::uint64_t> o_hits;
  std::uint64_t z_sum = 0;
  std::uint64_t z_sum_sq = 0;
  std::uint64_t o_sum = 0;
  std::uint64_t clear = 0;
  std::uint64_t successes = 0;

  void merge(const SegmentCounts& o) {
    senders += o.senders;
    for (std::size_t i = 0; i < z_hits.size(); ++i) z_hits[i] += o.z_hits[i];
    for (std::size_t i = 0; i < o_hits.size(); ++i) o_hits[i] += o.o_hits[i];
    z_sum += o.z_sum;
    z_sum_sq += o.z_sum_sq;
    o_sum += o.o_sum;
    clear += o.clear;
    successes += o.successes;
  }
};

Estimate proportion(std::uint64_t hits, std::uint64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

Estimate mean_of_counts(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t n) {
  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(sum) / dn;
  const double var = std::max(0.0, static_cast<double>(sum_sq) / dn - mean * mean);
  return {mean, std::sqrt(var / dn), n};
}

std::uint64_t block_count(std::uint64_t runs) { return (runs + kMcBlockSize - 1) / kMcBlockSize; }

std::uint64_t block_runs(std::uint64_t runs, std::uint64_t block) {
  return std::min(kMcBlockSize, runs - block * kMcBlockSize);
}

}  // namespace

void validate(const McConfig& mc) {
  validate(mc.scenario);
  if (mc.runs < 1) throw ConfigError("runs", "must be >= 1");
}

McEstimate estimate_table(const McConfig& mc) {
  validate(mc);
  ScenarioConfig cfg = mc.scenario;
  cfg.num_nodes = 2;

  const Segmentation seg = segments(cfg);
  const int M = seg.max_offset;
  const std::size_t width = 2 * static_cast<std::size_t>(M) + 1;
  const double p_t = transmit_prob(cfg.arrival_rate, cfg.slot_length());
  const double range = cfg.coverage.max_range();

  SegmentCounts empty;
  empty.z_hits.assign(width, 0);
  empty.o_hits.assign(width, 0);

  const std::uint64_t blocks = block_count(mc.runs);
  std::vector<std::vector<SegmentCounts>> per_block(blocks, std::vector<SegmentCounts>(seg.size(), empty));

  parallel_for(blocks, mc.threads, [&](std::size_t b) {
    Rng rng = make_stream(mc.seed, b);
    std::bernoulli_distribution active(p_t);
    std::vector<SegmentCounts>& counts = per_block[b];
    const std::uint64_t n = block_runs(mc.runs, b);
    for (std::uint64_t run = 0; run < n; ++run) {
      const double d_i = std::min(range, norm(sample_uniform_point(cfg.coverage, rng)));
      const double d_j = std::min(range, norm(sample_uniform_point(cfg.coverage, rng)));
      const std::size_t k = seg.locate(d_i);
      const Segment& s = seg.segments[k];
      SegmentCounts& c = counts[k];
      ++c.senders;

      std::uint64_t in_irs = 0;
      std::uint64_t in_dirs = 0;
      for (int dm : s.slots) {
        if (!interferes(d_i, d_j, dm, cfg)) continue;
        ++c.z_hits[static_cast<std::size_t>(dm + M)];
        ++in_irs;
        const bool next_valid = std::binary_search(s.slots.begin(), s.slots.end(), dm + 1);
        if (next_valid && interferes(d_i, d_j, dm + 1, cfg)) {
          ++c.o_hits[static_cast<std::size_t>(dm + M)];
          ++in_dirs;
        }
      }
      c.z_sum += in_irs;
      c.z_sum_sq += in_irs * in_irs;
      c.o_sum += in_dirs;
      if (in_irs == 0) ++c.clear;

      // The interferer sends `dm` slots before the tagged packet with probability p_t, independently per slot.
      const Transmission tagged{0, 0, d_i};
      bool collided = false;
      for (int dm = -M; dm <= M; ++dm) {
        const bool sends = active(rng);
        if (sends && collides(tagged, Transmission{1, -dm, d_j}, cfg)) collided = true;
      }
      if (!collided) ++c.successes;
    }
  });

  std::vector<SegmentCounts> total(seg.size(), empty);
  for (const auto& block : per_block) {
    for (std::size_t k = 0; k < seg.size(); ++k) total[k].merge(block[k]);
  }

  McEstimate out;
  out.scenario = cfg;
  out.runs = mc.runs;
  out.seed = mc.seed;
  out.max_offset = M;
  out.p_t = p_t;
  std::uint64_t successes = 0;
  for (std::size_t k = 0; k < seg.size(); ++k) {
    const SegmentCounts& c = total[k];
    McSegment row;
    row.range = seg.segments[k].range;
    row.slots = seg.segments[k].slots;
    row.senders = c.senders;
    row.P_k = proportion(c.senders, mc.runs);
    successes += c.successes;
    if (c.senders > 0) {
      for (int dm : row.slots) {
        row.p_z[dm] = proportion(c.z_hits[static_cast<std::size_t>(dm + M)], c.senders);
        if (std::binary_search(row.slots.begin(), row.slots.end(), dm + 1)) {
          row.p_o[dm] = proportion(c.o_hits[static_cast<std::size_t>(dm + M)], c.senders);
        }
      }
      row.P_z = mean_of_counts(c.z_sum, c.z_sum_sq, c.senders);
      // At most one DIR can hold a given distance, so the count is 0/1.
      row.P_o = proportion(c.o_sum, c.senders);
      row.P_s = proportion(c.successes, c.senders);
      row.collision_free = proportion(c.clear, c.senders);
    }
    out.segments.push_back(std::move(row));
  }
  out.P_s = proportion(successes, mc.runs);
  return out;
}

Estimate estimate_success_prob(const McConfig& mc) {
  validate(mc);
  const ScenarioConfig& cfg = mc.scenario;
  if (cfg.num_nodes == 1) return {1.0, 0.0, mc.runs};

  const int M = max_interference_slots(cfg);
  const double p_t = transmit_prob(cfg.arrival_rate, cfg.slot_length());
  const double range = cfg.coverage.max_range();
  const std::uint64_t blocks = block_count(mc.runs);
  std::vector<std::uint64_t> successes(blocks, 0);

  parallel_for(blocks, mc.threads, [&](std::size_t b) {
    Rng rng = make_stream(mc.seed, b);
    std::bernoulli_distribution active(p_t);
    const std::uint64_t n = block_runs(mc.runs, b);
    for (std::uint64_t run = 0; run < n; ++run) {
      const Transmission tagged{0, 0, std::min(range, norm(sample_uniform_point(cfg.coverage, rng)))};
      bool collided = false;
      for (int j = 1; j < cfg.num_nodes; ++j) {
        const double d_j = std::min(range, norm(sample_uniform_point(cfg.coverage, rng)));
        for (int dm = -M; dm <= M; ++dm) {
          const bool sends = active(rng);
          if (sends && collides(tagged, Transmission{j, -dm, d_j}, cfg)) collided = true;
        }
      }
      if (!collided) ++successes[b];
    }
  });

  std::uint64_t total = 0;
  for (std::uint64_t s : successes) total += s;
  return proportion(total, mc.runs);
}

}  // namespace stcmac
