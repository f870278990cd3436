#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "stcmac/analytics.hpp"
#include "stcmac/error.hpp"
#include "support.hpp"

using namespace stcmac;
using testing_support::normalized;
using testing_support::physical;
using testing_support::table2;
using testing_support::table3;

namespace {

constexpr double kCell = 5e-3;

// Table II / III Theo cells, indexed [k][dm]; NaN marks "\" entries.
constexpr double X = std::numeric_limits<double>::quiet_NaN();
const double kTable2Pz[5][5] = {  // dm = -2..2
    {X, X, 0.0282, 0.2265, 0.0657},
    {X, X, 0.11, 0.31, X},
    {X, 0.0141, 0.2015, 0.18, X},
    {X, 0.1007, 0.3007, X, X},
    {0.0033, 0.1799, 0.2771, X, X}};
const double kTable3Pz[5][3] = {  // dm = -1..1
    {X, 0.8086, 0.6392},
    {X, 1.0, 0.4341},
    {0.0141, 1.0, 0.18},
    {0.0636, 1.0, X},
    {0.2097, 0.9701, X}};
const double kTable3Po[5][2] = {  // pairs (-1,0) and (0,1)
    {X, 0.4478},
    {X, 0.4341},
    {0.0141, 0.18},
    {0.0636, X},
    {0.17911, X}};

}  // namespace

TEST(TransmitProb, Examples) {
  EXPECT_EQ(transmit_prob(0.0, 0.5), 0.0);
  EXPECT_NEAR(transmit_prob(0.5, 0.5), 0.22120, 5e-6);
  EXPECT_NEAR(transmit_prob(1e9, 1.0), 1.0, 1e-15);
  EXPECT_LT(transmit_prob(10.0, 1.0), 1.0);
  EXPECT_NEAR(transmit_prob(1e-12, 1.0), 1e-12, 1e-24);
}

TEST(SegmentProb, TablesAreAreaRatios) {
  const double t2[] = {0.01, 0.15, 0.2, 0.45, 0.19};
  const double t3[] = {0.09, 0.07, 0.2, 0.13, 0.51};
  const Segmentation s2 = segments(table2());
  const Segmentation s3 = segments(table3());
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(segment_prob(s2.segments[k], table2()), t2[k], 1e-12);
    EXPECT_NEAR(segment_prob(s3.segments[k], table3()), t3[k], 1e-12);
  }
  const auto single = normalized(1.0, 1.0);
  EXPECT_NEAR(segment_prob(segments(single).segments[0], single), 1.0, 1e-15);
}

TEST(Analyze, TableTwoTheoCells) {
  const AnalyticResult r = analyze(table2());
  EXPECT_EQ(r.max_offset, 2);
  EXPECT_FALSE(r.overlapping);
  ASSERT_EQ(r.segments.size(), 5u);
  const double ps[] = {0.9291, 0.9071, 0.9125, 0.9112, 0.8982};
  for (int k = 0; k < 5; ++k) {
    const auto& seg = r.segments[k];
    for (int dm = -2; dm <= 2; ++dm) {
      const double want = kTable2Pz[k][dm + 2];
      if (std::isnan(want)) {
        EXPECT_FALSE(seg.p_z.contains(dm)) << "k=" << k + 1 << " dm=" << dm;
      } else {
        ASSERT_TRUE(seg.p_z.contains(dm)) << "k=" << k + 1 << " dm=" << dm;
        EXPECT_NEAR(seg.p_z.at(dm), want, kCell) << "k=" << k + 1 << " dm=" << dm;
      }
    }
    EXPECT_TRUE(seg.p_o.empty());
    EXPECT_EQ(seg.P_o, 0.0);
    EXPECT_NEAR(seg.P_s, ps[k], kCell);
  }
  // Sum_k P_k P_s,k from the printed rows.
  EXPECT_NEAR(r.P_s, 0.01 * 0.9291 + 0.15 * 0.9071 + 0.2 * 0.9125 + 0.45 * 0.9112 + 0.19 * 0.8982, kCell);
}

TEST(Analyze, TableThreeTheoCells) {
  const AnalyticResult r = analyze(table3());
  EXPECT_EQ(r.max_offset, 1);
  EXPECT_TRUE(r.overlapping);
  ASSERT_EQ(r.segments.size(), 5u);
  const double ps[] = {0.4676, 0.4710, 0.5296, 0.5614, 0.5331};
  for (int k = 0; k < 5; ++k) {
    const auto& seg = r.segments[k];
    for (int dm = -1; dm <= 1; ++dm) {
      const double want = kTable3Pz[k][dm + 1];
      if (std::isnan(want)) {
        EXPECT_FALSE(seg.p_z.contains(dm));
        continue;
      }
      ASSERT_TRUE(seg.p_z.contains(dm));
      if (want == 1.0) {
        EXPECT_EQ(seg.p_z.at(dm), 1.0) << "FullCover cell k=" << k + 1;
      } else {
        EXPECT_NEAR(seg.p_z.at(dm), want, kCell) << "k=" << k + 1 << " dm=" << dm;
      }
    }
    for (int dm = -1; dm <= 0; ++dm) {
      const double want = kTable3Po[k][dm + 1];
      if (std::isnan(want)) {
        EXPECT_FALSE(seg.p_o.contains(dm));
      } else {
        ASSERT_TRUE(seg.p_o.contains(dm));
        EXPECT_NEAR(seg.p_o.at(dm), want, kCell) << "k=" << k + 1 << " dm=" << dm;
      }
    }
    EXPECT_NEAR(seg.P_z - 1.0, seg.P_o, 1e-6);
    EXPECT_NEAR(seg.P_s, ps[k], kCell);
  }
}

TEST(Analyze, RadialWeightingStaysClose) {
  for (const auto& cfg : {table2(), table3()}) {
    const double link = success_prob(cfg, {.weighting = WeightingMode::LinkPdf});
    const double radial = success_prob(cfg, {.weighting = WeightingMode::Radial});
    EXPECT_LT(std::abs(link - radial), 0.02);
  }
}

TEST(Analyze, RadialMatchesClosedFormOnDisk) {
  // Table III k = 1: the DIR (0,1) is [d + 0.4, d + 0.7], area 0.3 (2d + 1.1) pi,
  // averaged under density 2d / 0.09 on [0, 0.3].
  const AnalyticResult r = analyze(table3(), {.weighting = WeightingMode::Radial});
  EXPECT_NEAR(r.segments[0].p_o.at(0), 0.45, 1e-10);
}

TEST(Analyze, SingleNodeAlwaysSucceeds) {
  for (const auto& cfg : {normalized(0.1, 0.4, 0.5, 1), normalized(0.7, 0.4, 3.0, 1, 1.5)}) {
    const AnalyticResult r = analyze(cfg);
    EXPECT_EQ(r.P_s, 1.0);
    for (const auto& s : r.segments) EXPECT_EQ(s.P_s, 1.0);
  }
}

TEST(Analyze, ZeroLoad) {
  const AnalyticResult r = analyze(normalized(0.3, 0.2, 0.0, 10));
  EXPECT_EQ(r.p_t, 0.0);
  EXPECT_EQ(r.P_s, 1.0);
  EXPECT_EQ(r.throughput, 0.0);
}

TEST(Analyze, ThroughputIdentity) {
  const auto cfg = physical(0.9, 0.6, 0.1, 10);
  const AnalyticResult r = analyze(cfg);
  EXPECT_DOUBLE_EQ(r.throughput, 10 * 0.1 * 0.9 * r.P_s);
  double sum = 0.0;
  double mass = 0.0;
  for (const auto& s : r.segments) {
    sum += s.P_k * s.P_s;
    mass += s.P_k;
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  EXPECT_NEAR(sum, r.P_s, 1e-15);
}

TEST(Analyze, EndpointIdentity) {
  for (double alpha : {1.0, 1.5}) {
    const auto a = normalized(0.6, 0.0, 0.3, 7, alpha);
    const auto b = normalized(0.6, 0.6, 0.3, 7, alpha);
    const double want = std::exp(-2.0 * 6 * 0.3 * 0.6);
    EXPECT_NEAR(success_prob(a), want, 1e-9);
    EXPECT_NEAR(success_prob(b), want, 1e-9);
  }
}

TEST(Analyze, SlotTwicePacketShapesAgree) {
  // beta tau = t_f, so t_slot = 2 t_f.
  const auto disk = physical(0.8, 0.8 / 1.0, 0.1, 8);
  const auto ell = physical(0.8, 0.8, 0.1, 8, 1.5);
  const AnalyticResult a = analyze(disk);
  const AnalyticResult b = analyze(ell);
  for (const auto& s : a.segments) EXPECT_NEAR(s.P_z, 1.0, 1e-9);
  for (const auto& s : b.segments) EXPECT_NEAR(s.P_z, 1.0, 1e-9);
  EXPECT_NEAR(a.P_s, b.P_s, 1e-9);
  EXPECT_NEAR(a.throughput, b.throughput, 1e-9);
}

TEST(Analyze, MonotoneInNodesAndLoad) {
  double prev = 1.0;
  for (int n = 2; n <= 20; ++n) {
    const double ps = success_prob(physical(0.9, 0.6, 0.1, n));
    EXPECT_LT(ps, prev);
    prev = ps;
  }
  prev = 1.0;
  for (double lambda = 0.01; lambda < 1.0; lambda += 0.05) {
    const double ps = success_prob(physical(0.5, 0.3, lambda, 5, 1.5));
    EXPECT_LT(ps, prev);
    prev = ps;
  }
}

TEST(ConditionalSuccess, Cases) {
  EXPECT_NEAR(conditional_success(0.32, 0.0, 0.2, 2, false), 1.0 - 0.2 * 0.32, 1e-15);
  EXPECT_NEAR(conditional_success(0.32, 0.0, 0.2, 4, false), std::pow(1.0 - 0.2 * 0.32, 3), 1e-15);
  EXPECT_NEAR(conditional_success(1.4, 0.4, 0.3, 3, true), std::pow(0.7 * (0.6 + 0.7 * 0.4), 2), 1e-15);
  EXPECT_EQ(conditional_success(1.4, 0.4, 0.3, 1, true), 1.0);
  // At t_slot = 2 t_f both forms agree: P_z = 1, P_o = 0.
  EXPECT_NEAR(conditional_success(1.0, 0.0, 0.37, 5, true), conditional_success(1.0, 0.0, 0.37, 5, false), 1e-15);
}

TEST(Psi, Limits) {
  const auto cfg = normalized(0.8, 0.0, 0.5, 2);
  EXPECT_NEAR(psi(cfg, 0.8 * (1.0 - 1e-9)), 0.0, 1e-6);
  // a -> 0: 1 - sum P_k P_o,k with P_o,k -> P_z,k - 1 at beta = 0.
  const double a = 1e-3 * 0.8;
  const AnalyticResult zero_guard = analyze(normalized(0.8, a, 0.5, 2));
  double po = 0.0;
  for (const auto& s : zero_guard.segments) po += s.P_k * (s.P_z - 1.0);
  EXPECT_NEAR(psi(cfg, a), (0.8 - a) / (0.8 + a) - po, 1e-9);
  EXPECT_GT(psi(cfg, 0.4), 0.0);
}

TEST(Sweep, ParamsAndGrid) {
  EXPECT_EQ(parse_sweep_param("tf"), SweepParam::PacketDuration);
  EXPECT_EQ(parse_sweep_param("n"), SweepParam::Nodes);
  EXPECT_FALSE(parse_sweep_param("gamma"));
  const auto g = linear_grid(0.0, 1.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(linear_grid(2.0, 3.0, 1), std::vector<double>{2.0});
  EXPECT_THROW(linear_grid(0.0, 1.0, 0), ConfigError);
  EXPECT_THROW(with_param(table2(), SweepParam::Nodes, 2.5), ConfigError);
  EXPECT_EQ(with_param(table2(), SweepParam::Nodes, 7.0).num_nodes, 7);
  EXPECT_DOUBLE_EQ(with_param(table2(), SweepParam::PacketDuration, 0.3).packet_duration, 0.3);
}

TEST(Sweep, BetaCurveHasEqualEndpointsAndInteriorPeak) {
  const auto cfg = physical(0.9, 0.0, 0.1, 10);
  const auto grid = linear_grid(0.0, 0.9, 19);
  const SweepResult s = sweep(cfg, SweepParam::Beta, grid);
  EXPECT_NEAR(s.points.front().P_s, s.points.back().P_s, 1e-6);
  EXPECT_GT(s.argmax_ps, 0u);
  EXPECT_LT(s.argmax_ps, grid.size() - 1);
  EXPECT_GT(s.points[s.argmax_ps].P_s, s.points.front().P_s);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const auto cfg = physical(0.9, 0.6, 0.1, 10, 1.5);
  const auto grid = linear_grid(2.0, 12.0, 11);
  const SweepResult a = sweep(cfg, SweepParam::Nodes, grid, {}, 1);
  const SweepResult b = sweep(cfg, SweepParam::Nodes, grid, {}, 4);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].P_s, b.points[i].P_s);
  EXPECT_EQ(a.argmax_throughput, b.argmax_throughput);
}

TEST(MaximizeGuard, BeatsEndpoints) {
  const GuardOptimum g = maximize_guard(physical(0.9, 0.0, 0.1, 10));
  EXPECT_GT(g.guard_interval, 0.0);
  EXPECT_LT(g.guard_interval, 0.9);
  EXPECT_GT(g.P_s, g.endpoint_P_s);
  EXPECT_NEAR(g.guard_coefficient, g.guard_interval, 1e-15);  // tau = 1
}
