#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stcmac/analytics.hpp"
#include "stcmac/montecarlo.hpp"
#include "stcmac/scenario.hpp"
#include "stcmac/simulator.hpp"

namespace stcmac {

const char* version() noexcept;

// Scenario files are flat `key = value` text; '#' starts a comment.
//
//   v        propagation speed [m/s]      (default 1500)
//   R        horizontal range [m]         (default 1500)
//   alpha    vertical range factor        (default 1; > 1 selects the ellipse)
//   t_f      packet duration [s]          (required)
//   beta     guard coefficient            (required)
//   lambda   arrival rate [packets/s]     (required)
//   n_nodes  number of sensor nodes       (required)
//
// Normalized units: v = 1 and R = 1 make tau = 1.
ScenarioConfig parse_scenario(std::istream& in, std::string_view source = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string format_scenario(const ScenarioConfig& cfg);

// CSV schema identifiers; bump the suffix whenever a header changes.
inline constexpr std::string_view kAnalyzeCsvSchema = "stcmac.analyze.v1";
inline constexpr std::string_view kMcCsvSchema = "stcmac.mc.v1";
inline constexpr std::string_view kSweepCsvSchema = "stcmac.sweep.v1";
inline constexpr std::string_view kSimCsvSchema = "stcmac.sim.v1";

// k,d_lo,d_hi,P_k,P_zk,P_ok,P_sk,p_t,P_s,T - one row per segment and a final `all` row.
void write_analytic_csv(std::ostream& out, const AnalyticResult& result);
std::string analytic_json(const AnalyticResult& result);

// quantity,dm,k,d_lo,d_hi,theo,sim,se,n - long form of the validation tables.
// quantity is P_k, p_z, p_o or P_s; for p_o, dm names the pair (dm, dm+1).
void write_mc_csv(std::ostream& out, const McEstimate& sim, const AnalyticResult& theory);
std::string mc_json(const McEstimate& sim, const AnalyticResult& theory);

struct SweepRow {
  double param = 0.0;
  std::optional<double> P_s_sim;
  std::optional<double> P_s_sim_ci;
  std::optional<double> T_sim;
  std::optional<double> P_s_theory;
  std::optional<double> T_theory;
};

// param,P_s_sim,P_s_sim_ci,T_sim,P_s_theory,T_theory
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// replication,attempts,successes,P_s - one row per replication.
void write_sim_csv(std::ostream& out, const SimResult& result);
std::string sim_json(const SimConfig& sim, const SimResult& result);

struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  ScenarioConfig scenario;
  std::map<std::string, std::string> options;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::string csv_schema;
  std::string started_at;
  double wall_clock_seconds = 0.0;
};

std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view json);

std::string scenario_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(std::string_view json);

}  // namespace stcmac
