#include "stcmac/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "stcmac/error.hpp"

#ifndef STCMAC_VERSION
#define STCMAC_VERSION "0.0.0"
#endif

namespace stcmac {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& text, std::string_view where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, fmt::format("{}: '{}' is not a number", where, text));
  }
  return value;
}

std::string num(double x) { return fmt::format("{}", x); }
std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

json scenario_to_json_value(const ScenarioConfig& cfg) {
  return json{{"v", cfg.sound_speed},
              {"R", cfg.coverage.radius()},
              {"alpha", cfg.coverage.alpha()},
              {"shape", cfg.coverage.shape() == Shape::Disk ? "disk" : "ellipse"},
              {"t_f", cfg.packet_duration},
              {"beta", cfg.guard_coefficient},
              {"lambda", cfg.arrival_rate},
              {"n_nodes", cfg.num_nodes},
              {"tau", cfg.tau()},
              {"t_slot", cfg.slot_length()},
              {"M", max_interference_slots(cfg)}};
}

ScenarioConfig scenario_from_json_value(const json& j) {
  auto get = [&](const char* key) -> double {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(key, "missing or non-numeric in manifest");
    return j.at(key).get<double>();
  };
  ScenarioConfig cfg;
  cfg.sound_speed = get("v");
  const double alpha = get("alpha");
  cfg.coverage = alpha == 1.0 && j.value("shape", "disk") == "disk" ? Coverage::disk(get("R"))
                                                                    : Coverage::ellipse(get("R"), alpha);
  cfg.packet_duration = get("t_f");
  cfg.guard_coefficient = get("beta");
  cfg.arrival_rate = get("lambda");
  cfg.num_nodes = static_cast<int>(get("n_nodes"));
  validate(cfg);
  return cfg;
}

json estimate_json(const Estimate& e) { return json{{"value", e.value}, {"se", e.se}, {"n", e.trials}}; }

}  // namespace

const char* version() noexcept { return STCMAC_VERSION; }

ScenarioConfig parse_scenario(std::istream& in, std::string_view source) {
  static const std::set<std::string> known{"v", "R", "alpha", "t_f", "beta", "lambda", "n_nodes"};
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = fmt::format("{}:{}", source, line_no);
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("<syntax>", where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string text = trim(std::string_view(body).substr(eq + 1));
    if (!known.contains(key)) throw ConfigError(key, where + ": unknown key");
    if (values.contains(key)) throw ConfigError(key, where + ": duplicate key");
    values[key] = parse_number(key, text, where);
  }

  for (const char* required : {"t_f", "beta", "lambda", "n_nodes"}) {
    if (!values.contains(required)) throw ConfigError(required, std::string(source) + ": missing required key");
  }
  auto value_or = [&](const char* key, double fallback) {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  };

  ScenarioConfig cfg;
  cfg.sound_speed = value_or("v", 1500.0);
  const double R = value_or("R", 1500.0);
  const double alpha = value_or("alpha", 1.0);
  cfg.coverage = alpha == 1.0 ? Coverage::disk(R) : Coverage::ellipse(R, alpha);
  cfg.packet_duration = values["t_f"];
  cfg.guard_coefficient = values["beta"];
  cfg.arrival_rate = values["lambda"];
  const double n = values["n_nodes"];
  if (n != std::floor(n) || n < 1.0 || n > 1e6) throw ConfigError("n_nodes", "must be a positive integer");
  cfg.num_nodes = static_cast<int>(n);
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  return parse_scenario(in, path.string());
}

std::string format_scenario(const ScenarioConfig& cfg) {
  return fmt::format("v = {}\nR = {}\nalpha = {}\nt_f = {}\nbeta = {}\nlambda = {}\nn_nodes = {}\n", cfg.sound_speed,
                     cfg.coverage.radius(), cfg.coverage.alpha(), cfg.packet_duration, cfg.guard_coefficient,
                     cfg.arrival_rate, cfg.num_nodes);
}

void write_analytic_csv(std::ostream& out, const AnalyticResult& r) {
  out << "k,d_lo,d_hi,P_k,P_zk,P_ok,P_sk,p_t,P_s,T\n";
  double total_pk = 0.0;
  for (std::size_t k = 0; k < r.segments.size(); ++k) {
    const SegmentProbabilities& s = r.segments[k];
    total_pk += s.P_k;
    out << k + 1 << ',' << num(s.range.lo) << ',' << num(s.range.hi) << ',' << num(s.P_k) << ',' << num(s.P_z) << ','
        << num(s.P_o) << ',' << num(s.P_s) << ',' << num(r.p_t) << ",,\n";
  }
  out << "all," << num(0.0) << ',' << num(r.scenario.coverage.max_range()) << ',' << num(total_pk) << ",,,,"
      << num(r.p_t) << ',' << num(r.P_s) << ',' << num(r.throughput) << '\n';
}

std::string analytic_json(const AnalyticResult& r) {
  json segs = json::array();
  for (std::size_t k = 0; k < r.segments.size(); ++k) {
    const SegmentProbabilities& s = r.segments[k];
    json pz = json::object();
    for (const auto& [dm, p] : s.p_z) pz[std::to_string(dm)] = p;
    json po = json::object();
    for (const auto& [dm, p] : s.p_o) po[fmt::format("{},{}", dm, dm + 1)] = p;
    segs.push_back({{"k", k + 1},
                    {"d_lo", s.range.lo},
                    {"d_hi", s.range.hi},
                    {"slots", s.slots},
                    {"P_k", s.P_k},
                    {"p_z", pz},
                    {"P_zk", s.P_z},
                    {"p_o", po},
                    {"P_ok", s.P_o},
                    {"P_sk", s.P_s}});
  }
  const json doc{{"schema", "stcmac.analytic.v1"},
                 {"scenario", scenario_to_json_value(r.scenario)},
                 {"weighting", to_string(r.weighting)},
                 {"M", r.max_offset},
                 {"K", r.segments.size()},
                 {"t_slot", r.slot_length},
                 {"overlapping_irs", r.overlapping},
                 {"p_t", r.p_t},
                 {"segments", segs},
                 {"P_s", r.P_s},
                 {"T", r.throughput}};
  return doc.dump(2) + "\n";
}

void write_mc_csv(std::ostream& out, const McEstimate& sim, const AnalyticResult& theory) {
  if (sim.segments.size() != theory.segments.size()) {
    throw std::invalid_argument("write_mc_csv: simulation and theory use different segmentations");
  }
  out << "quantity,dm,k,d_lo,d_hi,theo,sim,se,n\n";
  auto row = [&](const char* quantity, const std::string& dm, std::size_t k, double theo, const Estimate& e) {
    const McSegment& s = sim.segments[k];
    out << quantity << ',' << dm << ',' << k + 1 << ',' << num(s.range.lo) << ',' << num(s.range.hi) << ','
        << num(theo) << ',' << num(e.value) << ',' << num(e.se) << ',' << e.trials << '\n';
  };
  for (std::size_t k = 0; k < sim.segments.size(); ++k) row("P_k", "", k, theory.segments[k].P_k, sim.segments[k].P_k);
  for (std::size_t k = 0; k < sim.segments.size(); ++k) {
    for (const auto& [dm, e] : sim.segments[k].p_z) {
      const auto it = theory.segments[k].p_z.find(dm);
      row("p_z", std::to_string(dm), k, it == theory.segments[k].p_z.end() ? 0.0 : it->second, e);
    }
  }
  // DIRs only exist when adjacent IRs can overlap.
  for (std::size_t k = 0; k < sim.segments.size() && theory.overlapping; ++k) {
    for (const auto& [dm, e] : sim.segments[k].p_o) {
      const auto it = theory.segments[k].p_o.find(dm);
      row("p_o", std::to_string(dm), k, it == theory.segments[k].p_o.end() ? 0.0 : it->second, e);
    }
  }
  for (std::size_t k = 0; k < sim.segments.size(); ++k) {
    if (sim.segments[k].P_s) row("P_s", "", k, theory.segments[k].P_s, *sim.segments[k].P_s);
  }
  out << "P_s,,all," << num(0.0) << ',' << num(sim.scenario.coverage.max_range()) << ',' << num(theory.P_s) << ','
      << num(sim.P_s.value) << ',' << num(sim.P_s.se) << ',' << sim.P_s.trials << '\n';
}

std::string mc_json(const McEstimate& sim, const AnalyticResult& theory) {
  json segs = json::array();
  for (std::size_t k = 0; k < sim.segments.size(); ++k) {
    const McSegment& s = sim.segments[k];
    json row{{"k", k + 1}, {"d_lo", s.range.lo}, {"d_hi", s.range.hi}, {"slots", s.slots}, {"senders", s.senders}};
    row["P_k"] = {{"theo", theory.segments[k].P_k}, {"sim", estimate_json(s.P_k)}};
    json pz = json::object();
    for (const auto& [dm, e] : s.p_z) pz[std::to_string(dm)] = {{"theo", theory.segments[k].p_z.count(dm) ? theory.segments[k].p_z.at(dm) : 0.0}, {"sim", estimate_json(e)}};
    row["p_z"] = pz;
    json po = json::object();
    for (const auto& [dm, e] : s.p_o) po[fmt::format("{},{}", dm, dm + 1)] = {{"theo", theory.segments[k].p_o.count(dm) ? theory.segments[k].p_o.at(dm) : 0.0}, {"sim", estimate_json(e)}};
    if (theory.overlapping) row["p_o"] = po;
    if (s.P_z) row["P_zk"] = {{"theo", theory.segments[k].P_z}, {"sim", estimate_json(*s.P_z)}};
    if (s.P_o) row["P_ok"] = {{"theo", theory.segments[k].P_o}, {"sim", estimate_json(*s.P_o)}};
    if (s.P_s) row["P_sk"] = {{"theo", theory.segments[k].P_s}, {"sim", estimate_json(*s.P_s)}};
    if (s.collision_free) row["collision_free"] = estimate_json(*s.collision_free);
    segs.push_back(std::move(row));
  }
  const json doc{{"schema", "stcmac.mc.v1"},
                 {"scenario", scenario_to_json_value(sim.scenario)},
                 {"runs", sim.runs},
                 {"seed", sim.seed},
                 {"M", sim.max_offset},
                 {"p_t", sim.p_t},
                 {"weighting", to_string(theory.weighting)},
                 {"segments", segs},
                 {"P_s", {{"theo", theory.P_s}, {"sim", estimate_json(sim.P_s)}}}};
  return doc.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param,P_s_sim,P_s_sim_ci,T_sim,P_s_theory,T_theory\n";
  for (const SweepRow& r : rows) {
    out << num(r.param) << ',' << opt_num(r.P_s_sim) << ',' << opt_num(r.P_s_sim_ci) << ',' << opt_num(r.T_sim) << ','
        << opt_num(r.P_s_theory) << ',' << opt_num(r.T_theory) << '\n';
  }
}

void write_sim_csv(std::ostream& out, const SimResult& result) {
  out << "replication,attempts,successes,P_s\n";
  for (std::size_t i = 0; i < result.replications.size(); ++i) {
    const ReplicationResult& r = result.replications[i];
    const double ps = r.attempts == 0 ? 1.0 : static_cast<double>(r.successes) / static_cast<double>(r.attempts);
    out << i << ',' << r.attempts << ',' << r.successes << ',' << num(ps) << '\n';
  }
}

std::string sim_json(const SimConfig& sim, const SimResult& r) {
  json reps = json::array();
  for (const ReplicationResult& rep : r.replications) reps.push_back({{"attempts", rep.attempts}, {"successes", rep.successes}});
  const json doc{{"schema", "stcmac.sim.v1"},
                 {"scenario", scenario_to_json_value(sim.scenario)},
                 {"slots", sim.num_slots},
                 {"warmup", sim.warmup_slots},
                 {"queue", to_string(sim.queue)},
                 {"replications", sim.replications},
                 {"seed", sim.seed},
                 {"attempts", r.attempts},
                 {"successes", r.successes},
                 {"P_s", r.P_s},
                 {"P_s_se", r.P_s_se},
                 {"P_s_ci95", r.P_s_ci},
                 {"observed_time", r.observed_time},
                 {"T_measured", r.throughput_measured},
                 {"T_model", r.throughput_model},
                 {"per_replication", reps}};
  return doc.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  const json doc{{"schema", "stcmac.manifest.v1"},
                 {"tool_version", m.tool_version},
                 {"subcommand", m.subcommand},
                 {"scenario", scenario_to_json_value(m.scenario)},
                 {"options", m.options},
                 {"seeds", m.seeds},
                 {"outputs", m.outputs},
                 {"csv_schema", m.csv_schema},
                 {"started_at", m.started_at},
                 {"wall_clock_seconds", m.wall_clock_seconds}};
  return doc.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<manifest>", e.what());
  }
  RunManifest m;
  try {
    m.tool_version = doc.value("tool_version", "");
    m.subcommand = doc.at("subcommand").get<std::string>();
    m.scenario = scenario_from_json_value(doc.at("scenario"));
    m.options = doc.value("options", std::map<std::string, std::string>{});
    m.seeds = doc.value("seeds", std::vector<std::uint64_t>{});
    m.outputs = doc.value("outputs", std::vector<std::string>{});
    m.csv_schema = doc.value("csv_schema", "");
    m.started_at = doc.value("started_at", "");
    m.wall_clock_seconds = doc.value("wall_clock_seconds", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError("<manifest>", e.what());
  }
  return m;
}

std::string scenario_json(const ScenarioConfig& cfg) { return scenario_to_json_value(cfg).dump(2) + "\n"; }

ScenarioConfig scenario_from_json(std::string_view text) {
  try {
    return scenario_from_json_value(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
}

}  // namespace stcmac
