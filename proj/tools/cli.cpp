#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "stcmac/analytics.hpp"
#include "stcmac/error.hpp"
#include "stcmac/io.hpp"
#include "stcmac/montecarlo.hpp"
#include "stcmac/simulator.hpp"

namespace stcmac::cli {
namespace {

namespace fs = std::filesystem;
using Options = std::map<std::string, std::string>;

struct Outcome {
  std::vector<std::string> outputs;
  std::vector<std::uint64_t> seeds;
  std::string csv_schema;
};

const std::string& require(const Options& o, const std::string& key) {
  const auto it = o.find(key);
  if (it == o.end()) throw ConfigError(key, "option missing");
  return it->second;
}

std::uint64_t get_count(const Options& o, const std::string& key) {
  const std::string& text = require(o, key);
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "'" + text + "' is not an integer");
  }
  if (used != text.size()) throw ConfigError(key, "'" + text + "' is not an integer");
  if (value < 0) throw ConfigError(key, "must be >= 0");
  return static_cast<std::uint64_t>(value);
}

double get_real(const Options& o, const std::string& key) {
  const std::string& text = require(o, key);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "'" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError(key, "'" + text + "' is not a number");
  return value;
}

WeightingMode get_weighting(const Options& o) {
  const auto w = parse_weighting(require(o, "weighting"));
  if (!w) throw ConfigError("weighting", "expected link or radial");
  return *w;
}

QueueMode get_queue(const Options& o) {
  const std::string& q = require(o, "queue");
  if (q == "gated") return QueueMode::Gated;
  if (q == "queued") return QueueMode::Queued;
  throw ConfigError("queue", "expected gated or queued");
}

SimConfig sim_config(const ScenarioConfig& cfg, const Options& o, unsigned threads) {
  SimConfig sim;
  sim.scenario = cfg;
  sim.num_slots = get_count(o, "slots");
  sim.warmup_slots = get_count(o, "warmup");
  sim.replications = get_count(o, "reps");
  sim.seed = get_count(o, "seed");
  sim.queue = get_queue(o);
  sim.threads = threads;
  validate(sim);
  return sim;
}

void write_file(const fs::path& path, const std::string& text, Outcome& outcome) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
  outcome.outputs.push_back(path.string());
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

Outcome do_analyze(const ScenarioConfig& cfg, const Options& o, const std::string& prefix, std::ostream& out) {
  const AnalyticResult r = analyze(cfg, {.weighting = get_weighting(o)});
  Outcome oc;
  oc.csv_schema = std::string(kAnalyzeCsvSchema);
  write_file(prefix + ".json", analytic_json(r), oc);
  write_file(prefix + ".csv", render([&](std::ostream& s) { write_analytic_csv(s, r); }), oc);
  fmt::print(out, "M = {}, K = {}, t_slot = {}, p_t = {}\nP_s = {}\nT = {}\n", r.max_offset, r.segments.size(),
             r.slot_length, r.p_t, r.P_s, r.throughput);
  return oc;
}

Outcome do_mc(const ScenarioConfig& cfg, const Options& o, const std::string& prefix, unsigned threads,
              std::ostream& out) {
  McConfig mc;
  mc.scenario = cfg;
  mc.runs = get_count(o, "runs");
  mc.seed = get_count(o, "seed");
  mc.threads = threads;
  const std::string& mode = require(o, "mode");
  if (mode == "table") {
    mc.mode = McMode::TableEstimate;
  } else if (mode == "ps") {
    mc.mode = McMode::GeneralPs;
  } else {
    throw ConfigError("mode", "expected table or ps");
  }
  validate(mc);
  const AnalyticOptions opts{.weighting = get_weighting(o)};

  Outcome oc;
  oc.seeds = {mc.seed};
  oc.csv_schema = std::string(kMcCsvSchema);
  if (mc.mode == McMode::TableEstimate) {
    ScenarioConfig two = cfg;
    two.num_nodes = 2;
    const AnalyticResult theory = analyze(two, opts);
    const McEstimate est = estimate_table(mc);
    write_file(prefix + ".json", mc_json(est, theory), oc);
    write_file(prefix + ".csv", render([&](std::ostream& s) { write_mc_csv(s, est, theory); }), oc);
    fmt::print(out, "runs = {}, K = {}\nP_s theo = {}, sim = {} (se {})\n", est.runs, est.segments.size(), theory.P_s,
               est.P_s.value, est.P_s.se);
  } else {
    const AnalyticResult theory = analyze(cfg, opts);
    const Estimate est = estimate_success_prob(mc);
    const nlohmann::json doc{{"schema", "stcmac.mc.v1"},
                             {"scenario", nlohmann::json::parse(scenario_json(cfg))},
                             {"runs", mc.runs},
                             {"seed", mc.seed},
                             {"mode", "ps"},
                             {"P_s", {{"theo", theory.P_s}, {"sim", {{"value", est.value}, {"se", est.se}, {"n", est.trials}}}}}};
    write_file(prefix + ".json", doc.dump(2) + "\n", oc);
    write_file(prefix + ".csv",
               fmt::format("quantity,dm,k,d_lo,d_hi,theo,sim,se,n\nP_s,,all,{},{},{},{},{},{}\n", 0.0,
                           cfg.coverage.max_range(), theory.P_s, est.value, est.se, est.trials),
               oc);
    fmt::print(out, "P_s theo = {}, sim = {} (se {})\n", theory.P_s, est.value, est.se);
  }
  return oc;
}

Outcome do_sim(const ScenarioConfig& cfg, const Options& o, const std::string& prefix, unsigned threads,
               std::ostream& out) {
  const SimConfig sim = sim_config(cfg, o, threads);
  const SimResult r = run(sim);
  Outcome oc;
  oc.seeds = {sim.seed};
  oc.csv_schema = std::string(kSimCsvSchema);
  write_file(prefix + ".json", sim_json(sim, r), oc);
  write_file(prefix + ".csv", render([&](std::ostream& s) { write_sim_csv(s, r); }), oc);
  fmt::print(out, "queue = {}, attempts = {}, successes = {}\nP_s = {} +/- {}\nT_model = {}, T_measured = {}\n",
             to_string(sim.queue), r.attempts, r.successes, r.P_s, r.P_s_ci, r.throughput_model,
             r.throughput_measured);
  return oc;
}

Outcome do_sweep(const ScenarioConfig& cfg, const Options& o, const std::string& prefix, unsigned threads,
                 std::ostream& out) {
  const auto param = parse_sweep_param(require(o, "param"));
  if (!param) throw ConfigError("param", "expected beta, tf, n or lambda");
  const std::string& engine = require(o, "engine");
  const bool want_theory = engine == "analytic" || engine == "both";
  const bool want_sim = engine == "sim" || engine == "both";
  if (!want_theory && !want_sim) throw ConfigError("engine", "expected analytic, sim or both");
  const double from = get_real(o, "from");
  const double to = get_real(o, "to");
  const std::uint64_t steps = get_count(o, "steps");
  const std::vector<double> grid = linear_grid(from, to, steps);
  // Validate every point before spending time on any of them.
  for (double x : grid) validate(with_param(cfg, *param, x));

  std::vector<SweepRow> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rows[i].param = grid[i];

  Outcome oc;
  oc.csv_schema = std::string(kSweepCsvSchema);
  if (want_theory) {
    const SweepResult s = sweep(cfg, *param, grid, {.weighting = get_weighting(o)}, threads);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows[i].P_s_theory = s.points[i].P_s;
      rows[i].T_theory = s.points[i].throughput;
    }
  }
  if (want_sim) {
    SimConfig base = sim_config(cfg, o, threads);
    oc.seeds = {base.seed};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      SimConfig sim = base;
      sim.scenario = with_param(cfg, *param, grid[i]);
      const SimResult r = run(sim);
      rows[i].P_s_sim = r.P_s;
      rows[i].P_s_sim_ci = r.P_s_ci;
      rows[i].T_sim = r.throughput_model;
    }
  }

  nlohmann::json points = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json p{{"param", r.param}};
    if (r.P_s_sim) p["P_s_sim"] = *r.P_s_sim;
    if (r.P_s_sim_ci) p["P_s_sim_ci"] = *r.P_s_sim_ci;
    if (r.T_sim) p["T_sim"] = *r.T_sim;
    if (r.P_s_theory) p["P_s_theory"] = *r.P_s_theory;
    if (r.T_theory) p["T_theory"] = *r.T_theory;
    points.push_back(std::move(p));
  }
  const nlohmann::json doc{{"schema", "stcmac.sweep.v1"},
                           {"scenario", nlohmann::json::parse(scenario_json(cfg))},
                           {"param", to_string(*param)},
                           {"engine", engine},
                           {"points", points}};
  write_file(prefix + ".json", doc.dump(2) + "\n", oc);
  write_file(prefix + ".csv", render([&](std::ostream& s) { write_sweep_csv(s, rows); }), oc);
  for (const SweepRow& r : rows) {
    fmt::print(out, "{:>10}  P_s theo {:<12} sim {:<12}  T theo {:<12} sim {}\n", r.param,
               r.P_s_theory ? fmt::format("{:.6f}", *r.P_s_theory) : "-",
               r.P_s_sim ? fmt::format("{:.6f}", *r.P_s_sim) : "-",
               r.T_theory ? fmt::format("{:.6f}", *r.T_theory) : "-", r.T_sim ? fmt::format("{:.6f}", *r.T_sim) : "-");
  }
  return oc;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs one subcommand and writes its manifest next to the outputs.
void execute(const std::string& sub, const ScenarioConfig& cfg, const Options& o, const std::string& prefix,
             unsigned threads, std::ostream& out) {
  RunManifest m;
  m.tool_version = version();
  m.subcommand = sub;
  m.scenario = cfg;
  m.options = o;
  m.started_at = utc_now();
  const auto start = std::chrono::steady_clock::now();

  Outcome oc;
  if (sub == "analyze") {
    oc = do_analyze(cfg, o, prefix, out);
  } else if (sub == "mc") {
    oc = do_mc(cfg, o, prefix, threads, out);
  } else if (sub == "sim") {
    oc = do_sim(cfg, o, prefix, threads, out);
  } else if (sub == "sweep") {
    oc = do_sweep(cfg, o, prefix, threads, out);
  } else {
    throw ConfigError("subcommand", "unknown subcommand '" + sub + "'");
  }

  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.seeds = oc.seeds;
  m.outputs = oc.outputs;
  m.csv_schema = oc.csv_schema;
  Outcome ignored;
  write_file(prefix + ".manifest.json", manifest_json(m), ignored);
  for (const std::string& path : oc.outputs) fmt::print(out, "wrote {}\n", path);
  fmt::print(out, "wrote {}.manifest.json\n", prefix);
}

std::string str(double x) { return fmt::format("{}", x); }
std::string str(std::uint64_t x) { return std::to_string(x); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Space-time collision model for slotted underwater acoustic MAC"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config;
  std::string prefix;
  unsigned threads = 0;
  std::string weighting = "link";
  std::uint64_t runs = 100000;
  std::uint64_t seed = 1;
  std::string mc_mode = "table";
  std::uint64_t slots = 100000;
  std::uint64_t warmup = 100;
  std::uint64_t reps = 1;
  std::string queue = "gated";
  std::string param;
  double from = 0.0;
  double to = 0.0;
  std::uint64_t steps = 11;
  std::string engine = "analytic";
  std::string manifest_path;

  auto common = [&](CLI::App* sub, const std::string& default_prefix) {
    sub->add_option("config", config, "Scenario file (key = value)")->required();
    sub->add_option("-o,--out", prefix, "Output path prefix; writes PREFIX.csv, PREFIX.json, PREFIX.manifest.json")
        ->default_str(default_prefix);
    sub->add_option("-j,--threads", threads, "Worker threads (0 = hardware concurrency)");
  };
  auto sim_flags = [&](CLI::App* sub) {
    sub->add_option("--slots", slots, "Slots per replication")->capture_default_str();
    sub->add_option("--warmup", warmup, "Leading slots excluded from the counters")->capture_default_str();
    sub->add_option("--reps", reps, "Independent replications")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed")->capture_default_str();
    sub->add_option("--queue", queue, "gated or queued")->capture_default_str();
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Closed-form per-segment probabilities, P_s and T");
  common(analyze_cmd, "analyze");
  analyze_cmd->add_option("--weighting", weighting, "link or radial")->capture_default_str();

  CLI::App* mc_cmd = app.add_subcommand("mc", "Geometric Monte Carlo check of the analytic tables");
  common(mc_cmd, "mc");
  mc_cmd->add_option("--runs", runs, "Monte Carlo runs")->capture_default_str();
  mc_cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
  mc_cmd->add_option("--mode", mc_mode, "table (two nodes, every cell) or ps (N nodes, P_s only)")
      ->capture_default_str();
  mc_cmd->add_option("--weighting", weighting, "Weighting for the theory column")->capture_default_str();

  CLI::App* sim_cmd = app.add_subcommand("sim", "Slotted ALOHA simulation with propagation delays");
  common(sim_cmd, "sim");
  sim_flags(sim_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter with the analytic model and/or simulator");
  common(sweep_cmd, "sweep");
  sweep_cmd->add_option("--param", param, "beta, tf, n or lambda")->required();
  sweep_cmd->add_option("--from", from, "First grid value")->required();
  sweep_cmd->add_option("--to", to, "Last grid value")->required();
  sweep_cmd->add_option("--steps", steps, "Number of grid points")->capture_default_str();
  sweep_cmd->add_option("--engine", engine, "analytic, sim or both")->capture_default_str();
  sweep_cmd->add_option("--weighting", weighting, "link or radial")->capture_default_str();
  sim_flags(sweep_cmd);

  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "Manifest written by an earlier run")->required();
  replay_cmd->add_option("-o,--out", prefix, "Output path prefix")->required();
  replay_cmd->add_option("-j,--threads", threads, "Worker threads (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay_cmd->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError("manifest", "cannot open " + manifest_path);
      const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const RunManifest m = parse_manifest(text);
      execute(m.subcommand, m.scenario, m.options, prefix, threads, out);
      return 0;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (prefix.empty()) prefix = name;
    const ScenarioConfig cfg = load_scenario(config);

    Options o;
    if (name == "analyze") {
      o = {{"weighting", weighting}};
    } else if (name == "mc") {
      o = {{"runs", str(runs)}, {"seed", str(seed)}, {"mode", mc_mode}, {"weighting", weighting}};
    } else {
      o = {{"slots", str(slots)}, {"warmup", str(warmup)}, {"reps", str(reps)}, {"seed", str(seed)}, {"queue", queue}};
      if (name == "sweep") {
        o.insert({{"param", param},
                  {"from", str(from)},
                  {"to", str(to)},
                  {"steps", str(steps)},
                  {"engine", engine},
                  {"weighting", weighting}});
      }
    }
    execute(name, cfg, o, prefix, threads, out);
    return 0;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: invalid {}: {}\n", e.field(), e.what());
    return 2;
  } catch (const NumericError& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace stcmac::cli
