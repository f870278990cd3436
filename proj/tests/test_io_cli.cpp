#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "stcmac/error.hpp"
#include "stcmac/io.hpp"
#include "support.hpp"

using namespace stcmac;
namespace fs = std::filesystem;

namespace {

const fs::path kData = STCMAC_TEST_DATA_DIR;
const fs::path kGolden = STCMAC_TEST_GOLDEN_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line + "\n";
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "stcmac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = stcmac::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("stcmac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

std::string parse_error_field(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST(ConfigFile, DefaultsAndComments) {
  const ScenarioConfig cfg = parse("# comment\n t_f = 0.9  # trailing\nbeta=0.6\n\nlambda = 0.1\nn_nodes = 10\n");
  EXPECT_EQ(cfg.sound_speed, 1500.0);
  EXPECT_EQ(cfg.coverage, Coverage::disk(1500.0));
  EXPECT_EQ(cfg.packet_duration, 0.9);
  EXPECT_EQ(cfg.guard_coefficient, 0.6);
  EXPECT_EQ(cfg.num_nodes, 10);
}

TEST(ConfigFile, EllipseWhenAlphaAboveOne) {
  const ScenarioConfig cfg = load_scenario(kData / "ellipse.cfg");
  EXPECT_EQ(cfg.coverage.shape(), Shape::Ellipse);
  EXPECT_EQ(cfg.coverage.alpha(), 1.5);
}

TEST(ConfigFile, NormalizedTables) {
  const ScenarioConfig cfg = load_scenario(kData / "table2.cfg");
  EXPECT_EQ(cfg.tau(), 1.0);
  EXPECT_EQ(cfg.slot_length(), 0.5);
}

TEST(ConfigFile, FieldLevelErrors) {
  EXPECT_EQ(parse_error_field("beta = 0.6\nlambda = 0.1\nn_nodes = 2\n"), "t_f");
  EXPECT_EQ(parse_error_field("t_f = 0.9\nbeta = 0.6\nlambda = 0.1\nn_nodes = 2\ngamma = 1\n"), "gamma");
  EXPECT_EQ(parse_error_field("t_f = fast\nbeta = 0.6\nlambda = 0.1\nn_nodes = 2\n"), "t_f");
  EXPECT_EQ(parse_error_field("t_f = 0.9\nt_f = 0.8\nbeta = 0.6\nlambda = 0.1\nn_nodes = 2\n"), "t_f");
  EXPECT_EQ(parse_error_field("t_f = 0.9\nbeta = 0.6\nlambda = 0.1\nn_nodes = 2.5\n"), "n_nodes");
  EXPECT_EQ(parse_error_field("t_f = 0.9\nbeta = -1\nlambda = 0.1\nn_nodes = 2\n"), "beta");
  EXPECT_EQ(parse_error_field("t_f = 0.9\nbeta = 0.6\nlambda = 0.1\nn_nodes = 2\nalpha = 0.5\n"), "alpha");
  EXPECT_EQ(parse_error_field("t_f 0.9\n"), "<syntax>");
  EXPECT_THROW(load_scenario(kData / "missing.cfg"), ConfigError);
}

TEST(ConfigFile, FormatRoundTrips) {
  const ScenarioConfig cfg = testing_support::physical(0.37, 0.61, 0.07, 9, 1.5);
  const ScenarioConfig back = parse(format_scenario(cfg));
  EXPECT_EQ(back.packet_duration, cfg.packet_duration);
  EXPECT_EQ(back.guard_coefficient, cfg.guard_coefficient);
  EXPECT_EQ(back.arrival_rate, cfg.arrival_rate);
  EXPECT_EQ(back.coverage, cfg.coverage);
  EXPECT_EQ(back.num_nodes, cfg.num_nodes);
  const ScenarioConfig json_back = scenario_from_json(scenario_json(cfg));
  EXPECT_EQ(json_back.coverage, cfg.coverage);
  EXPECT_EQ(json_back.packet_duration, cfg.packet_duration);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.tool_version = version();
  m.subcommand = "mc";
  m.scenario = testing_support::table3();
  m.options = {{"runs", "100"}, {"seed", "18446744073709551615"}};
  m.seeds = {18446744073709551615ull};
  m.outputs = {"a.csv", "a.json"};
  m.csv_schema = std::string(kMcCsvSchema);
  const RunManifest back = parse_manifest(manifest_json(m));
  EXPECT_EQ(back.subcommand, "mc");
  EXPECT_EQ(back.options, m.options);
  EXPECT_EQ(back.seeds, m.seeds);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_EQ(back.csv_schema, m.csv_schema);
  EXPECT_EQ(back.scenario.packet_duration, 0.7);
  EXPECT_THROW(parse_manifest("{not json"), ConfigError);
}

TEST(Schemas, MatchGolden) {
  const std::string want = slurp(kGolden / "schemas.txt");
  const std::string got = std::string(kAnalyzeCsvSchema) + "\n" + std::string(kMcCsvSchema) + "\n" +
                          std::string(kSweepCsvSchema) + "\n" + std::string(kSimCsvSchema) + "\n";
  EXPECT_EQ(got, want);
}

TEST_F(CliTest, AnalyzeWritesOutputsAndManifest) {
  const auto r = run_cli({"analyze", (kData / "table2.cfg").string(), "-o", at("t2")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(at("t2.csv")), slurp(kGolden / "analyze.header"));
  const auto doc = nlohmann::json::parse(slurp(at("t2.json")));
  EXPECT_EQ(doc["M"], 2);
  EXPECT_EQ(doc["K"], 5);
  EXPECT_NEAR(doc["segments"][0]["p_z"]["1"].get<double>(), 0.2265, 5e-3);
  const auto manifest = parse_manifest(slurp(at("t2.manifest.json")));
  EXPECT_EQ(manifest.subcommand, "analyze");
  EXPECT_EQ(manifest.csv_schema, kAnalyzeCsvSchema);
  EXPECT_EQ(manifest.options.at("weighting"), "link");
  EXPECT_EQ(manifest.outputs.size(), 2u);
}

TEST_F(CliTest, AnalyzeIsBitReproducibleAndReplayable) {
  ASSERT_EQ(run_cli({"analyze", (kData / "table3.cfg").string(), "-o", at("a")}).code, 0);
  ASSERT_EQ(run_cli({"analyze", (kData / "table3.cfg").string(), "-o", at("b")}).code, 0);
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("b.csv")));
  EXPECT_EQ(slurp(at("a.json")), slurp(at("b.json")));
  ASSERT_EQ(run_cli({"replay", at("a.manifest.json"), "-o", at("c")}).code, 0);
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("c.csv")));
  EXPECT_EQ(slurp(at("a.json")), slurp(at("c.json")));
}

TEST_F(CliTest, AnalyzeNoInterSlotCase) {
  std::ofstream(at("b1.cfg")) << "t_f = 1\nbeta = 1\nlambda = 0.1\nn_nodes = 5\n";
  ASSERT_EQ(run_cli({"analyze", at("b1.cfg"), "-o", at("b1")}).code, 0);
  const auto doc = nlohmann::json::parse(slurp(at("b1.json")));
  EXPECT_EQ(doc["M"], 0);
  EXPECT_EQ(doc["K"], 1);
}

TEST_F(CliTest, ExitCodes) {
  std::ofstream(at("bad.cfg")) << "t_f = 0.9\nbeta = 0.6\n";
  auto r = run_cli({"analyze", at("bad.cfg"), "-o", at("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lambda"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"analyze", at("nope.cfg")}).code, 2);
  EXPECT_EQ(run_cli({"analyze", (kData / "table2.cfg").string(), "--weighting", "cubic", "-o", at("x")}).code, 2);
  EXPECT_EQ(run_cli({"mc", (kData / "table2.cfg").string(), "--runs", "0", "-o", at("x")}).code, 2);
  EXPECT_EQ(run_cli({"mc", (kData / "table2.cfg").string(), "--runs", "many", "-o", at("x")}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"sweep", (kData / "table2.cfg").string(), "--param", "n", "--from", "2", "--to", "3", "--steps", "3",
                 "-o", at("x")})
                .code,
            2);
  EXPECT_EQ(run_cli({"sim", (kData / "table2.cfg").string(), "--slots", "10", "--warmup", "10", "-o", at("x")}).code, 2);
}

TEST_F(CliTest, McDeterministicForSeed) {
  const std::string cfg = (kData / "table3.cfg").string();
  ASSERT_EQ(run_cli({"mc", cfg, "--runs", "100000", "--seed", "42", "-o", at("a")}).code, 0);
  ASSERT_EQ(run_cli({"mc", cfg, "--runs", "100000", "--seed", "42", "-o", at("b")}).code, 0);
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("b.csv")));
  EXPECT_EQ(slurp(at("a.json")), slurp(at("b.json")));
  EXPECT_EQ(first_line(at("a.csv")), slurp(kGolden / "mc.header"));
  ASSERT_EQ(run_cli({"replay", at("a.manifest.json"), "-o", at("c")}).code, 0);
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("c.csv")));
  const auto m = parse_manifest(slurp(at("a.manifest.json")));
  EXPECT_EQ(m.seeds, std::vector<std::uint64_t>{42});
}

TEST_F(CliTest, McSuccessMode) {
  const auto r = run_cli({"mc", (kData / "table2.cfg").string(), "--runs", "5000", "--mode", "ps", "-o", at("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(at("p.csv")), slurp(kGolden / "mc.header"));
}

TEST_F(CliTest, SimDefaultsAndQueueMode) {
  const std::string cfg = (kData / "figure_point.cfg").string();
  ASSERT_EQ(run_cli({"sim", cfg, "--slots", "3000", "-o", at("g")}).code, 0);
  ASSERT_EQ(run_cli({"sim", cfg, "--slots", "3000", "--queue", "queued", "-o", at("q")}).code, 0);
  EXPECT_NE(slurp(at("g.json")), slurp(at("q.json")));
  EXPECT_EQ(parse_manifest(slurp(at("q.manifest.json"))).options.at("queue"), "queued");
  EXPECT_EQ(first_line(at("g.csv")), slurp(kGolden / "sim.header"));

  // --slots omitted: documented default of 100000.
  ASSERT_EQ(run_cli({"sim", cfg, "-o", at("d")}).code, 0);
  const auto m = parse_manifest(slurp(at("d.manifest.json")));
  EXPECT_EQ(m.options.at("slots"), "100000");
  EXPECT_EQ(nlohmann::json::parse(slurp(at("d.json")))["slots"], 100000);
}

TEST_F(CliTest, SimCloseToAnalyze) {
  const std::string cfg = (kData / "figure_point.cfg").string();
  // Placement dominates the variance, so many short replications.
  ASSERT_EQ(run_cli({"sim", cfg, "--reps", "600", "--slots", "1000", "-o", at("s")}).code, 0);
  ASSERT_EQ(run_cli({"analyze", cfg, "-o", at("a")}).code, 0);
  const double sim = nlohmann::json::parse(slurp(at("s.json")))["P_s"];
  const double theory = nlohmann::json::parse(slurp(at("a.json")))["P_s"];
  EXPECT_LT(std::abs(sim - theory) / theory, 0.05);
}

TEST_F(CliTest, SweepAnalyticBeta) {
  const auto r = run_cli({"sweep", (kData / "figure_point.cfg").string(), "--param", "beta", "--from", "0", "--to", "0.9",
                      "--steps", "10", "-o", at("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(at("s.csv")), slurp(kGolden / "sweep.header"));
  const auto doc = nlohmann::json::parse(slurp(at("s.json")));
  const auto& pts = doc["points"];
  ASSERT_EQ(pts.size(), 10u);
  EXPECT_NEAR(pts.front()["P_s_theory"].get<double>(), pts.back()["P_s_theory"].get<double>(), 1e-9);
  EXPECT_FALSE(pts.front().contains("P_s_sim"));
}

TEST_F(CliTest, SweepBothEngines) {
  const auto r = run_cli({"sweep", (kData / "figure_point.cfg").string(), "--param", "n", "--from", "4", "--to", "8",
                      "--steps", "3", "--engine", "both", "--reps", "4", "--slots", "4000", "-o", at("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(at("s.json")));
  for (const auto& p : doc["points"]) {
    const double sim = p["P_s_sim"];
    const double theory = p["P_s_theory"];
    EXPECT_LT(std::abs(sim - theory), 4.0 * p["P_s_sim_ci"].get<double>() + 0.02);
  }
}
