#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "eppmzi/scenario.hpp"

namespace fs = std::filesystem;
using namespace eppmzi;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with stderr folded into the captured output.
CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(EPPMZI_CLI_PATH) + " " + args + " 2>&1";
  CommandResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("eppmzi_scenario_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string bundled(const std::string& name) { return std::string(EPPMZI_CONFIG_DIR) + "/" + name + ".yaml"; }

ConfigError parse_error(const std::string& yaml) {
  try {
    parse_scenario(YAML::Load(yaml));
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError for:\n" << yaml;
  return ConfigError("", "");
}

}  // namespace

TEST(ScenarioConfig, StepDefaultsFollowScanMode) {
  EXPECT_DOUBLE_EQ(parse_scenario(YAML::Load("scan: {mode: downsampled}")).scan.step_nm, 150.0);
  EXPECT_DOUBLE_EQ(parse_scenario(YAML::Load("scan: {mode: fully_sampled}")).scan.step_nm, 15.0);
  const auto c = parse_scenario(YAML::Load("scan: {mode: fully_sampled, step_nm: 30}"));
  EXPECT_DOUBLE_EQ(c.scan.step_nm, 30.0);
  EXPECT_DOUBLE_EQ(c.mzi.reference_nm, 633.0);
  EXPECT_EQ(c.grid.points, 4096u);
}

TEST(ScenarioConfig, ErrorsNameTheOffendingField) {
  EXPECT_EQ(parse_error("scan: {step_nm: 0}").field(), "scan.step_nm");
  EXPECT_EQ(parse_error("scan: {tau_span_fs: -1}").field(), "scan.tau_span_fs");
  EXPECT_EQ(parse_error("scan: {mode: sideways}").field(), "scan.mode");
  EXPECT_EQ(parse_error("source: {fwhm_nm: abc}").field(), "source.fwhm_nm");
  EXPECT_EQ(parse_error("source: {kind: file}").field(), "source.path");
  EXPECT_EQ(parse_error("sample: {kind: slab, length_mm: 0}").field(), "sample.length_mm");
  EXPECT_EQ(parse_error("sample: {kind: notch, width_rad_per_fs: 0}").field(), "sample.width_rad_per_fs");
  EXPECT_EQ(parse_error("mzi: {r: 0.6, t: 0.6}").field(), "mzi.t");
  EXPECT_EQ(parse_error("noise: {poisson: true, counts_per_step: 0}").field(), "noise.counts_per_step");
  EXPECT_EQ(parse_error("scan: {step_mm: 3}").field(), "scan.step_mm");
  EXPECT_EQ(parse_error("sampel: {kind: none}").field(), "sampel");
  EXPECT_EQ(parse_error("analysis: {window: kaiser}").field(), "analysis.window");
  const std::string msg = parse_error("scan: {step_nm: 0}").what();
  EXPECT_NE(msg.find("scan.step_nm"), std::string::npos);
}

TEST(ScenarioConfig, SingleSplitterAmplitudeFixesTheOther) {
  const auto c = parse_scenario(YAML::Load("mzi: {r: 0.6}"));
  EXPECT_NEAR(c.mzi.t, 0.8, 1e-15);
}

TEST(ScenarioConfig, FilePathResolvesAgainstConfigDirectory) {
  const auto c = parse_scenario(YAML::Load("source: {kind: file, path: lamp.csv}"), "/data/run1");
  EXPECT_EQ(c.source.path, fs::path("/data/run1/lamp.csv"));
}

TEST(ScenarioConfig, ResolvedConfigRoundTripsThroughJson) {
  const auto c = parse_scenario(YAML::Load("sample: {kind: slab, gvd_fs2_per_mm: 75.970}"));
  const auto j = to_json(c);
  EXPECT_DOUBLE_EQ(j["sample"]["gvd_fs2_per_mm"].get<double>(), 75.970);
  EXPECT_EQ(j["scan"]["mode"], "downsampled");
}

TEST(ScenarioRun, NoSampleScenarioHasConstantTwoFAmplitude) {
  auto c = load_scenario(bundled("no_sample"));
  c.output_directory = scratch_dir("no_sample");
  const auto result = run_scenario(c);
  const auto comp2 = read_csv(c.output_directory / "comp_2f.csv");
  ASSERT_GT(comp2.rows(), 100u);
  for (double a : comp2.column("amp")) EXPECT_NEAR(a, 0.5, 1e-9);
  for (const char* f : {"comp_0f.csv", "comp_0f.svg", "comp_1f.csv", "comp_1f.svg", "comp_2f.svg",
                        "spectrum_recovered.csv", "spectrum_recovered.svg", "fit_report.json"})
    EXPECT_TRUE(fs::exists(c.output_directory / f)) << f;
  EXPECT_NEAR(result.report["peak_0f"]["peak_to_baseline"].get<double>(), 1.5, 1e-6);
}

TEST(ScenarioRun, FullySampledScenarioReportsVisibility) {
  auto c = parse_scenario(YAML::Load("scan: {mode: fully_sampled, tau_span_fs: 100}"));
  c.output_directory = scratch_dir("fully_sampled");
  const auto result = run_scenario(c);
  const auto full = read_csv(c.output_directory / "fully_sampled.csv");
  EXPECT_EQ(full.header, (std::vector<std::string>{"tau_fs", "rate"}));
  EXPECT_TRUE(fs::exists(c.output_directory / "fully_sampled.svg"));
  EXPECT_GT(result.report["visibility"].get<double>(), 0.98);
}

TEST(ScenarioRun, ReportEmbedsResolvedConfig) {
  auto c = parse_scenario(YAML::Load("scan: {tau_span_fs: 200}\nnoise: {seed: 42}"));
  c.output_directory = scratch_dir("report");
  run_scenario(c);
  std::ifstream in(c.output_directory / "fit_report.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["config"]["noise"]["seed"], 42);
  EXPECT_DOUBLE_EQ(j["config"]["scan"]["tau_span_fs"].get<double>(), 200.0);
}

TEST(ScenarioRun, UnwritableDirectoryIsRuntimeError) {
  const auto dir = scratch_dir("blocked");
  write_file(dir / "file", "x");
  auto c = parse_scenario(YAML::Load("scan: {tau_span_fs: 50}"));
  c.output_directory = dir / "file" / "sub";
  EXPECT_THROW(run_scenario(c), std::runtime_error);
}

TEST(Cli, ZeroStepExitsWithConfigErrorNamingField) {
  const auto dir = scratch_dir("cli_zero_step");
  const auto cfg = write_file(dir / "bad.yaml", "scan:\n  step_nm: 0\n");
  const auto r = run_cli("simulate " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("scan.step_nm"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, ValidateIsSideEffectFree) {
  const auto dir = scratch_dir("cli_validate");
  const auto r = run_cli("simulate " + bundled("quartz") + " --validate --out " + (dir / "out").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, MissingConfigAndBadUsage) {
  EXPECT_EQ(run_cli("simulate /nonexistent/config.yaml").exit_code, 2);
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("analyze /nonexistent/comp_1f.csv").exit_code, 3);
}

TEST(Cli, QuartzScenarioRecoversGvdAndAnalyzeAgrees) {
  const auto dir = scratch_dir("cli_quartz");
  const auto r = run_cli("simulate " + bundled("quartz") + " --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::ifstream in(dir / "fit_report.json");
  const auto report = nlohmann::json::parse(in);
  EXPECT_NEAR(report["gvd"]["gvd_fs2_per_mm"].get<double>(), 75.970, 0.01 * 75.970);

  const auto a = run_cli("analyze " + (dir / "comp_1f.csv").string() + " --length-mm 30.8");
  ASSERT_EQ(a.exit_code, 0) << a.output;
  const auto j = nlohmann::json::parse(a.output);
  EXPECT_NEAR(j[0]["gvd"]["gvd_fs2_per_mm"].get<double>(), report["gvd"]["gvd_fs2_per_mm"].get<double>(), 1e-9);
}

TEST(Cli, AnalyzeRateFileAndReference) {
  const auto dir = scratch_dir("cli_analyze");
  auto c = parse_scenario(YAML::Load("sample: {kind: slab}\nscan: {tau_span_fs: 300}"));
  c.output_directory = dir / "sample";
  run_scenario(c);
  c.sample.kind = "none";
  c.output_directory = dir / "reference";
  run_scenario(c);
  const auto a = run_cli("analyze " + (dir / "sample" / "comp_0f.csv").string() + " " +
                         (dir / "sample" / "comp_1f.csv").string() + " --reference " +
                         (dir / "reference" / "comp_1f.csv").string() + " --out " + (dir / "analysis").string());
  ASSERT_EQ(a.exit_code, 0) << a.output;
  const auto j = nlohmann::json::parse(a.output);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_NEAR(j[0]["peak"]["peak_to_baseline"].get<double>(), 1.5, 0.01);
  EXPECT_GT(j[1]["sample_response"]["valid_samples"].get<int>(), 10);
  EXPECT_TRUE(fs::exists(dir / "analysis" / "comp_1f_response.csv"));
  EXPECT_TRUE(fs::exists(dir / "analysis" / "comp_1f_spectrum.csv"));
}
