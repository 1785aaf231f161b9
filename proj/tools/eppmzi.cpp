// Command-line front end: `simulate` runs a YAML scenario, `analyze` re-runs the analysis on
// interferogram CSV files written by earlier runs.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "eppmzi/eppmzi.hpp"
#include "eppmzi/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool validate_only = false;
};

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string reference;
  std::string out;
  double reference_nm = 633.0;
  double center_nm = 532.0;
  double length_mm = 0.0;
  std::string window = "none";
  std::size_t zero_pad = 1;
};

int run_simulate(const SimulateArgs& args) {
  auto cfg = eppmzi::load_scenario(args.config);
  if (!args.out.empty()) cfg.output_directory = args.out;
  if (args.seed) cfg.noise.seed = *args.seed;
  eppmzi::validate(cfg);
  if (cfg.source.kind == "file" && !fs::exists(cfg.source.path))
    throw eppmzi::ConfigError("source.path", "file not found: " + cfg.source.path.string());
  if (args.validate_only) {
    std::cout << "config ok: " << args.config << '\n';
    return kExitOk;
  }
  const auto result = eppmzi::run_scenario(cfg);
  for (const auto& f : result.files) std::cout << f.generic_string() << '\n';
  return kExitOk;
}

eppmzi::ComplexInterferogram complex_from(const eppmzi::CsvTable& t, const fs::path& path) {
  eppmzi::ComplexInterferogram z;
  z.tau = t.column("tau_fs");
  const auto& re = t.column("re");
  const auto& im = t.column("im");
  for (std::size_t k = 0; k < re.size(); ++k) z.values.emplace_back(re[k], im[k]);
  z.harmonic = path.stem().string().find("2f") != std::string::npos ? eppmzi::Harmonic::Z2f : eppmzi::Harmonic::Z1f;
  return z;
}

template <typename Fn>
void attempt(ordered_json& report, const std::string& key, Fn&& fn) {
  try {
    report[key] = fn();
  } catch (const std::exception& e) {
    report[key] = nullptr;
    report["notes"].push_back(key + ": " + e.what());
  }
}

int run_analyze(const AnalyzeArgs& args) {
  if (args.window != "none" && args.window != "hann") throw eppmzi::ConfigError("--window", "must be none or hann");
  const eppmzi::FftOptions fft{args.window == "hann" ? eppmzi::Window::Hann : eppmzi::Window::None, args.zero_pad,
                               false};
  const double omega_R = eppmzi::omega_from_wavelength(args.reference_nm);
  const double omega_0 = eppmzi::omega_from_wavelength(args.center_nm);
  if (!args.out.empty()) fs::create_directories(args.out);

  std::optional<eppmzi::RecoveredSpectrum> reference;
  if (!args.reference.empty()) {
    const auto t = eppmzi::read_csv(args.reference);
    reference = eppmzi::fft_interferogram(complex_from(t, args.reference), omega_R, fft);
  }

  ordered_json all = ordered_json::array();
  for (const auto& input : args.inputs) {
    const fs::path path(input);
    const auto table = eppmzi::read_csv(path);
    ordered_json report;
    report["file"] = path.generic_string();
    report["notes"] = ordered_json::array();
    std::optional<eppmzi::RecoveredSpectrum> spectrum;
    if (table.has_column("re") && table.has_column("im")) {
      const auto z = complex_from(table, path);
      report["harmonic"] = eppmzi::harmonic_order(z.harmonic);
      const auto centered = eppmzi::remove_linear_phase(z);
      report["group_delay_fs"] = centered.group_delay;
      spectrum = eppmzi::fft_interferogram(centered.centered, omega_R, fft);
      if (args.length_mm > 0.0 && z.harmonic == eppmzi::Harmonic::Z1f) {
        attempt(report, "gvd", [&] {
          auto fit = eppmzi::fit_gvd(*spectrum, args.length_mm);
          fit.group_delay_removed = centered.group_delay;
          return eppmzi::detail::gvd_json(fit);
        });
      }
      if (reference) {
        attempt(report, "sample_response", [&] {
          const auto response =
              eppmzi::recover_sample_response(eppmzi::fft_interferogram(z, omega_R, fft), *reference);
          if (!args.out.empty())
            eppmzi::write_csv(fs::path(args.out) / (path.stem().string() + "_response.csv"),
                              eppmzi::detail::spectrum_table(response));
          return ordered_json{{"valid_samples",
                               std::count(response.valid_mask.begin(), response.valid_mask.end(), std::uint8_t{1})}};
        });
      }
    } else if (table.has_column("rate")) {
      const eppmzi::Interferogram ifg{table.column("tau_fs"), table.column("rate")};
      attempt(report, "peak", [&] { return eppmzi::detail::peak_json(eppmzi::peak_metrics(ifg)); });
      attempt(report, "visibility", [&] { return ordered_json(eppmzi::fit_balanced_fringes(ifg, omega_0)); });
      auto opts = fft;
      opts.subtract_mean = true;
      spectrum = eppmzi::fft_interferogram(ifg, opts);
    } else {
      throw std::runtime_error(path.string() + ": expected columns tau_fs,rate or tau_fs,re,im");
    }
    if (spectrum && !args.out.empty())
      eppmzi::write_csv(fs::path(args.out) / (path.stem().string() + "_spectrum.csv"),
                        eppmzi::detail::spectrum_table(*spectrum));
    all.push_back(report);
  }
  std::cout << all.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-modulated two-photon interferometry simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario config and write CSV, SVG and fit_report.json");
  simulate->add_option("config", sim.config, "Scenario YAML file")->required();
  simulate->add_option("--out", sim.out, "Output directory (overrides outputs.directory)");
  simulate->add_option("--seed", sim.seed, "Noise seed (overrides noise.seed)");
  simulate->add_flag("--validate", sim.validate_only, "Check the config and exit without simulating");

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "Re-run the analysis on interferogram CSV files");
  analyze->add_option("csv", ana.inputs, "Interferogram CSV files")->required();
  analyze->add_option("--reference", ana.reference, "No-sample 1f CSV used to divide out the source");
  analyze->add_option("--out", ana.out, "Directory for recovered spectra");
  analyze->add_option("--reference-nm", ana.reference_nm, "Modulation reference wavelength")->capture_default_str();
  analyze->add_option("--center-nm", ana.center_nm, "Degenerate center wavelength")->capture_default_str();
  analyze->add_option("--length-mm", ana.length_mm, "Sample length; enables the GVD fit on 1f files");
  analyze->add_option("--window", ana.window, "FFT window: none or hann")->capture_default_str();
  analyze->add_option("--zero-pad", ana.zero_pad, "Zero-padding factor")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim);
    return run_analyze(ana);
  } catch (const eppmzi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
