#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "eppmzi/analysis.hpp"
#include "eppmzi/demodulation.hpp"
#include "eppmzi/diagnostics.hpp"
#include "eppmzi/interferometer.hpp"
#include "eppmzi/io.hpp"
#include "eppmzi/media.hpp"
#include "eppmzi/spectra.hpp"
#include "eppmzi/units.hpp"

namespace eppmzi {

/// Invalid scenario configuration; `field` is the dotted key path, e.g. "scan.step_nm".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SourceConfig {
  std::string kind = "gaussian";  // gaussian | supergaussian | file
  double center_nm = 532.0;
  double fwhm_nm = 15.0;  // for kind=file this only sets the grid span
  int order = 2;
  std::filesystem::path path;  // resolved against the config file's directory
};

struct GridConfig {
  std::size_t points = 4096;
  double span_fwhm = 8.0;  // grid span in units of the source FWHM
};

struct SampleConfig {
  std::string kind = "none";  // none | slab | notch
  SlabParams slab;
  NotchParams notch;
};

struct ScanConfig {
  std::string mode = "downsampled";  // fully_sampled | downsampled
  double step_nm = 150.0;
  double tau_span_fs = 600.0;  // scan covers [-tau_span_fs, +tau_span_fs]
};

struct MziSettings {
  double r = std::numbers::sqrt2 / 2.0;
  double t = std::numbers::sqrt2 / 2.0;
  double reference_nm = 633.0;
  double nu21_khz = 20.0;
};

struct LockinSettings {
  std::size_t samples_per_period = 256;
  double dwell_ms = 1.0;
};

struct NoiseSettings {
  bool poisson = false;
  double counts_per_step = 1.0e5;  // mean counts per delay step at the off-balance level
  double phase_jitter_rad = 0.0;   // random-walk step per sample
  std::uint64_t seed = 1;
};

struct AnalysisSettings {
  Window window = Window::None;
  std::size_t zero_pad = 1;
  bool reference_run = true;  // emit sample_response.csv from an extra no-sample run
};

struct ScenarioConfig {
  SourceConfig source;
  GridConfig grid;
  SampleConfig sample;
  ScanConfig scan;
  MziSettings mzi;
  LockinSettings lockin;
  NoiseSettings noise;
  AnalysisSettings analysis;
  std::filesystem::path output_directory = "out";
};

namespace detail {

template <typename T>
T yaml_get(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot read value '" + YAML::Dump(node) + "'");
  }
}

class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(name_, "expected a table of keys");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const auto child = node_[key];
    if (child) out = yaml_get<T>(child, field(key));
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace detail

/// Field-level checks; throws ConfigError naming the first offending key.
inline void validate(const ScenarioConfig& c) {
  using detail::require;
  const auto& s = c.source;
  require(s.kind == "gaussian" || s.kind == "supergaussian" || s.kind == "file", "source.kind",
          "must be gaussian, supergaussian or file");
  require(s.center_nm > 0.0, "source.center_nm", "must be > 0");
  require(s.fwhm_nm > 0.0 && s.fwhm_nm < 2.0 * s.center_nm, "source.fwhm_nm", "must be > 0 and below twice the center");
  if (s.kind == "supergaussian") require(s.order >= 1, "source.order", "must be >= 1");
  if (s.kind == "file") require(!s.path.empty(), "source.path", "required when source.kind is file");

  require(c.grid.points >= 16 && c.grid.points % 2 == 0, "grid.points", "must be even and >= 16");
  require(c.grid.span_fwhm > 0.0, "grid.span_fwhm", "must be > 0");
  const double span = c.grid.span_fwhm * fwhm_omega_from_wavelength(s.center_nm, s.fwhm_nm);
  require(span < 2.0 * omega_from_wavelength(s.center_nm), "grid.span_fwhm",
          "grid reaches zero frequency; reduce the span");

  const auto& m = c.sample;
  require(m.kind == "none" || m.kind == "slab" || m.kind == "notch", "sample.kind", "must be none, slab or notch");
  if (m.kind == "slab") {
    require(m.slab.length_mm > 0.0, "sample.length_mm", "must be > 0");
    require(std::isfinite(m.slab.half_gvd), "sample.gvd_fs2_per_mm", "must be finite");
    require(std::isfinite(m.slab.inv_group_velocity), "sample.inv_group_velocity_fs_per_mm", "must be finite");
    require(std::isfinite(m.slab.third_order), "sample.third_order_fs3_per_mm", "must be finite");
  }
  if (m.kind == "notch") {
    require(m.notch.center > 0.0, "sample.center_rad_per_fs", "must be > 0");
    require(m.notch.width > 0.0, "sample.width_rad_per_fs", "must be > 0");
    require(m.notch.steepness > 0.0, "sample.steepness_fs2", "must be > 0");
  }

  require(c.scan.mode == "fully_sampled" || c.scan.mode == "downsampled", "scan.mode",
          "must be fully_sampled or downsampled");
  require(c.scan.step_nm > 0.0 && std::isfinite(c.scan.step_nm), "scan.step_nm", "must be > 0");
  require(c.scan.tau_span_fs > 0.0 && std::isfinite(c.scan.tau_span_fs), "scan.tau_span_fs", "must be > 0");
  require(c.scan.tau_span_fs >= convert_path_step(c.scan.step_nm), "scan.tau_span_fs",
          "must cover at least one delay step");

  require(c.mzi.r > 0.0 && c.mzi.r < 1.0, "mzi.r", "must lie in (0, 1)");
  require(c.mzi.t > 0.0 && c.mzi.t < 1.0, "mzi.t", "must lie in (0, 1)");
  require(std::abs(c.mzi.r * c.mzi.r + c.mzi.t * c.mzi.t - 1.0) < 1e-9, "mzi.t", "r^2 + t^2 must equal 1");
  require(c.mzi.reference_nm > 0.0, "mzi.reference_nm", "must be > 0");
  require(c.mzi.nu21_khz > 0.0, "mzi.nu21_khz", "must be > 0");

  require(c.lockin.samples_per_period >= 16, "lockin.samples_per_period", "must be >= 16");
  require(c.lockin.dwell_ms > 0.0, "lockin.dwell_ms", "must be > 0");
  require(c.lockin.dwell_ms * c.mzi.nu21_khz >= 1.0, "lockin.dwell_ms", "must span at least one modulation period");

  if (c.noise.poisson) require(c.noise.counts_per_step > 0.0, "noise.counts_per_step", "must be > 0");
  require(c.noise.phase_jitter_rad >= 0.0, "noise.phase_jitter_rad", "must be >= 0");

  require(c.analysis.zero_pad >= 1, "analysis.zero_pad", "must be >= 1");
  require(!c.output_directory.empty(), "outputs.directory", "must not be empty");
}

/// Reads a YAML scenario. Omitted keys keep their defaults; the scan step defaults to 15 nm
/// for fully-sampled and 150 nm for down-sampled scans.
inline ScenarioConfig parse_scenario(const YAML::Node& root, const std::filesystem::path& base_dir = {}) {
  if (!root || root.IsNull()) throw ConfigError("(root)", "empty configuration");
  if (!root.IsMap()) throw ConfigError("(root)", "expected a table of sections");
  ScenarioConfig c;

  for (const auto& kv : root) {
    static const std::set<std::string> known{"source", "grid", "sample", "scan", "mzi",
                                             "lockin", "noise", "analysis", "outputs"};
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError(key, "unknown section");
  }

  detail::Section src(root["source"], "source");
  src.read("kind", c.source.kind);
  src.read("center_nm", c.source.center_nm);
  src.read("fwhm_nm", c.source.fwhm_nm);
  src.read("order", c.source.order);
  std::string path;
  src.read("path", path);
  if (!path.empty()) c.source.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
  src.reject_unknown();

  detail::Section grid(root["grid"], "grid");
  grid.read("points", c.grid.points);
  grid.read("span_fwhm", c.grid.span_fwhm);
  grid.reject_unknown();

  detail::Section smp(root["sample"], "sample");
  smp.read("kind", c.sample.kind);
  if (c.sample.kind == "slab") {
    double gvd = c.sample.slab.gvd();
    smp.read("length_mm", c.sample.slab.length_mm);
    smp.read("gvd_fs2_per_mm", gvd);
    smp.read("inv_group_velocity_fs_per_mm", c.sample.slab.inv_group_velocity);
    smp.read("third_order_fs3_per_mm", c.sample.slab.third_order);
    c.sample.slab.half_gvd = 0.5 * gvd;
  } else if (c.sample.kind == "notch") {
    smp.read("center_rad_per_fs", c.sample.notch.center);
    smp.read("width_rad_per_fs", c.sample.notch.width);
    smp.read("steepness_fs2", c.sample.notch.steepness);
  }
  smp.reject_unknown();

  detail::Section scan(root["scan"], "scan");
  scan.read("mode", c.scan.mode);
  c.scan.step_nm = c.scan.mode == "fully_sampled" ? 15.0 : 150.0;
  scan.read("step_nm", c.scan.step_nm);
  scan.read("tau_span_fs", c.scan.tau_span_fs);
  scan.reject_unknown();

  detail::Section mzi(root["mzi"], "mzi");
  const bool has_r = mzi.has("r");
  const bool has_t = mzi.has("t");
  mzi.read("r", c.mzi.r);
  mzi.read("t", c.mzi.t);
  if (has_r != has_t) {
    // One amplitude fixes the other for a lossless splitter.
    double& known = has_r ? c.mzi.r : c.mzi.t;
    double& other = has_r ? c.mzi.t : c.mzi.r;
    detail::require(known > 0.0 && known < 1.0, has_r ? "mzi.r" : "mzi.t", "must lie in (0, 1)");
    other = std::sqrt(1.0 - known * known);
  }
  mzi.read("reference_nm", c.mzi.reference_nm);
  mzi.read("nu21_khz", c.mzi.nu21_khz);
  mzi.reject_unknown();

  detail::Section lock(root["lockin"], "lockin");
  lock.read("samples_per_period", c.lockin.samples_per_period);
  lock.read("dwell_ms", c.lockin.dwell_ms);
  lock.reject_unknown();

  detail::Section noise(root["noise"], "noise");
  noise.read("poisson", c.noise.poisson);
  noise.read("counts_per_step", c.noise.counts_per_step);
  noise.read("phase_jitter_rad", c.noise.phase_jitter_rad);
  noise.read("seed", c.noise.seed);
  noise.reject_unknown();

  detail::Section ana(root["analysis"], "analysis");
  std::string window = "none";
  ana.read("window", window);
  if (window == "none") {
    c.analysis.window = Window::None;
  } else if (window == "hann") {
    c.analysis.window = Window::Hann;
  } else {
    throw ConfigError("analysis.window", "must be none or hann");
  }
  ana.read("zero_pad", c.analysis.zero_pad);
  ana.read("reference_run", c.analysis.reference_run);
  ana.reject_unknown();

  detail::Section out(root["outputs"], "outputs");
  std::string dir = c.output_directory.string();
  out.read("directory", dir);
  c.output_directory = dir;
  out.reject_unknown();

  validate(c);
  return c;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("(file)", "cannot open " + path.string());
  } catch (const YAML::ParserException& e) {
    throw ConfigError("(file)", std::string("YAML syntax error: ") + e.what());
  }
  return parse_scenario(root, path.parent_path());
}

inline nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["source"] = {{"kind", c.source.kind}, {"center_nm", c.source.center_nm}, {"fwhm_nm", c.source.fwhm_nm}};
  if (c.source.kind == "supergaussian") j["source"]["order"] = c.source.order;
  if (c.source.kind == "file") j["source"]["path"] = c.source.path.generic_string();
  j["grid"] = {{"points", c.grid.points}, {"span_fwhm", c.grid.span_fwhm}};
  j["sample"] = {{"kind", c.sample.kind}};
  if (c.sample.kind == "slab") {
    j["sample"]["length_mm"] = c.sample.slab.length_mm;
    j["sample"]["gvd_fs2_per_mm"] = c.sample.slab.gvd();
    j["sample"]["inv_group_velocity_fs_per_mm"] = c.sample.slab.inv_group_velocity;
    j["sample"]["third_order_fs3_per_mm"] = c.sample.slab.third_order;
  } else if (c.sample.kind == "notch") {
    j["sample"]["center_rad_per_fs"] = c.sample.notch.center;
    j["sample"]["width_rad_per_fs"] = c.sample.notch.width;
    j["sample"]["steepness_fs2"] = c.sample.notch.steepness;
  }
  j["scan"] = {{"mode", c.scan.mode}, {"step_nm", c.scan.step_nm}, {"tau_span_fs", c.scan.tau_span_fs}};
  j["mzi"] = {{"r", c.mzi.r}, {"t", c.mzi.t}, {"reference_nm", c.mzi.reference_nm}, {"nu21_khz", c.mzi.nu21_khz}};
  j["lockin"] = {{"samples_per_period", c.lockin.samples_per_period}, {"dwell_ms", c.lockin.dwell_ms}};
  j["noise"] = {{"poisson", c.noise.poisson},
                {"counts_per_step", c.noise.counts_per_step},
                {"phase_jitter_rad", c.noise.phase_jitter_rad},
                {"seed", c.noise.seed}};
  j["analysis"] = {{"window", c.analysis.window == Window::Hann ? "hann" : "none"},
                   {"zero_pad", c.analysis.zero_pad},
                   {"reference_run", c.analysis.reference_run}};
  j["outputs"] = {{"directory", c.output_directory.generic_string()}};
  return j;
}

/// Source spectrum on the scenario's frequency grid.
inline Spectrum make_source(const ScenarioConfig& c) {
  const double omega_0 = omega_from_wavelength(c.source.center_nm);
  const double fwhm = fwhm_omega_from_wavelength(c.source.center_nm, c.source.fwhm_nm);
  const auto grid = make_grid(omega_0, c.grid.span_fwhm * fwhm, c.grid.points);
  if (c.source.kind == "gaussian") return gaussian_spectrum(grid, fwhm);
  if (c.source.kind == "supergaussian") return super_gaussian_spectrum(grid, fwhm, c.source.order);
  return load_spectrum(c.source.path, grid);
}

inline TransferFunction make_sample(const ScenarioConfig& c, const FrequencyGrid& grid) {
  if (c.sample.kind == "slab") return eta_slab(grid, c.sample.slab);
  if (c.sample.kind == "notch") return eta_notch(grid, c.sample.notch);
  return eta_identity(grid);
}

inline NoiseConfig make_noise(const ScenarioConfig& c, const ModulationConfig& mod) {
  NoiseConfig n;
  n.poisson_enabled = c.noise.poisson;
  n.phase_jitter_sigma = c.noise.phase_jitter_rad;
  n.seed = c.noise.seed;
  // A down-sampled step spreads its counts over every sample of the dwell window.
  n.mean_counts_per_sample = c.scan.mode == "downsampled"
                                 ? c.noise.counts_per_step / static_cast<double>(mod.samples_per_step())
                                 : c.noise.counts_per_step;
  return n;
}

inline ModulationConfig make_modulation(const ScenarioConfig& c) {
  return ModulationConfig{c.mzi.nu21_khz, c.lockin.samples_per_period, c.lockin.dwell_ms};
}

struct ScenarioResult {
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json report;
};

namespace detail {

inline CsvTable complex_table(const ComplexInterferogram& z) {
  CsvTable t{{"tau_fs", "re", "im", "amp", "phase"}, std::vector<std::vector<double>>(5)};
  for (std::size_t k = 0; k < z.tau.size(); ++k) {
    t.columns[0].push_back(z.tau[k]);
    t.columns[1].push_back(z.values[k].real());
    t.columns[2].push_back(z.values[k].imag());
    t.columns[3].push_back(std::abs(z.values[k]));
    t.columns[4].push_back(std::arg(z.values[k]));
  }
  return t;
}

inline CsvTable spectrum_table(const RecoveredSpectrum& s) {
  CsvTable t{{"omega_rad_per_fs", "magnitude", "phase_rad", "valid"}, std::vector<std::vector<double>>(4)};
  for (std::size_t i = 0; i < s.omega_axis.size(); ++i) {
    t.columns[0].push_back(s.omega_axis[i]);
    t.columns[1].push_back(s.magnitude[i]);
    t.columns[2].push_back(s.phase[i]);
    t.columns[3].push_back(s.valid_mask[i]);
  }
  return t;
}

inline std::vector<PlotSpec> complex_plot(const ComplexInterferogram& z, const std::string& name) {
  const auto t = complex_table(z);
  return {PlotSpec{name + " lock-in component", "delay (fs)", "rate (normalized)",
                   {{"Re", t.columns[0], t.columns[1]}, {"Im", t.columns[0], t.columns[2]},
                    {"|Z|", t.columns[0], t.columns[3]}}},
          PlotSpec{name + " phase", "delay (fs)", "phase (rad)", {{"arg Z", t.columns[0], t.columns[4]}}}};
}

/// Magnitude and phase panels restricted to where the magnitude exceeds 1e-3 of its peak.
inline std::vector<PlotSpec> spectrum_plot(const RecoveredSpectrum& s, const std::string& title,
                                           const std::string& magnitude_label) {
  std::size_t lo = s.omega_axis.size(), hi = 0;
  for (std::size_t i = 0; i < s.omega_axis.size(); ++i) {
    if (s.magnitude[i] > 1e-3) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  if (lo > hi) lo = 0, hi = s.omega_axis.empty() ? 0 : s.omega_axis.size() - 1;
  const std::size_t margin = (hi - lo) / 10 + 1;
  lo = lo > margin ? lo - margin : 0;
  hi = std::min(hi + margin, s.omega_axis.empty() ? 0 : s.omega_axis.size() - 1);
  const auto cut = [&](const std::vector<double>& v) {
    return v.empty() ? v : std::vector<double>(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi) + 1);
  };
  const auto w = cut(s.omega_axis);
  return {PlotSpec{title + " magnitude", "angular frequency (rad/fs)", magnitude_label, {{"", w, cut(s.magnitude)}}},
          PlotSpec{title + " phase", "angular frequency (rad/fs)", "phase (rad)", {{"", w, cut(s.phase)}}}};
}

inline nlohmann::ordered_json peak_json(const PeakMetrics& p) {
  return {{"center_fs", p.center}, {"fwhm_fs", p.fwhm}, {"peak_to_baseline", p.peak_to_baseline}};
}

inline nlohmann::ordered_json gvd_json(const GvdFit& f) {
  return {{"gvd_fs2_per_mm", f.gvd},
          {"gvd_uncertainty_fs2_per_mm", f.gvd_uncertainty},
          {"group_delay_removed_fs", f.group_delay_removed},
          {"curvature_fs2", f.curvature},
          {"expansion_center_rad_per_fs", f.expansion_center},
          {"residual_rms_rad", f.residual_rms},
          {"samples", f.samples}};
}

/// Runs `fn`, storing its JSON result under `key`, or null plus a note when it throws.
template <typename Fn>
void try_analysis(nlohmann::ordered_json& report, const std::string& key, Fn&& fn) {
  try {
    report[key] = fn();
  } catch (const std::exception& e) {
    report[key] = nullptr;
    report["notes"].push_back(key + ": " + e.what());
  }
}

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw std::runtime_error("cannot create output directory " + dir_.string());
  }

  void table(const std::string& stem, const CsvTable& t, const std::vector<PlotSpec>& plot) {
    write_csv(dir_ / (stem + ".csv"), t);
    write_svg(dir_ / (stem + ".svg"), plot);
    files.push_back(dir_ / (stem + ".csv"));
    files.push_back(dir_ / (stem + ".svg"));
  }

  void json(const std::string& name, const nlohmann::ordered_json& j) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + (dir_ / name).string());
    files.push_back(dir_ / name);
  }

  std::vector<std::filesystem::path> files;

 private:
  std::filesystem::path dir_;
};

}  // namespace detail

/// Simulates the configured scan, analyzes it and writes CSV, SVG and fit_report.json into
/// the output directory.
inline ScenarioResult run_scenario(const ScenarioConfig& c) {
  validate(c);
  ScopedWarningCapture warnings;
  const auto source = make_source(c);
  const auto& grid = source.grid;
  const double omega_R = omega_from_wavelength(c.mzi.reference_nm);
  MziConfig mzi = make_mzi_config(grid.omega_0(), omega_R);
  mzi.refl_r = c.mzi.r;
  mzi.trans_t = c.mzi.t;
  // Re-normalize so the lossless check holds to machine precision.
  const double norm = std::hypot(mzi.refl_r, mzi.trans_t);
  mzi.refl_r /= norm;
  mzi.trans_t /= norm;

  const auto mod = make_modulation(c);
  const auto noise = make_noise(c, mod);
  const auto tau = make_tau_axis(convert_path_step(c.scan.step_nm), c.scan.tau_span_fs);
  const CoincidenceModel model(make_sample(c, grid), source, mzi);
  const FftOptions fft{c.analysis.window, c.analysis.zero_pad, false};

  nlohmann::ordered_json report;
  report["config"] = to_json(c);
  report["notes"] = nlohmann::ordered_json::array();
  report["tau_points"] = tau.size();
  report["tau_step_fs"] = tau.size() > 1 ? tau[1] - tau[0] : 0.0;
  report["omega_0_rad_per_fs"] = grid.omega_0();
  report["omega_R_rad_per_fs"] = omega_R;

  detail::OutputWriter out(c.output_directory);
  if (c.scan.mode == "fully_sampled") {
    const auto full = simulate_fully_sampled_scan(tau, model, noise);
    out.table("fully_sampled", CsvTable{{"tau_fs", "rate"}, {full.tau, full.values}},
              {PlotSpec{"Fully-sampled coincidence rate", "delay (fs)", "rate (normalized)", {{"", full.tau, full.values}}}});
    const auto spec = fft_interferogram(full, FftOptions{c.analysis.window, c.analysis.zero_pad, true});
    out.table("spectrum_recovered", detail::spectrum_table(spec),
              detail::spectrum_plot(spec, "Fully-sampled spectrum", "magnitude (normalized)"));
    detail::try_analysis(report, "visibility", [&] { return nlohmann::ordered_json(fit_balanced_fringes(full, grid.omega_0())); });
  } else {
    const auto scan = simulate_downsampled_scan(tau, model, mod, noise);
    out.table("comp_0f", CsvTable{{"tau_fs", "rate"}, {scan.a0f.tau, scan.a0f.values}},
              {PlotSpec{"0f component", "delay (fs)", "rate (normalized)", {{"", scan.a0f.tau, scan.a0f.values}}}});
    out.table("comp_1f", detail::complex_table(scan.z1f), detail::complex_plot(scan.z1f, "1f"));
    out.table("comp_2f", detail::complex_table(scan.z2f), detail::complex_plot(scan.z2f, "2f"));

    detail::try_analysis(report, "peak_0f", [&] { return detail::peak_json(peak_metrics(scan.a0f)); });
    double sum = 0.0, sum2 = 0.0;
    for (const auto& v : scan.z2f.values) {
      sum += std::abs(v);
      sum2 += std::norm(v);
    }
    const double n = static_cast<double>(scan.z2f.values.size());
    const double mean = sum / n;
    report["z2f_amplitude"] = {{"mean", mean},
                               {"relative_std", mean > 0.0 ? std::sqrt(std::max(sum2 / n - mean * mean, 0.0)) / mean : 0.0}};

    const auto centered = remove_linear_phase(scan.z1f);
    report["group_delay_fs"] = centered.group_delay;
    const auto spec = fft_interferogram(centered.centered, omega_R, fft);
    out.table("spectrum_recovered", detail::spectrum_table(spec),
              detail::spectrum_plot(spec, "1f spectrum", "magnitude (normalized)"));
    if (c.sample.kind == "slab") {
      detail::try_analysis(report, "gvd", [&] {
        auto fit = fit_gvd(spec, c.sample.slab.length_mm);
        fit.group_delay_removed = centered.group_delay;
        return detail::gvd_json(fit);
      });
    }

    if (c.sample.kind != "none" && c.analysis.reference_run) {
      const CoincidenceModel reference(eta_identity(grid), source, mzi);
      const auto ref_scan = simulate_downsampled_scan(tau, reference, mod, noise);
      detail::try_analysis(report, "sample_response", [&] {
        const auto response = recover_sample_response(fft_interferogram(scan.z1f, omega_R, fft),
                                                      fft_interferogram(ref_scan.z1f, omega_R, fft));
        out.table("sample_response", detail::spectrum_table(response),
                  detail::spectrum_plot(response, "Sample response", "magnitude ratio"));
        const auto valid = std::count(response.valid_mask.begin(), response.valid_mask.end(), std::uint8_t{1});
        return nlohmann::ordered_json{{"valid_samples", valid}, {"file", "sample_response.csv"}};
      });
    }
  }
  for (const auto& w : warnings.messages()) report["notes"].push_back("warning: " + w);
  out.json("fit_report.json", report);
  return ScenarioResult{out.files, report};
}

}  // namespace eppmzi
