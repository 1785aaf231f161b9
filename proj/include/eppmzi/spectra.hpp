#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eppmzi/diagnostics.hpp"
#include "eppmzi/grid.hpp"
#include "eppmzi/units.hpp"

namespace eppmzi {

/// Pair power spectrum S(omega) in 1/(rad/fs) on a frequency grid.
struct Spectrum {
  FrequencyGrid grid;
  std::vector<double> values;

  double integral() const { return trapezoid<double>(grid, values); }

  /// Rescales to unit trapezoid integral.
  void normalize() {
    const double total = integral();
    if (!(total > 0.0)) throw std::invalid_argument("spectrum has no positive weight");
    for (auto& v : values) v /= total;
  }
};

inline void warn_if_truncated(const FrequencyGrid& grid, double fwhm_omega) {
  if (grid.span() < 4.0 * fwhm_omega) {
    std::ostringstream os;
    os << "grid span " << grid.span() << " rad/fs is below 4x FWHM (" << 4.0 * fwhm_omega
       << "); spectrum truncation distorts normalization";
    warn(os.str());
  }
}

/// exp[-((omega - omega_0)^2 / a^2)^order] with a chosen so the profile has the given FWHM.
inline double super_gaussian_profile(double offset, double fwhm_omega, int order) {
  const double half = 0.5 * fwhm_omega;
  const double a2 = half * half / std::pow(std::numbers::ln2, 1.0 / order);
  return std::exp(-std::pow(offset * offset / a2, order));
}

inline Spectrum gaussian_spectrum(const FrequencyGrid& grid, double fwhm_omega) {
  if (!(fwhm_omega > 0.0)) throw std::invalid_argument("FWHM must be > 0");
  warn_if_truncated(grid, fwhm_omega);
  const double alpha = gaussian_alpha_from_fwhm(fwhm_omega);
  const double peak = 1.0 / std::sqrt(std::numbers::pi * alpha * alpha);
  Spectrum s{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.offset(i) / alpha;
    s.values[i] = peak * std::exp(-x * x);
  }
  s.normalize();
  return s;
}

inline Spectrum super_gaussian_spectrum(const FrequencyGrid& grid, double fwhm_omega, int order) {
  if (!(fwhm_omega > 0.0)) throw std::invalid_argument("FWHM must be > 0");
  if (order < 1) throw std::invalid_argument("super-Gaussian order must be >= 1");
  if (order == 1) return gaussian_spectrum(grid, fwhm_omega);
  warn_if_truncated(grid, fwhm_omega);
  Spectrum s{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.values[i] = super_gaussian_profile(grid.offset(i), fwhm_omega, order);
  s.normalize();
  return s;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline double parse_double(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    std::ostringstream os;
    os << "line " << line << ": cannot parse number '" << t << "'";
    throw std::runtime_error(os.str());
  }
  return v;
}

}  // namespace detail

/// Loads a measured spectrum from CSV with header `wavelength_nm,counts`.
///
/// Counts are taken as a density per nm and converted to a density per rad/fs with the
/// Jacobian lambda^2 / (2 pi c) before linear resampling onto the grid. Negative counts are
/// clamped to zero.
inline Spectrum load_spectrum(const std::filesystem::path& path, const FrequencyGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  struct Sample {
    double omega;
    double density;
  };
  std::vector<Sample> samples;
  std::size_t clamped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (!have_header) {
      std::string header = detail::trim(line);
      header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
      if (header != "wavelength_nm,counts")
        throw std::runtime_error(path.string() + ": expected header 'wavelength_nm,counts'");
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": expected two comma-separated columns");
    const double lambda = detail::parse_double(line.substr(0, comma), line_no);
    double counts = detail::parse_double(line.substr(comma + 1), line_no);
    if (!(lambda > 0.0))
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": wavelength must be > 0");
    if (counts < 0.0) {
      counts = 0.0;
      ++clamped;
    }
    samples.push_back({omega_from_wavelength(lambda), counts * lambda * lambda / (kTwoPi * kSpeedOfLight)});
  }
  if (samples.size() < 2) throw std::runtime_error(path.string() + ": spectrum file has fewer than two data rows");
  if (clamped > 0)
    warn(path.string() + ": " + std::to_string(clamped) + " negative count value(s) clamped to 0");

  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.omega < b.omega; });
  const double lo = samples.front().omega;
  const double hi = samples.back().omega;
  if (grid.omega_min() < lo || grid.omega_max() > hi) {
    std::ostringstream os;
    os << path.string() << ": file covers [" << lo << ", " << hi << "] rad/fs but grid needs ["
       << grid.omega_min() << ", " << grid.omega_max() << "]; uncovered:";
    if (grid.omega_min() < lo) os << " [" << grid.omega_min() << ", " << lo << ")";
    if (grid.omega_max() > hi) os << " (" << hi << ", " << grid.omega_max() << "]";
    throw std::runtime_error(os.str());
  }

  Spectrum s{grid, std::vector<double>(grid.size())};
  std::size_t k = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.omega(i);
    while (k + 2 < samples.size() && samples[k + 1].omega < w) ++k;
    const auto& a = samples[k];
    const auto& b = samples[k + 1];
    const double f = b.omega > a.omega ? (w - a.omega) / (b.omega - a.omega) : 0.0;
    s.values[i] = std::max(0.0, a.density + f * (b.density - a.density));
  }
  s.normalize();
  return s;
}

}  // namespace eppmzi
