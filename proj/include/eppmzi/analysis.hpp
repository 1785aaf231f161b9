#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "eppmzi/diagnostics.hpp"
#include "eppmzi/fft.hpp"
#include "eppmzi/interferogram.hpp"
#include "eppmzi/units.hpp"

namespace eppmzi {

enum class Window { None, Hann };

struct FftOptions {
  Window window = Window::None;
  std::size_t zero_pad = 1;    // transform length = zero_pad * samples
  bool subtract_mean = false;  // drop the DC level before transforming
};

/// Samples with normalized magnitude above this fraction carry a usable phase.
inline constexpr double kValidThreshold = 0.05;

/// Frequency-domain view of an interferogram. magnitude is normalized to a maximum of 1 and
/// `peak` holds the factor that was divided out. phase is unwrapped within contiguous valid
/// runs and NaN outside the valid mask.
struct RecoveredSpectrum {
  std::vector<double> omega_axis;
  std::vector<double> magnitude;
  std::vector<double> phase;
  std::vector<std::uint8_t> valid_mask;
  double peak = 1.0;
};

struct FourierTransform {
  std::vector<double> omega;  // ascending, rad/fs
  std::vector<cplx> values;   // sum_k z_k exp(i omega tau_k) dtau
};

/// Discrete Fourier transform with kernel exp(+i omega tau), which maps a component
/// exp(-i omega_c tau) onto +omega_c.
inline FourierTransform fourier_transform(std::span<const cplx> z, std::span<const double> tau,
                                          const FftOptions& opts = {}) {
  const double dtau = require_uniform_axis(tau);
  if (z.size() != tau.size()) throw std::invalid_argument("value count does not match delay axis");
  if (opts.zero_pad < 1) throw std::invalid_argument("zero_pad must be >= 1");
  const std::size_t n = z.size();
  const std::size_t m = n * opts.zero_pad;
  cplx mean = 0.0;
  if (opts.subtract_mean) mean = std::accumulate(z.begin(), z.end(), cplx(0.0)) / static_cast<double>(n);
  std::vector<cplx> buf(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0;
    if (opts.window == Window::Hann && n > 1)
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    buf[k] = w * (z[k] - mean);
  }
  fft_inplace(buf, FftDirection::Backward);
  FourierTransform out{std::vector<double>(m), std::vector<cplx>(m)};
  const auto half = static_cast<std::ptrdiff_t>(m / 2);
  for (std::size_t r = 0; r < m; ++r) {
    // r runs over ascending signed bins -half .. m-half-1
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(r) - half;
    const std::size_t src = static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
    const double omega = kTwoPi * static_cast<double>(j) / (static_cast<double>(m) * dtau);
    out.omega[r] = omega;
    out.values[r] = buf[src] * dtau * std::polar(1.0, omega * tau.front());
  }
  return out;
}

/// Sequential 1D unwrap that restarts at every gap in the mask.
inline std::vector<double> unwrap_phase(std::span<const double> wrapped, std::span<const std::uint8_t> mask) {
  if (wrapped.size() != mask.size()) throw std::invalid_argument("mask length does not match phase");
  std::vector<double> out(wrapped.size(), std::numeric_limits<double>::quiet_NaN());
  bool in_run = false;
  double offset = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if (!mask[i]) {
      in_run = false;
      continue;
    }
    if (!in_run) {
      offset = 0.0;
      in_run = true;
    } else {
      const double d = wrapped[i] - previous;
      offset -= kTwoPi * std::round(d / kTwoPi);
    }
    previous = wrapped[i];
    out[i] = wrapped[i] + offset;
  }
  return out;
}

namespace detail {

inline RecoveredSpectrum to_recovered(std::vector<double> omega, std::span<const cplx> values) {
  RecoveredSpectrum r;
  r.omega_axis = std::move(omega);
  const std::size_t n = values.size();
  r.magnitude.resize(n);
  std::vector<double> wrapped(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.magnitude[i] = std::abs(values[i]);
    wrapped[i] = std::arg(values[i]);
    peak = std::max(peak, r.magnitude[i]);
  }
  r.peak = peak;
  r.valid_mask.assign(n, 0);
  if (peak > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      r.magnitude[i] /= peak;
      r.valid_mask[i] = r.magnitude[i] > kValidThreshold ? 1 : 0;
    }
  }
  r.phase = unwrap_phase(wrapped, r.valid_mask);
  return r;
}

}  // namespace detail

/// Spectrum of a real (fully-sampled or 0f) scan, non-negative frequencies only.
inline RecoveredSpectrum fft_interferogram(const Interferogram& ifg, const FftOptions& opts = {}) {
  std::vector<cplx> z(ifg.values.begin(), ifg.values.end());
  const auto ft = fourier_transform(z, ifg.tau, opts);
  std::vector<double> omega;
  std::vector<cplx> vals;
  for (std::size_t i = 0; i < ft.omega.size(); ++i) {
    if (ft.omega[i] >= 0.0) {
      omega.push_back(ft.omega[i]);
      vals.push_back(ft.values[i]);
    }
  }
  return detail::to_recovered(std::move(omega), vals);
}

/// Spectrum of a down-sampled lock-in signal, with the rotating frame undone by adding
/// m * omega_R to the frequency axis.
inline RecoveredSpectrum fft_interferogram(const ComplexInterferogram& z, double omega_R, const FftOptions& opts = {}) {
  auto ft = fourier_transform(z.values, z.tau, opts);
  const double shift = harmonic_order(z.harmonic) * omega_R;
  for (auto& w : ft.omega) w += shift;
  return detail::to_recovered(std::move(ft.omega), ft.values);
}

struct CenteredInterferogram {
  ComplexInterferogram centered;
  double group_delay = 0.0;  // fs
};

/// Moves the |z|^2 centroid to zero delay; the shift estimates the sample's group delay.
inline CenteredInterferogram remove_linear_phase(const ComplexInterferogram& z) {
  require_uniform_axis(z.tau);
  double num = 0.0;
  double den = 0.0;
  double max_e = 0.0;
  for (std::size_t k = 0; k < z.values.size(); ++k) {
    const double e = std::norm(z.values[k]);
    num += z.tau[k] * e;
    den += e;
    max_e = std::max(max_e, e);
  }
  if (!(den > 0.0)) throw std::invalid_argument("interferogram is zero everywhere");
  const auto at_max = std::count_if(z.values.begin(), z.values.end(),
                                    [&](cplx v) { return std::norm(v) >= max_e * (1.0 - 1e-12); });
  if (at_max > 1) warn("interferogram envelope has no unique maximum; centroid used for the delay");
  const double center = num / den;
  CenteredInterferogram out{z, center};
  for (auto& t : out.centered.tau) t -= center;
  return out;
}

/// Weighted quadratic fit of spectral phase. Reports k'' = 2 c2 / L.
struct GvdFit {
  double gvd = 0.0;                  // fs^2/mm
  double gvd_uncertainty = 0.0;      // fs^2/mm
  double group_delay_removed = 0.0;  // fs
  double residual_rms = 0.0;         // rad, weighted
  double curvature = 0.0;            // fs^2, c2
  double slope = 0.0;                // fs, c1
  double slope_uncertainty = 0.0;    // fs
  double expansion_center = 0.0;     // rad/fs
  std::size_t samples = 0;
};

namespace detail {

// Longest contiguous run of valid samples as [begin, end).
inline std::pair<std::size_t, std::size_t> longest_valid_run(std::span<const std::uint8_t> mask) {
  std::size_t best_b = 0, best_e = 0, b = 0;
  bool in_run = false;
  for (std::size_t i = 0; i <= mask.size(); ++i) {
    const bool v = i < mask.size() && mask[i];
    if (v && !in_run) {
      b = i;
      in_run = true;
    } else if (!v && in_run) {
      if (i - b > best_e - best_b) {
        best_b = b;
        best_e = i;
      }
      in_run = false;
    }
  }
  return {best_b, best_e};
}

}  // namespace detail

/// Fits c0 + c1 x + c2 x^2 to the unwrapped phase of the longest valid run, weighting each sample
/// by the spectral intensity |magnitude|^2. Phase offsets between separate runs are undefined, so
/// only one run enters the fit.
inline GvdFit fit_gvd(const RecoveredSpectrum& spec, double length_mm) {
  if (!(length_mm > 0.0)) throw std::invalid_argument("sample length must be > 0");
  const auto [b, e] = detail::longest_valid_run(spec.valid_mask);
  const std::size_t n = e - b;
  if (n < 16) throw std::invalid_argument("GVD fit needs at least 16 valid spectral samples");
  double wsum = 0.0;
  double wx = 0.0;
  for (std::size_t i = b; i < e; ++i) {
    const double w = spec.magnitude[i] * spec.magnitude[i];
    wsum += w;
    wx += w * spec.omega_axis[i];
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("GVD fit weights are degenerate");
  const double center = wx / wsum;

  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t i = b; i < e; ++i) {
    const double w = spec.magnitude[i] * spec.magnitude[i];
    const double x = spec.omega_axis[i] - center;
    const Eigen::Vector3d basis(1.0, x, x * x);
    normal += w * basis * basis.transpose();
    rhs += w * basis * spec.phase[i];
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::invalid_argument("GVD fit normal equations are singular");
  const Eigen::Vector3d c = ldlt.solve(rhs);

  double chi2 = 0.0;
  for (std::size_t i = b; i < e; ++i) {
    const double w = spec.magnitude[i] * spec.magnitude[i];
    const double x = spec.omega_axis[i] - center;
    const double r = spec.phase[i] - (c[0] + c[1] * x + c[2] * x * x);
    chi2 += w * r * r;
  }
  // Weights are relative, so the residual scale sets the parameter covariance.
  const double dof = static_cast<double>(n) - 3.0;
  const Eigen::Matrix3d cov = normal.inverse() * (chi2 / dof);

  GvdFit fit;
  fit.curvature = c[2];
  fit.slope = c[1];
  fit.expansion_center = center;
  fit.gvd = 2.0 * c[2] / length_mm;
  fit.gvd_uncertainty = 2.0 * std::sqrt(std::max(cov(2, 2), 0.0)) / length_mm;
  fit.slope_uncertainty = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.residual_rms = std::sqrt(chi2 / wsum);
  fit.samples = n;
  return fit;
}

/// Centers Z_1f on its envelope, transforms, and fits the quadratic spectral phase.
inline GvdFit gvd_from_z1f(const ComplexInterferogram& z1f, double length_mm, double omega_R,
                           const FftOptions& opts = {}) {
  const auto centered = remove_linear_phase(z1f);
  auto fit = fit_gvd(fft_interferogram(centered.centered, omega_R, opts), length_mm);
  fit.group_delay_removed = centered.group_delay;
  return fit;
}

/// Fits a cos^4(omega_0 tau / 2) + b to the five central fringes of a fully-sampled scan and
/// returns the visibility a / (a + 2 b), clamped to [0, 1]; the ideal pattern 8 cos^4 gives 1.
inline double fit_balanced_fringes(const Interferogram& full, double omega_0) {
  const double dtau = require_uniform_axis(full.tau);
  if (!(omega_0 > 0.0)) throw std::invalid_argument("center frequency must be > 0");
  const double period = kTwoPi / omega_0;
  if (dtau > period / 8.0) throw std::invalid_argument("fringe fit needs at least 8 samples per carrier period");
  const double half_window = 2.5 * period;
  if (full.tau.front() > -half_window + dtau || full.tau.back() < half_window - dtau)
    throw std::invalid_argument("fringe fit needs the scan to cover five carrier periods around zero delay");

  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  std::size_t used = 0;
  for (std::size_t k = 0; k < full.tau.size(); ++k) {
    if (std::abs(full.tau[k]) > half_window) continue;
    const double c = std::pow(std::cos(0.5 * omega_0 * full.tau[k]), 4);
    const Eigen::Vector2d basis(c, 1.0);
    normal += basis * basis.transpose();
    rhs += basis * full.values[k];
    ++used;
  }
  if (used < 40) throw std::invalid_argument("fringe fit window holds too few samples");
  const Eigen::Vector2d ab = normal.ldlt().solve(rhs);
  const double a = ab[0];
  const double b = ab[1];
  if (!(a > 0.0) || !(a + 2.0 * b > 0.0)) return 0.0;
  return std::clamp(a / (a + 2.0 * b), 0.0, 1.0);
}

/// Ratio of a sample scan's spectrum to a no-sample reference taken with the same pair
/// spectrum: eta(w) {1 + |eta(2 w0 - w)|^2} / 2 in magnitude and arg eta(w) in phase.
inline RecoveredSpectrum recover_sample_response(const RecoveredSpectrum& sample, const RecoveredSpectrum& reference) {
  const std::size_t n = sample.omega_axis.size();
  if (reference.omega_axis.size() != n) throw std::invalid_argument("spectra are on different axes");
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max(1.0, std::abs(reference.omega_axis[i]));
    if (std::abs(sample.omega_axis[i] - reference.omega_axis[i]) > 1e-9 * scale)
      throw std::invalid_argument("spectra are on different axes");
  }
  RecoveredSpectrum out;
  out.omega_axis = sample.omega_axis;
  out.magnitude.assign(n, 0.0);
  out.valid_mask.assign(n, 0);
  std::vector<double> wrapped(n, 0.0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sample.valid_mask[i] && reference.valid_mask[i])) continue;
    out.valid_mask[i] = 1;
    any = true;
    out.magnitude[i] = (sample.magnitude[i] * sample.peak) / (reference.magnitude[i] * reference.peak);
    wrapped[i] = wrap_phase(sample.phase[i] - reference.phase[i]);
  }
  if (!any) throw std::invalid_argument("sample and reference share no valid spectral samples");
  out.phase = unwrap_phase(wrapped, out.valid_mask);
  return out;
}

struct PeakMetrics {
  double center = 0.0;  // fs
  double fwhm = 0.0;    // fs
  double peak_to_baseline = 0.0;
};

/// Peak of a real interferogram above the baseline taken from the outer 10% of the scan.
inline PeakMetrics peak_metrics(const Interferogram& ifg) {
  require_uniform_axis(ifg.tau);
  const auto& v = ifg.values;
  const std::size_t n = v.size();
  if (n < 20) throw std::invalid_argument("peak analysis needs at least 20 samples");
  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < edge; ++k) {
    for (double x : {v[k], v[n - 1 - k]}) {
      sum += x;
      sum2 += x * x;
    }
  }
  const double m = static_cast<double>(2 * edge);
  const double baseline = sum / m;
  const double sigma = std::sqrt(std::max(sum2 / m - baseline * baseline, 0.0));
  const auto it = std::max_element(v.begin(), v.end());
  const std::size_t ip = static_cast<std::size_t>(it - v.begin());
  const double height = *it - baseline;
  if (!(height > 3.0 * sigma) || !(height > 1e-12 * std::max(1.0, std::abs(baseline))))
    throw std::invalid_argument("no peak above the baseline scatter");

  const double dtau = ifg.tau[1] - ifg.tau[0];
  double center = ifg.tau[ip];
  double peak_value = *it;
  if (ip > 0 && ip + 1 < n) {
    const double y0 = v[ip - 1], y1 = v[ip], y2 = v[ip + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0.0) {
      const double delta = 0.5 * (y0 - y2) / denom;
      center += delta * dtau;
      peak_value = y1 - 0.25 * (y0 - y2) * delta;
    }
  }
  const double half = baseline + 0.5 * (peak_value - baseline);
  std::size_t l = ip;
  while (l > 0 && v[l] > half) --l;
  std::size_t r = ip;
  while (r + 1 < n && v[r] > half) ++r;
  if (v[l] > half || v[r] > half) throw std::invalid_argument("peak does not fall to half maximum inside the scan");
  const auto crossing = [&](std::size_t below, std::size_t above) {
    const double f = (half - v[below]) / (v[above] - v[below]);
    return ifg.tau[below] + f * (ifg.tau[above] - ifg.tau[below]);
  };
  const double left = crossing(l, l + 1);
  const double right = crossing(r, r - 1);
  return PeakMetrics{center, right - left, peak_value / baseline};
}

}  // namespace eppmzi
