#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "eppmzi/fft.hpp"
#include "eppmzi/grid.hpp"

namespace eppmzi {

/// Complex linear response eta(omega) of the sample arm.
struct TransferFunction {
  FrequencyGrid grid;
  std::vector<cplx> values;

  std::vector<double> magnitude() const {
    std::vector<double> m(values.size());
    std::transform(values.begin(), values.end(), m.begin(), [](cplx v) { return std::abs(v); });
    return m;
  }
  std::vector<double> phase() const {
    std::vector<double> p(values.size());
    std::transform(values.begin(), values.end(), p.begin(), [](cplx v) { return std::arg(v); });
    return p;
  }
};

/// Taylor-expanded dispersive slab: k(omega) L with
/// k = alpha x + beta x^2 + gamma x^3, x = omega - omega_0, beta = k''/2.
struct SlabParams {
  double length_mm = 30.8;
  double inv_group_velocity = 0.0;  // fs/mm
  double half_gvd = 75.970 / 2.0;   // fs^2/mm
  double third_order = 0.0;         // fs^3/mm

  double gvd() const { return 2.0 * half_gvd; }
  double group_delay() const { return inv_group_velocity * length_mm; }
};

inline SlabParams slab_from_gvd(double length_mm, double gvd_fs2_per_mm, double inv_group_velocity = 0.0,
                                double third_order = 0.0) {
  return SlabParams{length_mm, inv_group_velocity, 0.5 * gvd_fs2_per_mm, third_order};
}

/// Arctangent-edged notch: |eta| = 1/2 + atan(s((omega - omega_n)^2 - w^2)) / pi.
struct NotchParams {
  double center = 3.527;      // rad/fs
  double width = 0.05285;     // rad/fs
  double steepness = 1.0e14;  // fs^2/rad^2 (1e-16 s^2/rad^2)
};

inline constexpr double kMagnitudeFloor = 1e-6;

inline TransferFunction eta_identity(const FrequencyGrid& grid) {
  return TransferFunction{grid, std::vector<cplx>(grid.size(), cplx(1.0, 0.0))};
}

inline double slab_phase(double offset, const SlabParams& p) {
  const double x = offset;
  return (p.inv_group_velocity * x + p.half_gvd * x * x + p.third_order * x * x * x) * p.length_mm;
}

inline TransferFunction eta_slab(const FrequencyGrid& grid, const SlabParams& p) {
  if (!(p.length_mm > 0.0)) throw std::invalid_argument("slab length must be > 0");
  TransferFunction eta{grid, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) eta.values[i] = std::polar(1.0, slab_phase(grid.offset(i), p));
  return eta;
}

inline void validate(const NotchParams& p) {
  if (!(p.width > 0.0)) throw std::invalid_argument("notch width must be > 0");
  if (!(p.steepness > 0.0)) throw std::invalid_argument("notch steepness must be > 0");
}

inline double notch_magnitude_at(double omega, const NotchParams& p) {
  const double d = omega - p.center;
  const double m = 0.5 + std::atan(p.steepness * (d * d - p.width * p.width)) / std::numbers::pi;
  return std::clamp(m, 0.0, 1.0);
}

inline std::vector<double> notch_magnitude(const FrequencyGrid& grid, const NotchParams& p) {
  validate(p);
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = notch_magnitude_at(grid.omega(i), p);
  return m;
}

namespace detail {

inline constexpr std::size_t kKramersKronigExtension = 4;

inline std::size_t kk_padding(std::size_t n) { return (kKramersKronigExtension - 1) * n / 2; }

}  // namespace detail

namespace detail {

// Complex log-spectrum ln|eta| + i phi of the minimum-phase response on the extended grid.
// The log-magnitude cepstrum is folded onto non-negative times, which makes the response causal
// for the time dependence exp(-i omega t) used throughout (delays appear as exp(+i omega tau)).
inline std::vector<cplx> minimum_phase_log(std::span<const double> magnitude, const FrequencyGrid& grid) {
  const std::size_t n = grid.size();
  if (magnitude.size() != n) throw std::invalid_argument("magnitude length does not match grid");
  if (n < 64) throw std::invalid_argument("Kramers-Kronig phase needs at least 64 grid points");
  if (std::none_of(magnitude.begin(), magnitude.end(), [](double m) { return m > 0.0; }))
    throw std::invalid_argument("magnitude is zero everywhere");

  const std::size_t m_total = kKramersKronigExtension * n;
  const auto pad = static_cast<std::ptrdiff_t>(kk_padding(n));
  std::vector<cplx> cep(m_total);
  for (std::size_t j = 0; j < m_total; ++j) {
    const auto src = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(j) - pad, 0,
                                                static_cast<std::ptrdiff_t>(n) - 1);
    cep[j] = std::log(std::max(magnitude[static_cast<std::size_t>(src)], kMagnitudeFloor));
  }
  fft_inplace(cep, FftDirection::Forward);
  const double scale = 1.0 / static_cast<double>(m_total);
  const std::size_t half = m_total / 2;
  cep[0] *= scale;
  cep[half] *= scale;
  for (std::size_t k = 1; k < half; ++k) cep[k] *= 2.0 * scale;
  for (std::size_t k = half + 1; k < m_total; ++k) cep[k] = 0.0;
  fft_inplace(cep, FftDirection::Backward);
  return cep;
}

}  // namespace detail

/// Minimum-phase response with the given magnitude (floored at 1e-6) on the grid extended 4x by
/// repeating the edge values; the working grid occupies the middle n of the 4n samples.
inline std::vector<cplx> minimum_phase_extended(std::span<const double> magnitude, const FrequencyGrid& grid) {
  auto spec = detail::minimum_phase_log(magnitude, grid);
  for (auto& v : spec) v = std::exp(v);
  return spec;
}

/// Minimum-phase (log-Hilbert) spectral phase for the given transmission magnitude.
inline std::vector<double> kramers_kronig_phase(std::span<const double> magnitude, const FrequencyGrid& grid) {
  const auto log_spec = detail::minimum_phase_log(magnitude, grid);
  const std::size_t pad = detail::kk_padding(grid.size());
  std::vector<double> phase(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) phase[i] = log_spec[pad + i].imag();
  return phase;
}

inline TransferFunction eta_notch(const FrequencyGrid& grid, const NotchParams& p) {
  const auto mag = notch_magnitude(grid, p);
  const auto phase = kramers_kronig_phase(mag, grid);
  TransferFunction eta{grid, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) eta.values[i] = std::polar(mag[i], phase[i]);
  return eta;
}

/// Fraction of impulse-response energy at negative times, with h(t) ~ sum eta_j exp(-i omega_j t)
/// evaluated on the periodic grid spanned by the samples.
inline double anticausal_energy_fraction(std::span<const cplx> spectrum) {
  std::vector<cplx> h(spectrum.begin(), spectrum.end());
  fft_inplace(h, FftDirection::Forward);
  const std::size_t m = h.size();
  double total = 0.0;
  double anti = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = std::norm(h[k]);
    total += e;
    if (2 * k > m) anti += e;
    else if (2 * k == m) anti += 0.5 * e;
  }
  if (!(total > 0.0)) throw std::invalid_argument("spectrum has no energy");
  return anti / total;
}

}  // namespace eppmzi
