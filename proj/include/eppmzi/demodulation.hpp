#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "eppmzi/interferogram.hpp"
#include "eppmzi/interferometer.hpp"
#include "eppmzi/parallel.hpp"

namespace eppmzi {

/// Acousto-optic phase sweep dphi(t) = 2 pi nu_21 t and the sampling of one delay step.
struct ModulationConfig {
  double nu21_khz = 20.0;
  std::size_t samples_per_period = 256;
  double dwell_ms = 1.0;

  /// Whole modulation periods recorded per delay step (at least one).
  std::size_t periods() const {
    const double p = std::round(dwell_ms * nu21_khz);
    return p < 1.0 ? 1 : static_cast<std::size_t>(p);
  }
  std::size_t samples_per_step() const { return periods() * samples_per_period; }
};

inline void validate(const ModulationConfig& mod) {
  if (!(mod.nu21_khz > 0.0)) throw std::invalid_argument("nu21 must be > 0");
  if (mod.samples_per_period < 16) throw std::invalid_argument("samples_per_period must be >= 16");
  if (!(mod.dwell_ms > 0.0)) throw std::invalid_argument("dwell time must be > 0");
}

/// Counting statistics and interferometer phase noise.
///
/// With Poisson noise on, each sample is a draw with mean R~ * mean_counts_per_sample / 2, so
/// the off-balance level R~ = 2 yields mean_counts_per_sample counts; the draw is rescaled back
/// to R~ units. Phase jitter is a Gaussian random walk added to dphi with the given step.
struct NoiseConfig {
  bool poisson_enabled = false;
  double mean_counts_per_sample = 1000.0;
  double phase_jitter_sigma = 0.0;  // rad per sample
  std::uint64_t seed = 0;
};

inline void validate(const NoiseConfig& noise) {
  if (noise.poisson_enabled && !(noise.mean_counts_per_sample > 0.0))
    throw std::invalid_argument("mean_counts_per_sample must be > 0 when Poisson noise is enabled");
  if (!(noise.phase_jitter_sigma >= 0.0)) throw std::invalid_argument("phase jitter sigma must be >= 0");
}

struct LockinOutput {
  double x = 0.0;
  double y = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;

  cplx z() const { return {x, y}; }
};

/// Signal samples and the reference phase dphi(t_k) they were taken at. The reference travels
/// through the same interferometer, so it carries any phase jitter the signal sees.
struct ModulatedSeries {
  std::vector<double> values;
  std::vector<double> reference_phase;
};

/// Harmonic content of the rate at one delay:
/// R~(dphi) = r0f + 2 Re[e^{i dphi} i1f] + Re[e^{2 i dphi} i2f_rotated].
struct HarmonicSnapshot {
  double tau = 0.0;
  double r0f = 0.0;
  cplx i1f;
  cplx i2f_rotated;

  double rate(double delta_phi) const {
    return r0f + 2.0 * (std::polar(1.0, delta_phi) * i1f).real() +
           (std::polar(1.0, 2.0 * delta_phi) * i2f_rotated).real();
  }
};

inline HarmonicSnapshot snapshot(const CoincidenceModel& model, double tau) {
  return HarmonicSnapshot{tau, model.rate_0f(tau), model.rate_1f_integrand(tau),
                          std::polar(1.0, -2.0 * model.omega_0() * tau) * model.rate_2f_integrand()};
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

inline double poisson_sample(std::mt19937_64& rng, double rate, double counts_per_unit_rate) {
  const double mean = std::max(rate, 0.0) * counts_per_unit_rate;
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng)) / counts_per_unit_rate;
}

}  // namespace detail

/// Samples the coincidence rate over the modulation periods of one delay step.
/// step_index selects an independent noise stream so scans are reproducible in any order.
inline ModulatedSeries synthesize_timeseries(const HarmonicSnapshot& snap, const ModulationConfig& mod,
                                             const NoiseConfig& noise, std::uint64_t step_index = 0) {
  validate(mod);
  validate(noise);
  const std::size_t n = mod.samples_per_step();
  ModulatedSeries series{std::vector<double>(n), std::vector<double>(n)};
  auto rng = detail::stream_rng(noise.seed, step_index);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double counts_per_unit = 0.5 * noise.mean_counts_per_sample;
  double walk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (noise.phase_jitter_sigma > 0.0 && k > 0) walk += noise.phase_jitter_sigma * jitter(rng);
    const double phase =
        2.0 * std::numbers::pi * static_cast<double>(k % mod.samples_per_period) / static_cast<double>(mod.samples_per_period) +
        walk;
    series.reference_phase[k] = phase;
    const double rate = snap.rate(phase);
    series.values[k] = noise.poisson_enabled ? detail::poisson_sample(rng, rate, counts_per_unit) : rate;
  }
  return series;
}

inline ModulatedSeries synthesize_timeseries(double tau, const TransferFunction& eta, const Spectrum& s,
                                             const MziConfig& cfg, const ModulationConfig& mod,
                                             const NoiseConfig& noise) {
  return synthesize_timeseries(snapshot(CoincidenceModel(eta, s, cfg), tau), mod, noise);
}

/// Lock-in detection at harmonic m: multiply by cos / -sin of m(dphi(t) - omega_R tau) and
/// average uniformly over whole modulation periods.
inline LockinOutput lockin_extract(std::span<const double> values, std::span<const double> reference_phase, int m,
                                   double tau, const MziConfig& cfg, const ModulationConfig& mod) {
  if (m != 1 && m != 2) throw std::invalid_argument("lock-in harmonic must be 1 or 2");
  if (values.empty() || values.size() % mod.samples_per_period != 0)
    throw std::invalid_argument("series must cover an integer number of modulation periods");
  if (reference_phase.size() != values.size()) throw std::invalid_argument("reference length does not match series");
  double x = 0.0;
  double y = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double arg = m * (reference_phase[k] - cfg.omega_R * tau);
    x += values[k] * std::cos(arg);
    y -= values[k] * std::sin(arg);
  }
  const double inv = 1.0 / static_cast<double>(values.size());
  x *= inv;
  y *= inv;
  return LockinOutput{x, y, std::hypot(x, y), std::atan2(y, x)};
}

inline LockinOutput lockin_extract(const ModulatedSeries& series, int m, double tau, const MziConfig& cfg,
                                   const ModulationConfig& mod) {
  return lockin_extract(series.values, series.reference_phase, m, tau, cfg, mod);
}

/// Lock-in on a series sampled at the nominal sweep phases 2 pi k / samples_per_period.
inline LockinOutput lockin_extract(std::span<const double> values, int m, double tau, const MziConfig& cfg,
                                   const ModulationConfig& mod) {
  std::vector<double> ref(values.size());
  for (std::size_t k = 0; k < ref.size(); ++k)
    ref[k] = 2.0 * std::numbers::pi * static_cast<double>(k % mod.samples_per_period) /
             static_cast<double>(mod.samples_per_period);
  return lockin_extract(values, ref, m, tau, cfg, mod);
}

/// Phase-averaged (0f) level of a series.
inline double phase_average(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty series");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

inline ComplexInterferogram downsampled_z1f(std::span<const double> tau, const CoincidenceModel& model) {
  require_uniform_axis(tau);
  ComplexInterferogram out{std::vector<double>(tau.begin(), tau.end()), std::vector<cplx>(tau.size()), Harmonic::Z1f};
  parallel_for(tau.size(), [&](std::size_t k) { out.values[k] = model.z1f(tau[k]); });
  return out;
}

inline ComplexInterferogram downsampled_z2f(std::span<const double> tau, const CoincidenceModel& model) {
  require_uniform_axis(tau);
  ComplexInterferogram out{std::vector<double>(tau.begin(), tau.end()), std::vector<cplx>(tau.size()), Harmonic::Z2f};
  for (std::size_t k = 0; k < tau.size(); ++k) out.values[k] = model.z2f(tau[k]);
  return out;
}

inline Interferogram downsampled_a0f(std::span<const double> tau, const CoincidenceModel& model) {
  require_uniform_axis(tau);
  return sweep_0f(tau, model);
}

inline ComplexInterferogram downsampled_z1f(std::span<const double> tau, const TransferFunction& eta,
                                            const Spectrum& s, const MziConfig& cfg) {
  return downsampled_z1f(tau, CoincidenceModel(eta, s, cfg));
}
inline ComplexInterferogram downsampled_z2f(std::span<const double> tau, const TransferFunction& eta,
                                            const Spectrum& s, const MziConfig& cfg) {
  return downsampled_z2f(tau, CoincidenceModel(eta, s, cfg));
}
inline Interferogram downsampled_a0f(std::span<const double> tau, const TransferFunction& eta, const Spectrum& s,
                                     const MziConfig& cfg) {
  return downsampled_a0f(tau, CoincidenceModel(eta, s, cfg));
}

/// Phase-modulated scan: per delay step, synthesize the detector series and demodulate it.
struct DownsampledScan {
  Interferogram a0f;
  ComplexInterferogram z1f;
  ComplexInterferogram z2f;
};

inline DownsampledScan simulate_downsampled_scan(std::span<const double> tau, const CoincidenceModel& model,
                                                 const ModulationConfig& mod, const NoiseConfig& noise) {
  require_uniform_axis(tau);
  validate(mod);
  validate(noise);
  const std::vector<double> axis(tau.begin(), tau.end());
  DownsampledScan scan{Interferogram{axis, std::vector<double>(axis.size()), InterferogramKind::Comp0f},
                       ComplexInterferogram{axis, std::vector<cplx>(axis.size()), Harmonic::Z1f},
                       ComplexInterferogram{axis, std::vector<cplx>(axis.size()), Harmonic::Z2f}};
  parallel_for(axis.size(), [&](std::size_t k) {
    const auto series = synthesize_timeseries(snapshot(model, axis[k]), mod, noise, k);
    scan.a0f.values[k] = phase_average(series.values);
    scan.z1f.values[k] = lockin_extract(series, 1, axis[k], model.config(), mod).z();
    scan.z2f.values[k] = lockin_extract(series, 2, axis[k], model.config(), mod).z();
  });
  return scan;
}

/// Scan without phase modulation. The relative phase drifts as a random walk from step to step
/// and each step records one Poisson draw when counting noise is on.
inline Interferogram simulate_fully_sampled_scan(std::span<const double> tau, const CoincidenceModel& model,
                                                 const NoiseConfig& noise) {
  require_uniform_axis(tau);
  validate(noise);
  std::vector<double> drift(tau.size(), 0.0);
  if (noise.phase_jitter_sigma > 0.0) {
    auto rng = detail::stream_rng(noise.seed, 0xD1F7ull);
    std::normal_distribution<double> step(0.0, noise.phase_jitter_sigma);
    for (std::size_t k = 1; k < drift.size(); ++k) drift[k] = drift[k - 1] + step(rng);
  }
  Interferogram out{std::vector<double>(tau.begin(), tau.end()), std::vector<double>(tau.size()),
                    InterferogramKind::FullySampled};
  const double counts_per_unit = 0.5 * noise.mean_counts_per_sample;
  parallel_for(tau.size(), [&](std::size_t k) {
    const double rate = snapshot(model, tau[k]).rate(drift[k]);
    if (noise.poisson_enabled) {
      auto rng = detail::stream_rng(noise.seed, k);
      out.values[k] = detail::poisson_sample(rng, rate, counts_per_unit);
    } else {
      out.values[k] = rate;
    }
  });
  return out;
}

}  // namespace eppmzi
