#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "eppmzi/grid.hpp"
#include "eppmzi/interferogram.hpp"
#include "eppmzi/media.hpp"
#include "eppmzi/parallel.hpp"
#include "eppmzi/spectra.hpp"

namespace eppmzi {

/// Mach-Zehnder settings: beam-splitter amplitudes, arm phases, pump and reference frequencies.
struct MziConfig {
  double refl_r = std::numbers::sqrt2 / 2.0;
  double trans_t = std::numbers::sqrt2 / 2.0;
  double phi_1 = 0.0;    // rad, delay arm
  double phi_2 = 0.0;    // rad, sample arm
  double omega_p = 0.0;  // rad/fs
  double omega_R = 0.0;  // rad/fs
};

inline MziConfig make_mzi_config(double omega_0, double omega_R) {
  MziConfig cfg;
  cfg.omega_p = 2.0 * omega_0;
  cfg.omega_R = omega_R;
  return cfg;
}

inline void validate(const MziConfig& cfg) {
  if (!(cfg.refl_r > 0.0) || !(cfg.trans_t > 0.0))
    throw std::invalid_argument("beam-splitter amplitudes must be > 0");
  if (std::abs(cfg.refl_r * cfg.refl_r + cfg.trans_t * cfg.trans_t - 1.0) > 1e-12)
    throw std::invalid_argument("beam splitters must be lossless: r^2 + t^2 = 1");
}

/// The conjugate-index flip requires the pump to sit at twice the grid center.
inline void require_degenerate_pump(const MziConfig& cfg, const FrequencyGrid& grid) {
  if (std::abs(cfg.omega_p - 2.0 * grid.omega_0()) > 1e-12 * cfg.omega_p + 1e-15)
    throw std::invalid_argument("pump frequency must equal twice the grid center frequency");
}

/// Input-to-output amplitudes g_ja for one frequency component.
struct MziTransfer {
  cplx da;
  cplx db;
  cplx ca;
  cplx cb;
};

inline MziTransfer mzi_transfer(double omega, double tau, cplx eta, const MziConfig& cfg) {
  const double r = cfg.refl_r;
  const double t = cfg.trans_t;
  const cplx sample = eta * std::polar(1.0, cfg.phi_2);
  const cplx delay = std::polar(1.0, omega * tau + cfg.phi_1);
  return MziTransfer{r * t * sample + r * t * delay, -r * r * sample + t * t * delay,
                     t * t * sample - r * r * delay, -r * t * sample - r * t * delay};
}

inline MziTransfer mzi_transfer(double omega, double tau, const TransferFunction& eta, const MziConfig& cfg) {
  return mzi_transfer(omega, tau, eta.values[eta.grid.index_of(omega)], cfg);
}

inline cplx mzi_transfer_da(double omega, double tau, const TransferFunction& eta, const MziConfig& cfg) {
  return mzi_transfer(omega, tau, eta, cfg).da;
}

/// The four two-photon amplitudes whose sum is g_da(omega) g_da(omega_tilde):
/// two HOM pathways (one photon per arm) and two N00N pathways (both photons in one arm).
struct PathwayTerms {
  cplx i_H;
  cplx ii_H;
  cplx iii_N;
  cplx iv_N;

  cplx sum() const { return i_H + ii_H + iii_N + iv_N; }
};

inline PathwayTerms pathway_terms(double omega, double omega_tilde, double tau, cplx eta_omega,
                                  cplx eta_tilde, const MziConfig& cfg) {
  const double rt2 = cfg.refl_r * cfg.refl_r * cfg.trans_t * cfg.trans_t;
  const cplx hom_phase = std::polar(1.0, cfg.phi_1 + cfg.phi_2);
  return PathwayTerms{
      rt2 * eta_omega * std::polar(1.0, omega_tilde * tau) * hom_phase,
      rt2 * eta_tilde * std::polar(1.0, omega * tau) * hom_phase,
      rt2 * eta_omega * eta_tilde * std::polar(1.0, 2.0 * cfg.phi_2),
      rt2 * std::polar(1.0, (omega + omega_tilde) * tau + 2.0 * cfg.phi_1),
  };
}

inline PathwayTerms pathway_terms(double omega, double omega_tilde, double tau, const TransferFunction& eta,
                                  const MziConfig& cfg) {
  return pathway_terms(omega, omega_tilde, tau, eta.values[eta.grid.index_of(omega)],
                       eta.values[eta.grid.index_of(omega_tilde)], cfg);
}

/// Coincidence rates R~_dd = R_dd / (2 r^4 t^4 N) at output port D for a fixed sample and
/// pair spectrum. Holds precomputed per-frequency factors; immutable and safe to share.
///
/// The fully-sampled rate splits by phase signature as
///   R~(tau, dphi) = R~_0f(tau) + 2 Re[e^{i dphi} I_1f(tau)] + Re[e^{-i(2 w0 tau - 2 dphi)} I_2f]
/// with dphi = phi_2 - phi_1.
class CoincidenceModel {
 public:
  CoincidenceModel(const TransferFunction& eta, const Spectrum& spectrum, const MziConfig& cfg)
      : grid_(spectrum.grid), cfg_(cfg) {
    require_same_grid(eta.grid, spectrum.grid);
    validate(cfg);
    require_degenerate_pump(cfg, grid_);
    const std::size_t n = grid_.size();
    eta_ = eta.values;
    spectrum_ = spectrum.values;
    offset_.resize(n);
    c0f_.resize(n);
    c1f_.resize(n);
    static_0f_ = 0.0;
    i2f_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = grid_.conjugate(i);
      const cplx a = eta_[i];
      const cplx b = eta_[j];
      const double w = grid_.weight(i);
      const double s = spectrum.values[i];
      // Exchange symmetry makes only the symmetric part of S physical; the 1f term is the only
      // one whose integrand is not already symmetric under omega -> 2 w0 - omega.
      const double s_sym = 0.5 * (s + spectrum.values[j]);
      offset_[i] = grid_.offset(i);
      static_0f_ += 0.5 * w * (std::norm(a) + std::norm(b) + std::norm(a * b) + 1.0) * s;
      c0f_[i] = w * a * std::conj(b) * s;
      c1f_[i] = w * a * (1.0 + std::norm(b)) * s_sym;
      i2f_ += w * a * b * s;
    }
  }

  const FrequencyGrid& grid() const { return grid_; }
  const MziConfig& config() const { return cfg_; }
  double omega_0() const { return grid_.omega_0(); }

  /// Phase-independent (HOM + N00N population) rate.
  double rate_0f(double tau) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < c0f_.size(); ++i) {
      // exp(i (2 w0 - 2 w) tau) = exp(-2 i x tau)
      const double ph = -2.0 * offset_[i] * tau;
      acc += c0f_[i].real() * std::cos(ph) - c0f_[i].imag() * std::sin(ph);
    }
    return static_0f_ + acc;
  }

  /// I_1f(tau) = int eta(w) {1 + |eta(2 w0 - w)|^2} e^{-i w tau} S(w) dw.
  cplx rate_1f_integrand(double tau) const { return std::polar(1.0, -omega_0() * tau) * envelope_1f(tau); }

  /// I_2f = int eta(w) eta(2 w0 - w) S(w) dw (independent of delay).
  cplx rate_2f_integrand() const { return i2f_; }

  double rate_1f(double tau, double delta_phi) const {
    return 2.0 * (std::polar(1.0, delta_phi) * rate_1f_integrand(tau)).real();
  }
  double rate_2f(double tau, double delta_phi) const {
    return (std::polar(1.0, -(2.0 * omega_0() * tau - 2.0 * delta_phi)) * i2f_).real();
  }

  /// Direct quadrature of |g_da(w) g_da(2 w0 - w)|^2 S(w) / (2 r^4 t^4).
  double rate_full(double tau, double delta_phi) const {
    MziConfig c = cfg_;
    c.phi_2 = c.phi_1 + delta_phi;
    const double r = c.refl_r;
    const double t = c.trans_t;
    const double norm = 1.0 / (2.0 * r * r * r * r * t * t * t * t);
    double acc = 0.0;
    for (std::size_t i = 0; i < eta_.size(); ++i) {
      const std::size_t j = grid_.conjugate(i);
      const cplx g1 = mzi_transfer(grid_.omega(i), tau, eta_[i], c).da;
      const cplx g2 = mzi_transfer(grid_.omega(j), tau, eta_[j], c).da;
      acc += grid_.weight(i) * std::norm(g1 * g2) * spectrum_[i];
    }
    return norm * acc;
  }

  /// Fully-sampled rate assembled from the harmonic components.
  double rate_full_harmonic(double tau, double delta_phi) const {
    return rate_0f(tau) + rate_1f(tau, delta_phi) + rate_2f(tau, delta_phi);
  }

  /// Down-sampled lock-in signals referenced to omega_R.
  cplx z1f(double tau) const {
    return std::polar(1.0, -(omega_0() - cfg_.omega_R) * tau) * envelope_1f(tau);
  }
  cplx z2f(double tau) const {
    return 0.5 * std::polar(1.0, -2.0 * (omega_0() - cfg_.omega_R) * tau) * i2f_;
  }

 private:
  cplx envelope_1f(double tau) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < c1f_.size(); ++i) acc += c1f_[i] * std::polar(1.0, -offset_[i] * tau);
    return acc;
  }

  FrequencyGrid grid_;
  MziConfig cfg_;
  std::vector<cplx> eta_;
  std::vector<double> spectrum_;
  std::vector<double> offset_;
  std::vector<cplx> c0f_;
  std::vector<cplx> c1f_;
  double static_0f_ = 0.0;
  cplx i2f_ = 0.0;
};

inline double rate_full(double tau, double delta_phi, const TransferFunction& eta, const Spectrum& s,
                        const MziConfig& cfg) {
  return CoincidenceModel(eta, s, cfg).rate_full(tau, delta_phi);
}

inline double rate_0f(double tau, const TransferFunction& eta, const Spectrum& s, const MziConfig& cfg) {
  return CoincidenceModel(eta, s, cfg).rate_0f(tau);
}

inline cplx rate_1f_integrand(double tau, const TransferFunction& eta, const Spectrum& s, const MziConfig& cfg) {
  return CoincidenceModel(eta, s, cfg).rate_1f_integrand(tau);
}

inline cplx rate_2f_integrand(const TransferFunction& eta, const Spectrum& s, const MziConfig& cfg) {
  return CoincidenceModel(eta, s, cfg).rate_2f_integrand();
}

/// Fully-sampled scan at fixed relative phase.
inline Interferogram sweep_full(std::span<const double> tau, const CoincidenceModel& model, double delta_phi = 0.0) {
  Interferogram out{std::vector<double>(tau.begin(), tau.end()), std::vector<double>(tau.size()),
                    InterferogramKind::FullySampled};
  parallel_for(tau.size(), [&](std::size_t k) { out.values[k] = model.rate_full(tau[k], delta_phi); });
  return out;
}

inline Interferogram sweep_0f(std::span<const double> tau, const CoincidenceModel& model) {
  Interferogram out{std::vector<double>(tau.begin(), tau.end()), std::vector<double>(tau.size()),
                    InterferogramKind::Comp0f};
  parallel_for(tau.size(), [&](std::size_t k) { out.values[k] = model.rate_0f(tau[k]); });
  return out;
}

/// Rates of a Gaussian pair spectrum with no sample, in closed form.
struct GaussianRates {
  double r0f;
  double r1f;
  double r2f;

  double total() const { return r0f + r1f + r2f; }
};

inline GaussianRates closed_form_rates_gaussian(double tau, double delta_phi, double alpha, double omega_0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double a2t2 = alpha * alpha * tau * tau;
  return GaussianRates{2.0 + std::exp(-a2t2), 4.0 * std::exp(-0.25 * a2t2) * std::cos(delta_phi - omega_0 * tau),
                       std::cos(2.0 * delta_phi - 2.0 * omega_0 * tau)};
}

/// Joint spectral amplitude psi(omega_i, omega_j) on grid x grid, row-major.
struct JointSpectralAmplitude {
  FrequencyGrid grid;
  std::vector<cplx> values;

  cplx operator()(std::size_t i, std::size_t j) const { return values[i * grid.size() + j]; }
  cplx& operator()(std::size_t i, std::size_t j) { return values[i * grid.size() + j]; }
};

/// exp[-(w + w~ - w_p)^2 / pump_width^2] exp[-(w - w~)^2 / difference_width^2].
inline JointSpectralAmplitude double_gaussian_jsa(const FrequencyGrid& grid, double omega_p, double pump_width,
                                                  double difference_width) {
  if (!(pump_width > 0.0) || !(difference_width > 0.0))
    throw std::invalid_argument("JSA widths must be > 0");
  const std::size_t n = grid.size();
  JointSpectralAmplitude psi{grid, std::vector<cplx>(n * n)};
  const double detuning = omega_p - 2.0 * grid.omega_0();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sum = grid.offset(i) + grid.offset(j) - detuning;
      const double diff = grid.offset(i) - grid.offset(j);
      psi(i, j) = std::exp(-sum * sum / (pump_width * pump_width) - diff * diff / (difference_width * difference_width));
    }
  }
  return psi;
}

/// Difference width whose narrow-pump marginal is the Gaussian spectrum of half-width alpha.
inline double matched_difference_width(double alpha) { return 2.0 * std::numbers::sqrt2 * alpha; }

/// Coincidence rate from the full two-photon amplitude f_dd = g_da(w) g_da(w~) [psi(w,w~) + psi(w~,w)],
/// normalized by the total pair probability so it shares the R~ scale of the delta-pump rates.
inline double brute_force_rate(const JointSpectralAmplitude& psi, double tau, double delta_phi,
                               const TransferFunction& eta, const MziConfig& cfg) {
  require_same_grid(psi.grid, eta.grid);
  validate(cfg);
  const auto& grid = psi.grid;
  const std::size_t n = grid.size();
  if (psi.values.size() != n * n) throw std::invalid_argument("JSA size does not match grid");
  MziConfig c = cfg;
  c.phi_2 = c.phi_1 + delta_phi;
  std::vector<cplx> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = mzi_transfer(grid.omega(i), tau, eta.values[i], c).da;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = grid.weight(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = wi * grid.weight(j);
      const double p2 = std::norm(psi(i, j) + psi(j, i));
      num += w * std::norm(g[i] * g[j]) * p2;
      den += w * p2;
    }
  }
  if (!(den > 0.0)) throw std::invalid_argument("JSA is zero everywhere");
  const double r = c.refl_r;
  const double t = c.trans_t;
  return num / den / (2.0 * r * r * r * r * t * t * t * t);
}

}  // namespace eppmzi
