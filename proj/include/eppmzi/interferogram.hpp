#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace eppmzi {

using cplx = std::complex<double>;

enum class InterferogramKind { FullySampled, Comp0f };
enum class Harmonic { Z1f = 1, Z2f = 2 };

inline int harmonic_order(Harmonic h) { return static_cast<int>(h); }

/// Real normalized coincidence rate versus delay (fs).
struct Interferogram {
  std::vector<double> tau;
  std::vector<double> values;
  InterferogramKind kind = InterferogramKind::FullySampled;
};

/// Lock-in output X + iY versus delay (fs).
struct ComplexInterferogram {
  std::vector<double> tau;
  std::vector<cplx> values;
  Harmonic harmonic = Harmonic::Z1f;
};

/// Checks that the axis is strictly increasing with a uniform step and returns the step.
inline double require_uniform_axis(std::span<const double> tau) {
  if (tau.size() < 2) throw std::invalid_argument("delay axis needs at least two samples");
  const double step = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
  if (!(step > 0.0)) throw std::invalid_argument("delay axis must be strictly increasing");
  for (std::size_t k = 1; k < tau.size(); ++k) {
    const double d = tau[k] - tau[k - 1];
    if (!(d > 0.0) || std::abs(d - step) > 1e-6 * step)
      throw std::invalid_argument("delay axis is not uniformly sampled");
  }
  return step;
}

/// Delay samples k * step for |k * step| <= half_span; always contains tau = 0.
inline std::vector<double> make_tau_axis(double step, double half_span) {
  if (!(step > 0.0)) throw std::invalid_argument("delay step must be > 0");
  if (!(half_span >= 0.0)) throw std::invalid_argument("delay span must be >= 0");
  const auto k_max = static_cast<long long>(std::floor(half_span / step * (1.0 + 1e-12)));
  std::vector<double> tau;
  tau.reserve(static_cast<std::size_t>(2 * k_max + 1));
  for (long long k = -k_max; k <= k_max; ++k) tau.push_back(static_cast<double>(k) * step);
  return tau;
}

}  // namespace eppmzi
