#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace eppmzi {

/// Uniform angular-frequency axis, symmetric about its center frequency.
///
/// The point count is even and the samples sit at omega_0 + (i - (n-1)/2) * step, so every
/// sample i has its mirror n-1-i with omega_i + omega_{n-1-i} = 2 omega_0. Offsets from the
/// center are formed from odd integers times step/2, which makes the mirror pairs exactly
/// symmetric in floating point.
class FrequencyGrid {
 public:
  FrequencyGrid(double omega_0, double omega_step, std::size_t n_points)
      : omega_0_(omega_0), step_(omega_step), n_(n_points) {
    if (!(omega_step > 0.0)) throw std::invalid_argument("grid step must be > 0");
    if (n_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (n_points % 2 != 0) throw std::invalid_argument("grid point count must be even");
  }

  std::size_t size() const { return n_; }
  double omega_0() const { return omega_0_; }
  double step() const { return step_; }
  double span() const { return static_cast<double>(n_ - 1) * step_; }
  double omega_min() const { return omega(0); }
  double omega_max() const { return omega(n_ - 1); }

  /// omega_i - omega_0.
  double offset(std::size_t i) const {
    const auto odd = 2.0 * static_cast<double>(i) - static_cast<double>(n_ - 1);
    return odd * (0.5 * step_);
  }
  double omega(std::size_t i) const { return omega_0_ + offset(i); }

  /// Index of 2 omega_0 - omega_i.
  std::size_t conjugate(std::size_t i) const { return n_ - 1 - i; }

  /// Fractional position of omega on the index axis.
  double fractional_index(double omega) const {
    return (omega - omega_0_) / step_ + 0.5 * static_cast<double>(n_ - 1);
  }

  /// Exact sample index of omega; throws if omega is not a grid sample.
  std::size_t index_of(double omega) const {
    const double f = fractional_index(omega);
    const double r = std::round(f);
    if (r < 0.0 || r > static_cast<double>(n_ - 1) || std::abs(f - r) > 1e-6) {
      std::ostringstream os;
      os << "angular frequency " << omega << " rad/fs is not on the grid";
      throw std::out_of_range(os.str());
    }
    return static_cast<std::size_t>(r);
  }

  std::vector<double> omegas() const {
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < n_; ++i) w[i] = omega(i);
    return w;
  }

  /// Trapezoid quadrature weight of sample i.
  double weight(std::size_t i) const { return (i == 0 || i + 1 == n_) ? 0.5 * step_ : step_; }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double omega_0_;
  double step_;
  std::size_t n_;
};

inline FrequencyGrid make_grid(double omega_0, double span, std::size_t n_points) {
  if (!(span > 0.0)) throw std::invalid_argument("grid span must be > 0");
  if (n_points < 2 || n_points % 2 != 0)
    throw std::invalid_argument("grid point count must be even and >= 2");
  return FrequencyGrid(omega_0, span / static_cast<double>(n_points - 1), n_points);
}

inline void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b) {
  if (!(a == b)) throw std::invalid_argument("frequency grids do not match");
}

template <typename T>
double trapezoid(const FrequencyGrid& grid, std::span<const T> values) {
  if (values.size() != grid.size()) throw std::invalid_argument("value count does not match grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += grid.weight(i) * values[i];
  return sum;
}

}  // namespace eppmzi
