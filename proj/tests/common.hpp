#pragma once

#include <cmath>
#include <vector>

#include "eppmzi/eppmzi.hpp"

namespace eppmzi::testing {

inline double omega_532() { return omega_from_wavelength(532.0); }
inline double omega_633() { return omega_from_wavelength(633.0); }

/// Grid of n points spanning 8 FWHM around 532 nm.
inline FrequencyGrid grid_for(double fwhm_nm, std::size_t n = 4096) {
  const double fwhm = fwhm_omega_from_wavelength(532.0, fwhm_nm);
  return make_grid(omega_532(), 8.0 * fwhm, n);
}

inline double alpha_for(double fwhm_nm) { return gaussian_alpha_from_fwhm(fwhm_omega_from_wavelength(532.0, fwhm_nm)); }

inline Spectrum gaussian_for(const FrequencyGrid& grid, double fwhm_nm) {
  return gaussian_spectrum(grid, fwhm_omega_from_wavelength(532.0, fwhm_nm));
}

inline MziConfig default_mzi() { return make_mzi_config(omega_532(), omega_633()); }

inline double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace eppmzi::testing
