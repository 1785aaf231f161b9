#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eppmzi {

// Internal units: angular frequency in rad/fs, time in fs, length in mm.

/// Speed of light in nm/fs.
inline constexpr double kSpeedOfLight = 299.792458;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double omega_from_wavelength(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  return kTwoPi * kSpeedOfLight / wavelength_nm;
}

inline double wavelength_from_omega(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("angular frequency must be > 0");
  return kTwoPi * kSpeedOfLight / omega;
}

/// Angular-frequency width spanned by [center - fwhm/2, center + fwhm/2] in wavelength.
inline double fwhm_omega_from_wavelength(double center_nm, double fwhm_nm) {
  if (!(fwhm_nm > 0.0) || !(center_nm > fwhm_nm / 2.0))
    throw std::invalid_argument("wavelength FWHM must be positive and smaller than twice the center");
  return kTwoPi * kSpeedOfLight * fwhm_nm / (center_nm * center_nm - 0.25 * fwhm_nm * fwhm_nm);
}

/// Gaussian 1/e half-width alpha for a given FWHM, FWHM = 2 alpha sqrt(ln 2).
inline double gaussian_alpha_from_fwhm(double fwhm_omega) {
  return fwhm_omega / (2.0 * std::sqrt(std::numbers::ln2));
}

/// Delay produced by a path-length step (nm) in the scanned arm.
inline double convert_path_step(double step_nm) {
  if (!(step_nm > 0.0)) throw std::invalid_argument("path step must be > 0");
  return step_nm / kSpeedOfLight;
}

inline double wrap_phase(double phase) {
  return std::remainder(phase, kTwoPi);
}

}  // namespace eppmzi
