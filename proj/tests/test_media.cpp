#include <gtest/gtest.h>

#include <numbers>

#include "common.hpp"

using namespace eppmzi;
using namespace eppmzi::testing;

namespace {

std::vector<double> slice(const std::vector<double>& v, std::size_t b, std::size_t e) {
  return {v.begin() + static_cast<std::ptrdiff_t>(b), v.begin() + static_cast<std::ptrdiff_t>(e)};
}

NotchParams paper_notch() { return NotchParams{}; }

}  // namespace

TEST(Identity, AllOnes) {
  const auto g = grid_for(35.0, 256);
  const auto eta = eta_identity(g);
  for (auto v : eta.values) EXPECT_EQ(v, cplx(1.0, 0.0));
}

TEST(Slab, QuartzDefaults) {
  const SlabParams p;
  EXPECT_DOUBLE_EQ(p.length_mm, 30.8);
  EXPECT_NEAR(p.half_gvd, 37.985, 1e-12);
  EXPECT_NEAR(p.gvd(), 75.970, 1e-12);
}

TEST(Slab, UnitMagnitudeAndQuadraticPhase) {
  const auto g = grid_for(35.0);
  const auto eta = eta_slab(g, SlabParams{});
  for (auto v : eta.values) EXPECT_NEAR(std::abs(v), 1.0, 1e-15);
  // 37.985 fs^2/mm * (0.1 rad/fs)^2 * 30.8 mm
  EXPECT_NEAR(slab_phase(0.1, SlabParams{}), 11.69938, 1e-5);
  const std::size_t i = g.size() / 2 + 200;
  EXPECT_NEAR(wrap_phase(std::arg(eta.values[i]) - slab_phase(g.offset(i), SlabParams{})), 0.0, 1e-9);
}

TEST(Slab, ZeroDispersionIsIdentity) {
  const auto g = grid_for(35.0, 256);
  const auto eta = eta_slab(g, slab_from_gvd(30.8, 0.0));
  for (auto v : eta.values) EXPECT_EQ(v, cplx(1.0, 0.0));
  EXPECT_THROW(eta_slab(g, slab_from_gvd(0.0, 75.97)), std::invalid_argument);
}

TEST(Notch, MagnitudeFormula) {
  // Steepness 100 fs^2/rad^2: 1/2 + atan(-100 w^2)/pi
  const NotchParams soft{3.527, 0.05285, 100.0};
  EXPECT_NEAR(notch_magnitude_at(3.527, soft), 0.4134, 2e-4);
  EXPECT_NEAR(notch_magnitude_at(3.527, soft),
              0.5 + std::atan(-100.0 * 0.05285 * 0.05285) / std::numbers::pi, 1e-15);
  EXPECT_NEAR(notch_magnitude_at(3.527 + 0.05285, soft), 0.5, 1e-12);
  EXPECT_NEAR(notch_magnitude_at(3.527 - 0.05285, soft), 0.5, 1e-12);
  EXPECT_NEAR(notch_magnitude_at(1e6, soft), 1.0, 1e-9);
}

TEST(Notch, SharpEdgesApproachRectangle) {
  const auto p = paper_notch();
  EXPECT_NEAR(notch_magnitude_at(p.center, p), 0.0, 1e-9);
  EXPECT_NEAR(notch_magnitude_at(p.center + 0.9 * p.width, p), 0.0, 1e-9);
  EXPECT_NEAR(notch_magnitude_at(p.center + 1.1 * p.width, p), 1.0, 1e-9);
}

TEST(Notch, RejectsBadParameters) {
  const auto g = grid_for(35.0, 256);
  EXPECT_THROW(notch_magnitude(g, NotchParams{3.5, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(notch_magnitude(g, NotchParams{3.5, 0.05, -1.0}), std::invalid_argument);
}

TEST(KramersKronig, ConstantMagnitudeHasZeroPhase) {
  const auto g = grid_for(35.0, 1024);
  const std::vector<double> mag(g.size(), 0.7);
  for (double phi : kramers_kronig_phase(mag, g)) EXPECT_NEAR(phi, 0.0, 1e-9);
}

TEST(KramersKronig, Errors) {
  const auto small = grid_for(35.0, 32);
  EXPECT_THROW(kramers_kronig_phase(std::vector<double>(32, 1.0), small), std::invalid_argument);
  const auto g = grid_for(35.0, 256);
  EXPECT_THROW(kramers_kronig_phase(std::vector<double>(256, 0.0), g), std::invalid_argument);
  EXPECT_THROW(kramers_kronig_phase(std::vector<double>(100, 1.0), g), std::invalid_argument);
}

TEST(KramersKronig, LorentzianHilbertPair) {
  // ln|eta| = -A g^2/(x^2+g^2) pairs with phi = -A g x/(x^2+g^2) for a response analytic in the
  // upper half plane.
  const auto g = grid_for(35.0);
  const double xc = g.omega_0() + 0.05;
  const double amp = 1.5;
  const double gamma = 0.02;
  std::vector<double> mag(g.size());
  std::vector<double> truth(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.omega(i) - xc;
    const double d = x * x + gamma * gamma;
    mag[i] = std::exp(-amp * gamma * gamma / d);
    truth[i] = -amp * gamma * x / d;
  }
  const auto phi = kramers_kronig_phase(mag, g);
  const std::size_t b = g.size() / 4;
  const std::size_t e = 3 * g.size() / 4;
  std::vector<double> diff;
  for (std::size_t i = b; i < e; ++i) diff.push_back(phi[i] - truth[i]);
  EXPECT_LT(rms(diff) / rms(slice(truth, b, e)), 0.01);
}

TEST(KramersKronig, NotchPhaseIsOddAboutCenter) {
  // Grid centered on the notch so the magnitude is symmetric sample by sample.
  const auto p = paper_notch();
  const auto g = make_grid(p.center, 1.6, 4096);
  const auto phi = kramers_kronig_phase(notch_magnitude(g, p), g);
  double scale = 0.0;
  for (double v : phi) scale = std::max(scale, std::abs(v));
  EXPECT_GT(scale, 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(phi[i], -phi[g.conjugate(i)], 1e-6);
}

TEST(KramersKronig, NotchPhaseIsDispersiveShaped) {
  // Below the notch the phase rises towards the blue edge and above it falls back, with the
  // same sign structure as -g x/(x^2+g^2) of an absorption line.
  const auto p = paper_notch();
  const auto g = grid_for(35.0);
  const auto phi = kramers_kronig_phase(notch_magnitude(g, p), g);
  const auto nearest = [&](double w) { return static_cast<std::size_t>(std::lround(g.fractional_index(w))); };
  const std::size_t below = nearest(p.center - 2.0 * p.width);
  const std::size_t above = nearest(p.center + 2.0 * p.width);
  EXPECT_GT(phi[below], 0.0);
  EXPECT_LT(phi[above], 0.0);
}

TEST(EtaNotch, MagnitudeIsExactAndPhaseIdempotent) {
  const auto g = grid_for(35.0);
  const auto p = paper_notch();
  const auto eta = eta_notch(g, p);
  const auto mag = notch_magnitude(g, p);
  const auto phi = kramers_kronig_phase(mag, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(std::abs(eta.values[i]), mag[i], 1e-15);
    EXPECT_LE(std::abs(eta.values[i]), 1.0 + 1e-12);
  }
  const auto again = kramers_kronig_phase(eta.magnitude(), g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mag[i] > 0.0) worst = std::max(worst, std::abs(again[i] - phi[i]));
  EXPECT_LT(worst, 1e-9);
}

TEST(Causality, NotchImpulseResponse) {
  const auto g = grid_for(35.0);
  const auto ext = minimum_phase_extended(notch_magnitude(g, paper_notch()), g);
  EXPECT_LT(anticausal_energy_fraction(ext), 1e-3);
}

TEST(Causality, LorentzianImpulseResponse) {
  const auto g = grid_for(35.0);
  std::vector<double> mag(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.offset(i);
    mag[i] = std::exp(-0.02 * 0.02 / (x * x + 0.02 * 0.02));
  }
  EXPECT_LT(anticausal_energy_fraction(minimum_phase_extended(mag, g)), 1e-3);
}

TEST(Causality, FlippedSignIsAntiCausal) {
  // Most of the notch response is the prompt part at t = 0; the rest moves to negative time
  // when the phase sign is reversed.
  const auto g = grid_for(35.0);
  auto ext = minimum_phase_extended(notch_magnitude(g, paper_notch()), g);
  const double causal = anticausal_energy_fraction(ext);
  for (auto& v : ext) v = std::conj(v);
  const double flipped = anticausal_energy_fraction(ext);
  EXPECT_GT(flipped, 0.1);
  EXPECT_GT(flipped, 100.0 * causal);
}

TEST(Causality, IdentityAndDelayedSlab) {
  const auto g = grid_for(35.0);
  EXPECT_LT(anticausal_energy_fraction(eta_identity(g).values), 1e-3);
  // A slab delays its output; the group delay keeps the chirped response at positive time.
  const auto delayed = eta_slab(g, slab_from_gvd(30.8, 75.970, 100.0));
  EXPECT_LT(anticausal_energy_fraction(delayed.values), 1e-3);
}
