#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mim/spectral.hpp"
#include "mim/symbols.hpp"

using namespace mim;
using std::numbers::pi;

namespace {

Samples sample(const Grid& g, auto&& f) {
  Samples out(g.size());
  for (int j = 0; j < g.size(); ++j) out[j] = f(g.x(j));
  return out;
}

Samples random_samples(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Samples f(n);
  for (auto& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST(Grid, Geometry) {
  const Grid g;
  EXPECT_EQ(g.size(), 256);
  EXPECT_DOUBLE_EQ(g.half_length(), 16.0);
  EXPECT_DOUBLE_EQ(g.spacing() * g.size(), 32.0);
  EXPECT_DOUBLE_EQ(g.x(g.size() - 1), 16.0);
  EXPECT_DOUBLE_EQ(g.x(g.origin()), 0.0);
  for (int j = 0; j < g.size(); ++j) {
    if (j == g.size() - 1) continue;  // x = L is its own mirror on the circle
    EXPECT_NEAR(g.x(g.mirror(j)), -g.x(j), 1e-13);
  }
  EXPECT_DOUBLE_EQ(g.nyquist(), 8.0 * pi);
}

TEST(Grid, ResonantFrequencyOnGrid) {
  const Grid g;
  EXPECT_EQ(g.slot_of(2.0 * pi), 32);  // k = 2nL
  EXPECT_EQ(g.slot_of(-2.0 * pi), 256 - 32);
  EXPECT_EQ(g.slot_of(1.0), -1);
  EXPECT_NO_THROW(g.require_resolved(6.0 * pi));
  EXPECT_THROW(g.require_resolved(8.0 * pi), OffGridError);  // Nyquist itself
  EXPECT_THROW(g.require_resolved(1.0), OffGridError);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(16.0, 255), Error);
  EXPECT_THROW(Grid(-1.0, 256), Error);
}

TEST(Multiplier, DeltaOfConstantIsZero) {
  const Grid g;
  const Samples one(g.size(), 1.0);
  for (double v : apply_multiplier(one, symbol_delta(), g)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Multiplier, HarmonicIsEigenfunction) {
  const Grid g;
  const double L = g.half_length();
  const Samples f = sample(g, [&](double x) { return std::cos(pi * x / L); });
  const Samples out = apply_multiplier(f, symbol_sinc2(), g);
  const double s = std::sin(pi / (2.0 * L)) / (pi / (2.0 * L));
  for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(out[j], s * s * f[j], 1e-14);
}

TEST(Multiplier, DeltaShiftsGaussian) {
  const Grid g;
  auto gauss = [](double x) { return std::exp(-x * x); };
  const Samples out = apply_multiplier(sample(g, gauss), symbol_delta(), g);
  for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(out[j], gauss(g.x(j) + 0.5) - gauss(g.x(j) - 0.5), 1e-8);
}

TEST(Multiplier, SpectralSecondDerivative) {
  const Grid g;
  auto gauss = [](double x) { return std::exp(-x * x); };
  const Samples out = apply_multiplier(sample(g, gauss), symbol_derivative(2), g);
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    EXPECT_NEAR(out[j], (4.0 * x * x - 2.0) * gauss(x), 1e-10);
  }
}

TEST(Multiplier, RoundTripIdentity) {
  for (int N : {64, 256, 1024}) {
    const Samples f = random_samples(N, 7u + N);
    const auto back = detail::inverse(detail::forward(f));
    double err = 0.0;
    for (int j = 0; j < N; ++j) err = std::max(err, std::abs(back[j] - f[j]));
    EXPECT_LE(err, 1e-13 * detail::sup_norm(f)) << N;
  }
}

TEST(Multiplier, ParityPreservation) {
  const Grid g;
  const Samples even = symmetrize(random_samples(g.size(), 3u), g, Parity::even);
  const auto p = WaveParams::with_mu(2.0, 0.4, 1);
  const Samples a = apply_multiplier(even, symbol_sinc2(), g);
  EXPECT_LE(parity_defect(a, g, Parity::even), 1e-12 * sup_norm(a));
  const Samples b = apply_multiplier(even, symbol_gamma(p), g);
  EXPECT_LE(parity_defect(b, g, Parity::even), 1e-12 * sup_norm(b));
  const Samples c = apply_multiplier(even, symbol_sigma(p), g);
  EXPECT_LE(parity_defect(c, g, Parity::odd), 1e-12 * sup_norm(c));
  const Samples d = apply_multiplier(even, symbol_delta(), g);
  EXPECT_LE(parity_defect(d, g, Parity::odd), 1e-12 * sup_norm(d));
}

TEST(Multiplier, NonSymmetricSymbolRejected) {
  const Grid g;
  const Samples f(g.size(), 1.0);
  EXPECT_THROW(apply_multiplier(f, symbol_s_omega(2.0 * pi), g), SymmetryError);
}

TEST(Multiplier, DenseMatrixMatchesApply) {
  const Grid g(8.0, 64);
  const DiscreteMultiplier m(symbol_sinc2() + symbol_delta(), g);
  const Samples f = random_samples(g.size(), 11u);
  const Samples a = m.apply(f);
  const Eigen::VectorXd b = m.matrix() * Eigen::Map<const Eigen::VectorXd>(f.data(), g.size());
  for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-13);
}

TEST(SupSymbol, Examples) {
  const Grid g;
  EXPECT_DOUBLE_EQ(sup_symbol(symbol_sinc2(), g), 1.0);
  EXPECT_NEAR(sup_symbol(symbol_delta(), g), 2.0, 1e-15);  // xi = pi is the 16th grid frequency
}

TEST(Interpolant, ReproducesSmoothFunctionOffGrid) {
  const Grid g;
  auto gauss = [](double x) { return std::exp(-x * x); };
  const SpectralInterpolant p(sample(g, gauss), g);
  for (double x : {-3.3, -0.5, 0.0, 0.123, 1.0625, 2.7}) {
    EXPECT_NEAR(p(x), gauss(x), 1e-13) << x;
    EXPECT_NEAR(p(x, 1), -2.0 * x * gauss(x), 1e-12) << x;
    EXPECT_NEAR(p(x, 2), (4.0 * x * x - 2.0) * gauss(x), 1e-11) << x;
  }
}

TEST(Interpolant, NyquistModeIsRealCosine) {
  const Grid g(4.0, 16);
  const Samples f = sample(g, [&](double x) { return std::cos(g.nyquist() * x); });
  const SpectralInterpolant p(f, g);
  for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(p(g.x(j)), f[j], 1e-14);
  // Between nodes the interpolant is the cosine itself, not a complex exponential.
  EXPECT_NEAR(p(0.1), std::cos(g.nyquist() * 0.1), 1e-13);
}

TEST(Norms, DiscreteL2) {
  const Grid g(1.0, 4);
  const Samples f{1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(l2_norm(f, g), std::sqrt(2.0));
}

TEST(Parity, SymbolParityDefect) {
  std::vector<double> xis;
  for (int k = 0; k < 64; ++k) xis.push_back(0.37 * k);
  const auto p = WaveParams::with_kappa(1.25, 20.0, 2);
  EXPECT_EQ(symbol_parity_defect(symbol_sigma(p), xis), 0.0);
  EXPECT_EQ(symbol_parity_defect(symbol_gamma(p), xis), 0.0);
  EXPECT_EQ(symbol_parity_defect(symbol_psi(p), xis), 0.0);
  EXPECT_EQ(symbol_parity_defect(symbol_sinc2(), xis), 0.0);
  EXPECT_EQ(symbol_parity_defect(symbol_delta(), xis), 0.0);
  EXPECT_EQ(symbol_parity_defect(symbol_s_omega(1.0), xis), HUGE_VAL);
}
