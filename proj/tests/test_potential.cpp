#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mim/potential.hpp"

using namespace mim;

namespace {

std::vector<Potential> all_kinds() {
  return {Potential(FputCubic{}), Potential(FputCubic{1.0, -0.5}), Potential(FputQuartic{1.0, 2.0}),
          Potential(Toda{1.0, 1.0}),   Potential(Toda{2.0, 0.5}),       Potential(LennardJones{1.0, 1.0}),
          Potential(HertzianPrecompressed{1.0, 1.5}), Potential(HertzianPrecompressed{0.3, 2.5})};
}

}  // namespace

TEST(Potential, FputCubicForceAtOne) { EXPECT_DOUBLE_EQ(Potential().d1(1.0), 2.0); }

TEST(Potential, ForceVanishesAtZero) {
  for (const auto& p : all_kinds()) EXPECT_EQ(p.d1(0.0), 0.0) << p.to_string();
}

TEST(Potential, EnergyVanishesAtZero) {
  for (const auto& p : all_kinds()) EXPECT_NEAR(p.value(0.0), 0.0, 1e-15) << p.to_string();
}

TEST(Potential, HertzianForce) {
  // 1.5^1.5 - 1, 30-digit reference.
  EXPECT_NEAR(Potential(HertzianPrecompressed{1.0, 1.5}).d1(0.5), 0.837117307087383573647963056029, 1e-15);
}

TEST(Potential, HertzianLosesContactBelowKink) {
  const Potential h(HertzianPrecompressed{1.0, 1.5});
  EXPECT_DOUBLE_EQ(h.d1(-2.0), -1.0);
  EXPECT_EQ(h.d2(-2.0), 0.0);
}

TEST(Potential, SecondDerivativeMatchesCentralDifference) {
  // The step-1e-4 truncation error is h^2 V''''/6; with d = 1 the LJ wall has
  // V''''/V'' ~ 6e3 and swamps the 1e-6 bound, so that law is checked at d = 4.
  const double step = 1e-4;
  auto kinds = all_kinds();
  for (auto& k : kinds)
    if (k.kind() == PotentialKind::lennard_jones) k = Potential(LennardJones{1.0, 4.0});
  for (const auto& p : kinds) {
    // 100 points in (lo, 1.5], staying clear of the Hertz kink and the LJ pole.
    double lo = -0.9;
    if (p.kind() == PotentialKind::lennard_jones) lo = -0.5;
    for (int i = 0; i < 100; ++i) {
      const double r = lo + (1.5 - lo) * (i + 0.5) / 100.0;
      const double fd = (p.d1(r + step) - p.d1(r - step)) / (2.0 * step);
      EXPECT_LE(std::abs(fd - p.d2(r)), 1e-6 * (1.0 + std::abs(p.d2(r)))) << p.to_string() << " r=" << r;
    }
  }
}

TEST(Potential, FirstDerivativeMatchesCentralDifference) {
  const double step = 1e-5;
  for (const auto& p : all_kinds()) {
    double lo = -0.9;
    if (p.kind() == PotentialKind::lennard_jones) lo = -0.5;
    for (int i = 0; i < 50; ++i) {
      const double r = lo + (1.5 - lo) * (i + 0.5) / 50.0;
      const double fd = (p.value(r + step) - p.value(r - step)) / (2.0 * step);
      EXPECT_LE(std::abs(fd - p.d1(r)), 1e-6 * (1.0 + std::abs(p.d1(r)))) << p.to_string() << " r=" << r;
    }
  }
}

TEST(Potential, FputCubicIsSuperquadratic) {
  const Potential p;
  double prev = -HUGE_VAL;
  for (int i = 1; i <= 200; ++i) {
    const double r = 2.0 * i / 200.0;
    const double q = p.value(r) / (r * r);
    EXPECT_GT(q, prev) << r;
    prev = q;
  }
}

TEST(Potential, NotAssumedEven) {
  // The cubic law is asymmetric: V(-r) != V(r).
  const Potential p;
  EXPECT_GT(std::abs(p.value(0.5) - p.value(-0.5)), 1e-3);
}

TEST(Potential, TodaNormalization) {
  const Potential t(Toda{2.0, 0.5});
  EXPECT_EQ(t.d1(0.0), 0.0);
  EXPECT_NEAR(t.d2(0.0), 1.0, 1e-15);  // V''(0) = ab
}

TEST(Potential, LennardJonesDomainError) {
  const Potential lj(LennardJones{1.0, 1.0});
  EXPECT_THROW(lj.d1(-1.0), DomainError);
  EXPECT_THROW(lj.value(-1.5), DomainError);
  EXPECT_NO_THROW(lj.d1(-0.99));
  EXPECT_EQ(lj.domain_lower_bound(), -1.0);
}

TEST(Potential, ConstructorValidates) {
  EXPECT_THROW(Potential(HertzianPrecompressed{0.0, 1.5}), DomainError);
  EXPECT_THROW(Potential(HertzianPrecompressed{1.0, 1.0}), DomainError);
  EXPECT_THROW(Potential(Toda{1.0, -1.0}), DomainError);
  EXPECT_THROW(Potential(LennardJones{1.0, 0.0}), DomainError);
}

TEST(Potential, ParseRoundTrip) {
  for (const auto& p : all_kinds()) {
    const Potential q = Potential::parse(p.to_string());
    for (double r : {-0.3, 0.0, 0.7}) EXPECT_EQ(q.d1(r), p.d1(r)) << p.to_string();
  }
  EXPECT_EQ(Potential::parse("fput-cubic").d1(1.0), 2.0);
  EXPECT_EQ(Potential::parse("hertzian:2").kind(), PotentialKind::hertzian);
}

TEST(Potential, ParseRejectsGarbage) {
  EXPECT_THROW(Potential::parse("morse"), ConfigError);
  EXPECT_THROW(Potential::parse("toda:1,x"), ConfigError);
  EXPECT_THROW(Potential::parse("toda:1,2,3"), ConfigError);
}

TEST(Potential, BadDerivativeOrder) { EXPECT_THROW(Potential().eval(3, 0.0), Error); }
