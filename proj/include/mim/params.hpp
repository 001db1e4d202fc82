#pragma once

// Material/wave parameters of the mass-in-mass chain and the antiresonance
// relation omega = sqrt(kappa (1 + mu) / (c^2 mu)) = 2 pi n.

#include <cmath>
#include <numbers>
#include <string>

#include "mim/error.hpp"

namespace mim {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Resonator mass mu_n = kappa / (4 pi^2 c^2 n^2 - kappa) that makes (c, mu_n, kappa) antiresonant.
inline double antiresonant_mu(double c, double kappa, int n) {
  if (n < 1) throw Error("antiresonance index n must be >= 1");
  const double denom = two_pi * two_pi * c * c * n * n - kappa;
  if (!(denom > 0.0) || !(kappa > 0.0))
    throw NoPositiveMassError("no positive antiresonant mass: need 4 pi^2 c^2 n^2 > kappa > 0");
  return kappa / denom;
}

/// Spring constant kappa_n = 4 pi^2 c^2 n^2 mu / (1 + mu).
inline double antiresonant_kappa(double c, double mu, int n) {
  if (n < 1) throw Error("antiresonance index n must be >= 1");
  if (!(mu > 0.0)) throw Error("resonator mass must be positive");
  if (c == 0.0) throw Error("wave speed must be nonzero");
  return two_pi * two_pi * c * c * n * n * mu / (1.0 + mu);
}

/// Natural frequency of the resonator equation in the travelling frame.
inline double natural_frequency(double c, double mu, double kappa) {
  return std::sqrt(kappa * (1.0 + mu) / (c * c * mu));
}

struct WaveParams {
  double c = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  int n = 0;
  double omega = 0.0;

  /// Fixed kappa, mu derived (small-resonator branch).
  static WaveParams with_kappa(double c, double kappa, int n) {
    return from_material(c, antiresonant_mu(c, kappa, n), kappa);
  }

  /// Fixed mu, kappa derived (stiff-spring branch).
  static WaveParams with_mu(double c, double mu, int n) {
    return from_material(c, mu, antiresonant_kappa(c, mu, n));
  }

  /// Arbitrary (c, mu, kappa); n is the nearest integer to omega / 2 pi (at least 1).
  static WaveParams from_material(double c, double mu, double kappa) {
    if (!(mu > 0.0) || !(kappa > 0.0)) throw Error("mu and kappa must be positive");
    if (c == 0.0) throw Error("wave speed must be nonzero");
    WaveParams p{c, mu, kappa, 0, natural_frequency(c, mu, kappa)};
    p.n = std::max(1, static_cast<int>(std::lround(p.omega / two_pi)));
    return p;
  }

  /// Relative defect |omega - 2 pi n| / (2 pi n).
  double antiresonance_mismatch() const { return std::abs(omega - two_pi * n) / (two_pi * n); }

  bool is_antiresonant(double rel_tol = 1e-12) const { return antiresonance_mismatch() <= rel_tol; }

  void require_antiresonant(double rel_tol = 1e-12) const {
    if (!is_antiresonant(rel_tol))
      throw AntiresonanceError("parameters are not antiresonant: |omega - 2 pi n|/(2 pi n) = " +
                               std::to_string(antiresonance_mismatch()));
  }
};

}  // namespace mim
