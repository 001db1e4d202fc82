#pragma once

// Finite periodic mass-in-mass chain in displacement coordinates:
//   U_j'' = V'(U_{j+1} - U_j) - V'(U_j - U_{j-1}) + kappa (u_j - U_j)
//   mu u_j'' = kappa (U_j - u_j)
// closed by U_{j+M} = U_j + S. With mu = 0 the resonators are dropped and the
// chain is monatomic FPUT.

#include <cmath>
#include <vector>

#include "mim/error.hpp"
#include "mim/potential.hpp"

namespace mim {

struct LatticeState {
  std::vector<double> U, u, Udot, udot;
  double mu = 0.0;
  double kappa = 0.0;
  Potential pot;
  double S = 0.0;  // fixed total elongation
  double t = 0.0;

  LatticeState() = default;
  LatticeState(int M, double mu_, double kappa_, Potential pot_)
      : U(M, 0.0), u(M, 0.0), Udot(M, 0.0), udot(M, 0.0), mu(mu_), kappa(kappa_), pot(std::move(pot_)) {
    if (M < 1) throw Error("lattice needs at least one site");
    if (mu < 0.0 || kappa < 0.0) throw Error("mu and kappa must be non-negative");
  }

  int sites() const noexcept { return static_cast<int>(U.size()); }
  bool has_resonators() const noexcept { return mu > 0.0; }

  /// R_j = U_{j+1} - U_j with periodic closure through S.
  double stretch(int j) const {
    const int M = sites();
    const int jj = ((j % M) + M) % M;
    return jj == M - 1 ? U[0] + S - U[M - 1] : U[jj + 1] - U[jj];
  }

  /// r_j = u_j - U_j.
  double resonator_offset(int j) const { return has_resonators() ? u[j] - U[j] : 0.0; }

  std::vector<double> stretches() const {
    std::vector<double> R(sites());
    for (int j = 0; j < sites(); ++j) R[j] = stretch(j);
    return R;
  }
};

struct Accelerations {
  std::vector<double> bead, resonator;
};

inline void accelerations(const LatticeState& s, Accelerations& a) {
  const int M = s.sites();
  a.bead.resize(M);
  a.resonator.resize(M);
  std::vector<double> f(M);
  for (int j = 0; j < M; ++j) f[j] = s.pot.d1(s.stretch(j));
  for (int j = 0; j < M; ++j) a.bead[j] = f[j] - f[(j + M - 1) % M];
  if (s.has_resonators()) {
    for (int j = 0; j < M; ++j) {
      const double spring = s.kappa * (s.u[j] - s.U[j]);
      a.bead[j] += spring;
      a.resonator[j] = -spring / s.mu;
    }
  } else {
    std::fill(a.resonator.begin(), a.resonator.end(), 0.0);
  }
}

inline Accelerations accelerations(const LatticeState& s) {
  Accelerations a;
  accelerations(s, a);
  return a;
}

/// H = sum 1/2 Udot^2 + 1/2 mu udot^2 + V(R_j) + 1/2 kappa (u_j - U_j)^2.
inline double energy(const LatticeState& s) {
  double h = 0.0;
  for (int j = 0; j < s.sites(); ++j) {
    h += 0.5 * s.Udot[j] * s.Udot[j] + s.pot.value(s.stretch(j));
    if (s.has_resonators()) {
      const double r = s.u[j] - s.U[j];
      h += 0.5 * s.mu * s.udot[j] * s.udot[j] + 0.5 * s.kappa * r * r;
    }
  }
  return h;
}

inline double momentum(const LatticeState& s) {
  double p = 0.0;
  for (int j = 0; j < s.sites(); ++j) p += s.Udot[j] + (s.has_resonators() ? s.mu * s.udot[j] : 0.0);
  return p;
}

/// sum |Udot_j| + mu |udot_j|: scale for relative momentum drift when P itself is small.
inline double momentum_scale(const LatticeState& s) {
  double p = 0.0;
  for (int j = 0; j < s.sites(); ++j) p += std::abs(s.Udot[j]) + (s.has_resonators() ? s.mu * std::abs(s.udot[j]) : 0.0);
  return p;
}

}  // namespace mim
