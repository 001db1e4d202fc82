#pragma once

// Fourier symbols of the difference and coupling operators. The antiresonant
// operators are evaluated through their entire sinc-difference forms; the raw
// rational forms are kept for identity checks away from xi = +-omega.

#include <cmath>

#include <boost/math/special_functions/sinc.hpp>

#include "mim/params.hpp"
#include "mim/spectral.hpp"

namespace mim {

/// Unnormalized sinc(x) = sin(x)/x, sinc(0) = 1.
inline double sinc(double x) { return boost::math::sinc_pi(x); }

enum class SymbolForm { entire, raw };

/// delta f(x) = f(x + 1/2) - f(x - 1/2): symbol 2i sin(xi/2).
inline SpectralSymbol symbol_delta() {
  return {[](double xi) { return cplx(0.0, 2.0 * std::sin(0.5 * xi)); }, Parity::odd, "delta"};
}

/// d^{-2} delta^2: symbol sinc^2(xi/2).
inline SpectralSymbol symbol_sinc2() {
  return {[](double xi) {
            const double s = sinc(0.5 * xi);
            return cplx(s * s, 0.0);
          },
          Parity::even, "sinc^2(xi/2)"};
}

/// Spectral derivative of the given order: symbol (i xi)^order.
inline SpectralSymbol symbol_derivative(int order) {
  return {[order](double xi) {
            cplx v = 1.0;
            for (int d = 0; d < order; ++d) v *= cplx(0.0, xi);
            return v;
          },
          order % 2 == 0 ? Parity::even : Parity::odd, "d^" + std::to_string(order)};
}

/// S_omega: symbol sinc((xi - omega)/2). Not real-preserving on its own; only
/// its differences (inside Sigma and Psi) can be applied to real data.
inline SpectralSymbol symbol_s_omega(double omega) {
  return {[omega](double xi) { return cplx(sinc(0.5 * (xi - omega)), 0.0); }, Parity::none, "S_omega"};
}

inline SpectralSymbol symbol_zero() {
  return {[](double) { return cplx(0.0, 0.0); }, Parity::even, "0"};
}

/// Sigma: rho2 = Sigma V'(rho1). Odd symbol.
inline SpectralSymbol symbol_sigma(const WaveParams& p, SymbolForm form = SymbolForm::entire) {
  const double c2 = p.c * p.c;
  if (form == SymbolForm::raw) {
    return {[=](double xi) {
              return cplx(0.0, 2.0 * p.mu * std::sin(0.5 * xi) / (c2 * p.mu * xi * xi - p.kappa * (1.0 + p.mu)));
            },
            Parity::odd, "Sigma(raw)"};
  }
  p.require_antiresonant();
  const double w = p.omega;
  const double pref = std::cos(0.5 * w) / (2.0 * c2 * w);
  return {[=](double xi) { return cplx(0.0, pref * (sinc(0.5 * (xi - w)) - sinc(0.5 * (xi + w)))); },
          Parity::odd, "Sigma"};
}

/// Psi: the remainder of Gamma after its sinc^2 part. Even symbol.
inline SpectralSymbol symbol_psi(const WaveParams& p) {
  p.require_antiresonant();
  const double w = p.omega;
  const double pref = p.kappa * std::cos(0.5 * w) / (p.c * p.c * w * w * w);
  return {[=](double xi) {
            return cplx(pref * std::sin(0.5 * xi) * (sinc(0.5 * (xi - w)) - sinc(0.5 * (xi + w))), 0.0);
          },
          Parity::even, "Psi"};
}

/// Gamma = kappa d^{-2} delta Sigma. Entire form: -(kappa/(c^2 omega^2)) sinc^2(xi/2) + Psi(xi).
inline SpectralSymbol symbol_gamma(const WaveParams& p, SymbolForm form = SymbolForm::entire) {
  const double c2 = p.c * p.c;
  if (form == SymbolForm::raw) {
    return {[=](double xi) {
              const double s = std::sin(0.5 * xi);
              return cplx(4.0 * p.kappa * p.mu * s * s / (xi * xi * (c2 * p.mu * xi * xi - p.kappa * (1.0 + p.mu))),
                          0.0);
            },
            Parity::even, "Gamma(raw)"};
  }
  p.require_antiresonant();
  const double a = p.kappa / (c2 * p.omega * p.omega);
  const auto psi = symbol_psi(p);
  return {[a, psi = psi.evaluator](double xi) {
            const double s = sinc(0.5 * xi);
            return -a * s * s + psi(xi);
          },
          Parity::even, "Gamma"};
}

}  // namespace mim
