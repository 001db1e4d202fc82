#pragma once

// Periodic pseudospectral machinery on (-L, L]: the grid, Fourier multiplier
// symbols, and their application to real sample vectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "mim/error.hpp"

namespace mim {

using cplx = std::complex<double>;
using Samples = std::vector<double>;

/// Symbol parity; `none` marks building blocks such as S_omega that have neither.
enum class Parity { even, odd, none };

/// Uniform periodic grid x_j = -L + (j + 1) h, j = 0..N-1, covering (-L, L].
class Grid {
 public:
  Grid(double half_length = 16.0, int size = 256) : L_(half_length), N_(size) {
    if (!(L_ > 0.0)) throw Error("grid half-length must be positive");
    if (N_ < 2 || N_ % 2 != 0) throw Error("grid size must be a positive even integer");
    h_ = 2.0 * L_ / N_;
  }

  double half_length() const noexcept { return L_; }
  int size() const noexcept { return N_; }
  double spacing() const noexcept { return h_; }

  double x(int j) const noexcept { return -L_ + (j + 1) * h_; }

  Samples points() const {
    Samples xs(N_);
    for (int j = 0; j < N_; ++j) xs[j] = x(j);
    return xs;
  }

  /// Index of x = 0.
  int origin() const noexcept { return N_ / 2 - 1; }

  /// Index of -x_j (periodically).
  int mirror(int j) const noexcept { return ((N_ - 2 - j) % N_ + N_) % N_; }

  /// Signed wavenumber index of FFT slot k: 0..N/2-1, then -N/2..-1.
  int wavenumber(int k) const noexcept { return k < N_ / 2 ? k : k - N_; }

  /// Frequency xi = pi m / L of FFT slot k.
  double frequency(int k) const noexcept { return std::numbers::pi * wavenumber(k) / L_; }

  double nyquist() const noexcept { return std::numbers::pi * N_ / (2.0 * L_); }

  /// FFT slot holding frequency xi, or -1 if xi is not a grid frequency.
  int slot_of(double xi, double tol = 1e-9) const noexcept {
    const double m = xi * L_ / std::numbers::pi;
    const double mr = std::round(m);
    if (std::abs(m - mr) > tol || mr >= N_ / 2.0 || mr < -N_ / 2.0) return -1;
    const int mi = static_cast<int>(mr);
    return mi >= 0 ? mi : mi + N_;
  }

  /// Throws OffGridError unless xi is a grid frequency strictly below Nyquist.
  void require_resolved(double xi) const {
    if (!(std::abs(xi) < nyquist()))
      throw OffGridError("frequency " + std::to_string(xi) + " is not below the grid Nyquist frequency " +
                         std::to_string(nyquist()) + "; increase N");
    if (slot_of(xi) < 0)
      throw OffGridError("frequency " + std::to_string(xi) + " is not on the frequency grid; use integer L");
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.L_ == b.L_ && a.N_ == b.N_; }

 private:
  double L_;
  int N_;
  double h_;
};

/// A Fourier multiplier: a function of real frequency with definite parity.
struct SpectralSymbol {
  std::function<cplx(double)> evaluator;
  Parity parity = Parity::even;
  std::string description;

  cplx operator()(double xi) const { return evaluator(xi); }
};

inline SpectralSymbol operator+(const SpectralSymbol& a, const SpectralSymbol& b) {
  return {[fa = a.evaluator, fb = b.evaluator](double xi) { return fa(xi) + fb(xi); }, a.parity,
          "(" + a.description + " + " + b.description + ")"};
}

inline SpectralSymbol operator*(double s, const SpectralSymbol& a) {
  return {[fa = a.evaluator, s](double xi) { return s * fa(xi); }, a.parity,
          std::to_string(s) + "*" + a.description};
}

/// Largest parity defect |m(-xi) -+ m(xi)| over the sample frequencies.
inline double symbol_parity_defect(const SpectralSymbol& m, std::span<const double> xis) {
  double worst = 0.0;
  if (m.parity == Parity::none) return HUGE_VAL;
  const double sign = m.parity == Parity::even ? 1.0 : -1.0;
  for (double xi : xis) worst = std::max(worst, std::abs(m(-xi) - sign * m(xi)));
  return worst;
}

// ---------------------------------------------------------------------------
// Transforms. Frequency ordering and scaling stay internal to this header.

namespace detail {

inline std::vector<cplx> forward(std::span<const double> f) {
  std::vector<cplx> in(f.begin(), f.end()), out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  return out;
}

inline std::vector<cplx> inverse(const std::vector<cplx>& spec) {
  std::vector<cplx> out;
  Eigen::FFT<double> fft;
  fft.inv(out, spec);
  return out;
}

inline double sup_norm(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

/// A symbol sampled on a grid's frequencies, checked for conjugate symmetry so
/// that real inputs map to real outputs. The Nyquist slot carries the real
/// part (the symmetric average of the two Nyquist branches).
class DiscreteMultiplier {
 public:
  DiscreteMultiplier(const SpectralSymbol& m, const Grid& grid) : grid_(grid), values_(grid.size()) {
    const int N = grid.size();
    for (int k = 0; k < N; ++k) values_[k] = m(grid.frequency(k));
    for (int k = 1; k < N / 2; ++k) {
      const cplx a = values_[k], b = values_[N - k];
      if (std::abs(b - std::conj(a)) > 1e-12 * std::max(1.0, std::abs(a)))
        throw SymmetryError("multiplier '" + m.description + "' is not conjugate-symmetric at xi = " +
                            std::to_string(grid.frequency(k)));
    }
    values_[N / 2] = values_[N / 2].real();
    values_[0] = values_[0].real();
  }

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }

  Samples apply(std::span<const double> f) const {
    const int N = grid_.size();
    if (static_cast<int>(f.size()) != N) throw Error("sample vector length does not match grid size");
    auto spec = detail::forward(f);
    for (int k = 0; k < N; ++k) spec[k] *= values_[k];
    const auto back = detail::inverse(spec);
    Samples out(N);
    double imag = 0.0;
    for (int j = 0; j < N; ++j) {
      out[j] = back[j].real();
      imag = std::max(imag, std::abs(back[j].imag()));
    }
    if (imag > 1e-10 * std::max(detail::sup_norm(f), 1e-300) && imag > 0.0)
      throw SymmetryError("multiplier output has non-negligible imaginary part");
    return out;
  }

  /// Dense N x N matrix of the operator (circulant).
  Eigen::MatrixXd matrix() const {
    const int N = grid_.size();
    Samples e0(N, 0.0);
    e0[0] = 1.0;
    const Samples col = apply(e0);
    Eigen::MatrixXd M(N, N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) M(i, j) = col[((i - j) % N + N) % N];
    return M;
  }

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

/// Inverse transform of m(xi_k) * fhat(xi_k).
inline Samples apply_multiplier(std::span<const double> f, const SpectralSymbol& m, const Grid& grid) {
  return DiscreteMultiplier(m, grid).apply(f);
}

/// max_k |m(xi_k)| over the grid frequencies.
inline double sup_symbol(const SpectralSymbol& m, const Grid& grid) {
  double s = 0.0;
  for (int k = 0; k < grid.size(); ++k) s = std::max(s, std::abs(m(grid.frequency(k))));
  return s;
}

/// Trigonometric interpolant of grid samples, evaluable (with derivatives) anywhere.
class SpectralInterpolant {
 public:
  SpectralInterpolant(std::span<const double> f, const Grid& grid) : grid_(grid), coeffs_(detail::forward(f)) {
    if (static_cast<int>(f.size()) != grid.size()) throw Error("sample vector length does not match grid size");
    for (auto& c : coeffs_) c /= static_cast<double>(grid.size());
  }

  double operator()(double x, int derivative = 0) const {
    const int N = grid_.size();
    const double s = x - grid_.x(0);
    double acc = 0.0;
    for (int k = 0; k < N; ++k) {
      const double xi = grid_.frequency(k);
      if (k == N / 2) {
        // Nyquist mode: real cosine only.
        const double xn = grid_.nyquist();
        const double c = coeffs_[k].real();
        switch (derivative % 4) {
          case 0: acc += c * std::cos(xn * s); break;
          case 1: acc += -c * std::pow(xn, derivative) * std::sin(xn * s); break;
          case 2: acc += -c * std::pow(xn, derivative) * std::cos(xn * s); break;
          default: acc += c * std::pow(xn, derivative) * std::sin(xn * s); break;
        }
        continue;
      }
      cplx factor = 1.0;
      for (int d = 0; d < derivative; ++d) factor *= cplx(0.0, xi);
      acc += (coeffs_[k] * factor * std::polar(1.0, xi * s)).real();
    }
    return acc;
  }

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

// ---------------------------------------------------------------------------
// Parity and norms on the grid.

/// max_j |f(x_j) -+ f(-x_j)|.
inline double parity_defect(std::span<const double> f, const Grid& grid, Parity parity) {
  if (parity == Parity::none) throw Error("parity_defect needs even or odd");
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  double worst = 0.0;
  for (int j = 0; j < grid.size(); ++j) worst = std::max(worst, std::abs(f[j] - sign * f[grid.mirror(j)]));
  return worst;
}

inline Samples symmetrize(std::span<const double> f, const Grid& grid, Parity parity) {
  if (parity == Parity::none) throw Error("symmetrize needs even or odd");
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  Samples out(f.size());
  for (int j = 0; j < grid.size(); ++j) out[j] = 0.5 * (f[j] + sign * f[grid.mirror(j)]);
  return out;
}

inline double sup_norm(std::span<const double> f) { return detail::sup_norm(f); }

/// Discrete L2 norm sqrt(h * sum f_j^2).
inline double l2_norm(std::span<const double> f, const Grid& grid) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(grid.spacing() * s);
}

inline Samples difference(std::span<const double> a, std::span<const double> b) {
  Samples out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace mim
