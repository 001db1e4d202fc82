#pragma once

// Travelling waves of the mass-in-mass chain.
//
// rho1 solves the regularized equation
//     c^2 rho1 - (d^{-2} delta^2 + Gamma) V'(rho1) = 0
// on the even subspace, and rho2 = Sigma V'(rho1). The monatomic background
// sigma solves the same equation with Gamma = 0. Newton with a dense LU solve
// is the workhorse; the Picard map R(eta) is an independent cross-check.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "mim/error.hpp"
#include "mim/params.hpp"
#include "mim/potential.hpp"
#include "mim/spectral.hpp"
#include "mim/symbols.hpp"

namespace mim {

struct NewtonOptions {
  double tolerance = 1e-11;  // sup-norm of the regularized residual
  int max_iterations = 50;
  int max_halvings = 8;
  double parity_tolerance = 1e-8;
};

struct ContractionOptions {
  double step_tolerance = 1e-12;
  int max_iterations = 500;
  double max_correction = 1.0;
};

// ---------------------------------------------------------------------------
// Even subspace: an even vector is fixed by its values at x in [0, L].

class EvenBasis {
 public:
  explicit EvenBasis(const Grid& grid) : grid_(grid) {}

  int dimension() const noexcept { return grid_.size() / 2 + 1; }

  /// Full grid index of reduced coordinate q (x = q h).
  int full_index(int q) const noexcept { return grid_.origin() + q; }

  Eigen::VectorXd restrict(std::span<const double> f) const {
    Eigen::VectorXd y(dimension());
    for (int q = 0; q < dimension(); ++q) y[q] = f[full_index(q)];
    return y;
  }

  Samples extend(const Eigen::VectorXd& y) const {
    Samples f(grid_.size());
    for (int q = 0; q < dimension(); ++q) {
      const int j = full_index(q);
      f[j] = y[q];
      f[grid_.mirror(j)] = y[q];
    }
    return f;
  }

  /// P A E for a full N x N operator A.
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& A) const {
    const int d = dimension();
    Eigen::MatrixXd R(d, d);
    for (int q = 0; q < d; ++q) {
      const int j = full_index(q);
      const int jm = grid_.mirror(j);
      for (int r = 0; r < d; ++r) {
        const int i = full_index(r);
        R(r, q) = A(i, j) + (jm != j ? A(i, jm) : 0.0);
      }
    }
    return R;
  }

 private:
  Grid grid_;
};

// ---------------------------------------------------------------------------

/// Jacobian of the regularized residual: c^2 Id - (d^{-2} delta^2 + B) diag(s V''(rho)).
class LinearizedOperator {
 public:
  LinearizedOperator(double c, Samples weight, const DiscreteMultiplier& op, Eigen::MatrixXd dense)
      : c2_(c * c), weight_(std::move(weight)), op_(op), dense_(std::move(dense)) {}

  const Eigen::MatrixXd& matrix() const noexcept { return dense_; }

  Samples apply(std::span<const double> v) const {
    Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::VectorXd out = dense_ * vv;
    return Samples(out.data(), out.data() + out.size());
  }

  /// Same action computed as multiplier after pointwise product.
  Samples apply_spectral(std::span<const double> v) const {
    Samples wv(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) wv[j] = weight_[j] * v[j];
    Samples out = op_.apply(wv);
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = c2_ * v[j] - out[j];
    return out;
  }

 private:
  double c2_;
  Samples weight_;
  DiscreteMultiplier op_;
  Eigen::MatrixXd dense_;
};

/// c^2 rho - (d^{-2} delta^2 + B)(s V'(rho)) = 0 with a chosen coupling symbol B
/// and potential scale s.
class RegularizedProblem {
 public:
  RegularizedProblem(double c, Potential pot, const Grid& grid, const SpectralSymbol& coupling,
                     double potential_scale = 1.0)
      : c_(c),
        pot_(std::move(pot)),
        scale_(potential_scale),
        grid_(grid),
        op_(symbol_sinc2() + coupling, grid),
        op_matrix_(op_.matrix()) {}

  double speed() const noexcept { return c_; }
  double potential_scale() const noexcept { return scale_; }
  const Grid& grid() const noexcept { return grid_; }
  const Potential& potential() const noexcept { return pot_; }
  const DiscreteMultiplier& operator_multiplier() const noexcept { return op_; }

  Samples force(std::span<const double> rho) const {
    Samples f(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) f[j] = scale_ * pot_.d1(rho[j]);
    return f;
  }

  Samples residual(std::span<const double> rho) const {
    Samples r = op_.apply(force(rho));
    for (std::size_t j = 0; j < rho.size(); ++j) r[j] = c_ * c_ * rho[j] - r[j];
    return r;
  }

  LinearizedOperator jacobian(std::span<const double> rho) const {
    const int N = grid_.size();
    Samples w(N);
    for (int j = 0; j < N; ++j) w[j] = scale_ * pot_.d2(rho[j]);
    Eigen::MatrixXd J = -op_matrix_;
    for (int j = 0; j < N; ++j) J.col(j) *= w[j];
    J.diagonal().array() += c_ * c_;
    return LinearizedOperator(c_, std::move(w), op_, std::move(J));
  }

 private:
  double c_;
  Potential pot_;
  double scale_;
  Grid grid_;
  DiscreteMultiplier op_;
  Eigen::MatrixXd op_matrix_;
};

struct NewtonResult {
  Samples solution;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on the even subspace. The iterate is even by construction.
inline NewtonResult newton_even(const RegularizedProblem& problem, std::span<const double> seed,
                                const NewtonOptions& opt = {}) {
  const Grid& grid = problem.grid();
  const EvenBasis basis(grid);
  Eigen::VectorXd y = basis.restrict(symmetrize(seed, grid, Parity::even));

  auto eval = [&](const Eigen::VectorXd& yy, Samples& rho, Samples& res) {
    rho = basis.extend(yy);
    res = problem.residual(rho);
    const double drift = parity_defect(res, grid, Parity::even);
    if (drift > opt.parity_tolerance * std::max(1.0, sup_norm(res)))
      throw SymmetryError("residual lost even parity during Newton iteration (defect " + std::to_string(drift) + ")");
    return sup_norm(res);
  };

  Samples rho, res;
  double rnorm = eval(y, rho, res);
  int it = 0;
  while (rnorm > opt.tolerance) {
    if (it == opt.max_iterations)
      throw ConvergenceError("Newton did not converge in " + std::to_string(it) + " iterations (residual " +
                                 std::to_string(rnorm) + ")",
                             rnorm, it);
    ++it;
    const Eigen::MatrixXd Jr = basis.reduce(problem.jacobian(rho).matrix());
    const Eigen::VectorXd step = Jr.partialPivLu().solve(-basis.restrict(res));
    double lambda = 1.0, used = 1.0;
    Samples rho_try, res_try;
    double rtry = HUGE_VAL;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      used = lambda;
      try {
        rtry = eval(y + lambda * step, rho_try, res_try);
      } catch (const DomainError&) {
        rtry = HUGE_VAL;
        continue;
      }
      if (std::isfinite(rtry) && rtry < rnorm) break;
    }
    if (!std::isfinite(rtry))
      throw ConvergenceError("Newton iterate left the potential's domain or became non-finite", rnorm, it);
    y += used * step;
    rho = std::move(rho_try);
    res = std::move(res_try);
    rnorm = rtry;
  }
  // One polishing step, kept only if it helps.
  if (rnorm > 0.0) {
    const Eigen::MatrixXd Jr = basis.reduce(problem.jacobian(rho).matrix());
    const Eigen::VectorXd y2 = y + Jr.partialPivLu().solve(-basis.restrict(res));
    Samples rho2, res2;
    const double r2 = eval(y2, rho2, res2);
    if (r2 < rnorm) {
      rho = std::move(rho2);
      rnorm = r2;
    }
  }
  return {std::move(rho), rnorm, it};
}

// ---------------------------------------------------------------------------
// Background (monatomic) wave.

struct BackgroundWave {
  Samples sigma;
  double c = 0.0;
  double potential_scale = 1.0;  // 1/(1 + mu) for the stiff-spring limit
  Grid grid;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Long-wave sech^2 (or sech for a vanishing quadratic term) seed for the chosen speed.
inline Samples long_wave_seed(double c, const Potential& pot, const Grid& grid, double potential_scale = 1.0) {
  const double a = potential_scale * pot.d2(0.0);
  const double hd = 1e-4;
  const double b2 = potential_scale * (pot.d2(hd) - pot.d2(-hd)) / (4.0 * hd);  // V'''(0)/2
  const double gap = c * c - a;
  const double B = std::sqrt(12.0 * gap / a) / 2.0;
  Samples seed(grid.size());
  if (std::abs(b2) > 1e-8) {
    const double A = 3.0 * gap / (2.0 * b2);
    for (int j = 0; j < grid.size(); ++j) {
      const double s = 1.0 / std::cosh(B * grid.x(j));
      seed[j] = A * s * s;
    }
  } else {
    const double b3 = potential_scale * (pot.d2(hd) - 2.0 * pot.d2(0.0) + pot.d2(-hd)) / (6.0 * hd * hd);
    const double Bq = std::sqrt(12.0 * gap / a);
    const double A = std::sqrt(2.0 * gap / std::max(b3, 1e-12));
    for (int j = 0; j < grid.size(); ++j) seed[j] = A / std::cosh(Bq * grid.x(j));
  }
  return seed;
}

/// Even nonzero solution of c^2 sigma = d^{-2} delta^2 (s V'(sigma)).
inline BackgroundWave solve_background(double c, const Potential& pot, const Grid& grid,
                                       std::optional<Samples> seed = std::nullopt, double potential_scale = 1.0,
                                       const NewtonOptions& opt = {}) {
  if (!(c * c > potential_scale * pot.d2(0.0)))
    throw Error("background wave needs a supersonic speed: c^2 > V''(0)");
  const RegularizedProblem problem(c, pot, grid, symbol_zero(), potential_scale);
  NewtonResult result;
  if (seed) {
    result = newton_even(problem, *seed, opt);
  } else {
    try {
      result = newton_even(problem, long_wave_seed(c, pot, grid, potential_scale), opt);
    } catch (const ConvergenceError&) {
      // Continuation in speed from the near-sonic regime, where the long-wave seed is accurate.
      const double c0 = std::sqrt(potential_scale * pot.d2(0.0)) * 1.05;
      const int steps = 20;
      Samples current = long_wave_seed(c0, pot, grid, potential_scale);
      for (int k = 0; k <= steps; ++k) {
        const double ck = c0 + (c - c0) * k / steps;
        const RegularizedProblem pk(ck, pot, grid, symbol_zero(), potential_scale);
        result = newton_even(pk, current, opt);
        current = result.solution;
      }
    }
  }
  if (sup_norm(result.solution) <= 1e-3)
    throw TrivialSolutionError("Newton converged to the zero solution");
  return {std::move(result.solution), c, potential_scale, grid, result.residual, result.iterations};
}

/// Background for the small-resonator limit (scale 1) or the stiff-spring limit (scale 1/(1+mu)).
enum class Limit { small_mass, stiff_spring };

inline BackgroundWave solve_background_for(Limit limit, const WaveParams& p, const Potential& pot, const Grid& grid,
                                           const NewtonOptions& opt = {}) {
  const double scale = limit == Limit::small_mass ? 1.0 : 1.0 / (1.0 + p.mu);
  return solve_background(p.c, pot, grid, std::nullopt, scale, opt);
}

// ---------------------------------------------------------------------------
// Mass-in-mass wave.

struct Residuals {
  double regularized = 0.0;  // equation for rho1 after d^{-2}
  double eq_i = 0.0;         // c^2 rho1'' - delta^2 V'(rho1) - kappa delta rho2
  double eq_ii = 0.0;        // c^2 mu rho2'' + kappa(1+mu) rho2 + mu delta V'(rho1)
  double antiresonance_defect = 0.0;
};

struct TravelingWaveSolution {
  Samples rho1;
  Samples rho2;
  WaveParams params;
  Grid grid;
  Residuals residuals;
  int iterations = 0;
  std::string method;
};

inline Samples pointwise_force(std::span<const double> rho, const Potential& pot) {
  Samples f(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) f[j] = pot.d1(rho[j]);
  return f;
}

/// rho2 = Sigma V'(rho1), Sigma in its entire form.
inline Samples recover_rho2(std::span<const double> rho1, const WaveParams& p, const Potential& pot,
                            const Grid& grid) {
  const double scale = std::max(1.0, sup_norm(rho1));
  if (parity_defect(rho1, grid, Parity::even) > 1e-10 * scale) throw SymmetryError("rho1 is not even");
  Samples rho2 = apply_multiplier(pointwise_force(rho1, pot), symbol_sigma(p), grid);
  if (parity_defect(rho2, grid, Parity::odd) > 1e-10 * std::max(1.0, sup_norm(rho2)))
    throw SymmetryError("recovered rho2 is not odd");
  return rho2;
}

enum class DefectFactor { with_delta, without_delta };

/// |FFT of delta V'(rho1) at xi = omega| / max_k |FFT coefficient|; 0 for zero input.
inline double antiresonance_defect(std::span<const double> rho1, const WaveParams& p, const Potential& pot,
                                   const Grid& grid, DefectFactor factor = DefectFactor::with_delta) {
  const int slot = grid.slot_of(p.omega);
  if (slot < 0) throw OffGridError("omega is not a grid frequency");
  Samples g = pointwise_force(rho1, pot);
  if (factor == DefectFactor::with_delta) g = apply_multiplier(g, symbol_delta(), grid);
  const auto spec = detail::forward(g);
  double mx = 0.0;
  for (const auto& v : spec) mx = std::max(mx, std::abs(v));
  return mx == 0.0 ? 0.0 : std::abs(spec[slot]) / mx;
}

/// Sup-norm residuals of the unregularized travelling-wave system, by spectral differentiation.
inline Residuals traveling_residuals(std::span<const double> rho1, std::span<const double> rho2, const WaveParams& p,
                                     const Potential& pot, const Grid& grid) {
  const double c2 = p.c * p.c;
  const Samples f = pointwise_force(rho1, pot);
  const DiscreteMultiplier d2(symbol_derivative(2), grid), delta(symbol_delta(), grid);
  const Samples rho1_xx = d2.apply(rho1), rho2_xx = d2.apply(rho2);
  const Samples df = delta.apply(f), ddf = delta.apply(df), drho2 = delta.apply(rho2);
  Residuals r;
  for (int j = 0; j < grid.size(); ++j) {
    r.eq_i = std::max(r.eq_i, std::abs(c2 * rho1_xx[j] - ddf[j] - p.kappa * drho2[j]));
    r.eq_ii = std::max(r.eq_ii,
                       std::abs(c2 * p.mu * rho2_xx[j] + p.kappa * (1.0 + p.mu) * rho2[j] + p.mu * df[j]));
  }
  if (grid.slot_of(p.omega) >= 0) r.antiresonance_defect = antiresonance_defect(rho1, p, pot, grid);
  return r;
}

inline void check_compatible(const WaveParams& p, const Grid& grid, const BackgroundWave& bg) {
  p.require_antiresonant();
  grid.require_resolved(p.omega);
  if (!(bg.grid == grid)) throw Error("background wave was computed on a different grid");
  if (std::abs(bg.c - p.c) > 1e-14 * std::abs(p.c)) throw Error("background wave speed differs from c");
}

inline TravelingWaveSolution assemble_solution(Samples rho1, const WaveParams& p, const Potential& pot,
                                               const Grid& grid, double regularized_residual, int iterations,
                                               std::string method) {
  TravelingWaveSolution sol;
  sol.rho2 = recover_rho2(rho1, p, pot, grid);
  sol.rho1 = std::move(rho1);
  sol.params = p;
  sol.grid = grid;
  sol.residuals = traveling_residuals(sol.rho1, sol.rho2, p, pot, grid);
  sol.residuals.regularized = regularized_residual;
  sol.iterations = iterations;
  sol.method = std::move(method);
  return sol;
}

/// Newton on c^2 rho1 - (d^{-2} delta^2 + Gamma) V'(rho1) = 0 seeded with sigma.
inline TravelingWaveSolution solve_mim(const WaveParams& p, const Potential& pot, const Grid& grid,
                                       const BackgroundWave& bg, const NewtonOptions& opt = {}) {
  check_compatible(p, grid, bg);
  const SpectralSymbol gamma = symbol_gamma(p);
  const double floor = 1e-3;
  try {
    const RegularizedProblem problem(p.c, pot, grid, gamma);
    NewtonResult r = newton_even(problem, bg.sigma, opt);
    if (sup_norm(r.solution) > floor)
      return assemble_solution(std::move(r.solution), p, pot, grid, r.residual, r.iterations, "newton");
  } catch (const ConvergenceError&) {
  }
  // Far from the large-n regime plain Newton can fall onto the zero solution;
  // continue from sigma in the coupling strength t (coupling t * Gamma).
  Samples current = bg.sigma;
  double t = 0.0, dt = 0.1;
  int total = 0;
  NewtonResult r;
  while (t < 1.0) {
    const double next = std::min(1.0, t + dt);
    try {
      const RegularizedProblem stage(p.c, pot, grid, next * gamma);
      r = newton_even(stage, current, opt);
      if (sup_norm(r.solution) <= floor) throw TrivialSolutionError("collapsed");
      current = r.solution;
      total += r.iterations;
      t = next;
    } catch (const Error&) {
      dt *= 0.5;
      if (dt < 1e-3)
        throw ConvergenceError("continuation in the coupling strength stalled at t = " + std::to_string(t),
                               r.residual, total);
    }
  }
  return assemble_solution(std::move(current), p, pot, grid, r.residual, total, "newton+continuation");
}

struct ContractionResult {
  Samples solution;  // sigma + eta
  int iterations = 0;
  double last_step = 0.0;
};

/// Picard iteration eta <- L^{-1}[d^{-2}delta^2 (W'(sigma+eta) - W'(sigma) - W''(sigma) eta) + B W'(sigma+eta)]
/// with W = s V and L = c^2 - d^{-2}delta^2 W''(sigma), starting from eta = 0.
inline ContractionResult contraction_iterate(double c, const Potential& pot, const Grid& grid,
                                             std::span<const double> sigma, const SpectralSymbol& coupling,
                                             double potential_scale, const ContractionOptions& opt = {}) {
  const int N = grid.size();
  const EvenBasis basis(grid);
  const RegularizedProblem base(c, pot, grid, symbol_zero(), potential_scale);
  const DiscreteMultiplier sinc2(symbol_sinc2(), grid);
  const DiscreteMultiplier B(coupling, grid);
  const auto lu = basis.reduce(base.jacobian(sigma).matrix()).partialPivLu();

  Samples w1(N), w2(N);
  for (int j = 0; j < N; ++j) {
    w1[j] = potential_scale * pot.d1(sigma[j]);
    w2[j] = potential_scale * pot.d2(sigma[j]);
  }

  Samples eta(N, 0.0), rho(N), quad(N), force(N);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    for (int j = 0; j < N; ++j) {
      rho[j] = sigma[j] + eta[j];
      force[j] = potential_scale * pot.d1(rho[j]);
      quad[j] = force[j] - w1[j] - w2[j] * eta[j];
    }
    const Samples a = sinc2.apply(quad), b = B.apply(force);
    Samples rhs(N);
    for (int j = 0; j < N; ++j) rhs[j] = a[j] + b[j];
    const Samples next = basis.extend(lu.solve(basis.restrict(rhs)));
    double step = 0.0;
    for (int j = 0; j < N; ++j) step = std::max(step, std::abs(next[j] - eta[j]));
    eta = next;
    if (sup_norm(eta) > opt.max_correction)
      throw ContractionError("fixed-point iterate left the unit ball after " + std::to_string(it) + " iterations", it);
    if (step <= opt.step_tolerance) {
      for (int j = 0; j < N; ++j) rho[j] = sigma[j] + eta[j];
      return {rho, it, step};
    }
  }
  throw ContractionError("fixed-point map did not converge in " + std::to_string(opt.max_iterations) + " iterations",
                         opt.max_iterations);
}

/// Contraction-map solve. Small-mass background (scale 1) uses B = Gamma; a stiff
/// background (scale 1/(1+mu)) uses B = (1+mu) Psi on the scaled force.
inline TravelingWaveSolution solve_mim_contraction(const WaveParams& p, const Potential& pot, const Grid& grid,
                                                   const BackgroundWave& bg, const ContractionOptions& opt = {}) {
  check_compatible(p, grid, bg);
  SpectralSymbol coupling;
  if (bg.potential_scale == 1.0) {
    coupling = symbol_gamma(p);
  } else if (std::abs(bg.potential_scale * (1.0 + p.mu) - 1.0) < 1e-12) {
    coupling = (1.0 + p.mu) * symbol_psi(p);
  } else {
    throw Error("background potential scale matches neither limit");
  }
  const ContractionResult r = contraction_iterate(p.c, pot, grid, bg.sigma, coupling, bg.potential_scale, opt);
  const RegularizedProblem full(p.c, pot, grid, symbol_gamma(p));
  const double res = sup_norm(full.residual(r.solution));
  return assemble_solution(r.solution, p, pot, grid, res, r.iterations, "contraction");
}

// ---------------------------------------------------------------------------
// Variation-of-parameters oracle for rho2.

struct Rho2Quadrature {
  Samples rho2;
  bool truncated = false;  // rho1 not negligible near the boundary
  std::string warning;
};

namespace detail {

/// Weights w_i = int_0^1 l_i(t) dt for the Lagrange basis on nodes -(p-1)..p.
inline std::vector<double> interval_weights(int p) {
  const int m = 2 * p;
  std::vector<double> w(m);
  for (int i = 0; i < m; ++i) {
    auto basis = [&](double t) {
      double v = 1.0;
      for (int k = 0; k < m; ++k)
        if (k != i) v *= (t - (k - (p - 1))) / static_cast<double>(i - k);
      return v;
    };
    w[i] = boost::math::quadrature::gauss<double, 30>::integrate(basis, 0.0, 1.0);
  }
  return w;
}

/// Cumulative integral from -L of periodic samples g on the grid, at each grid point.
inline Samples cumulative_integral(std::span<const double> g, const Grid& grid, int half_stencil = 12) {
  const int N = grid.size();
  const auto w = interval_weights(half_stencil);
  // Node y_m = -L + m h; y_m == x_{m-1}, and y_0 == x_{N-1} by periodicity.
  auto at = [&](int m) { return g[((m - 1) % N + N) % N]; };
  Samples out(N);
  double acc = 0.0;
  for (int m = 0; m < N; ++m) {
    double piece = 0.0;
    for (int i = 0; i < 2 * half_stencil; ++i) piece += w[i] * at(m + i - (half_stencil - 1));
    acc += grid.spacing() * piece;
    out[m] = acc;  // integral up to y_{m+1} = x_m
  }
  return out;
}

}  // namespace detail

/// rho2(x) = -(1/(c^2 omega)) int_{-L}^x sin(omega (x - y)) delta V'(rho1)(y) dy by high-order quadrature.
inline Rho2Quadrature rho2_quadrature_oracle(std::span<const double> rho1, const WaveParams& p, const Potential& pot,
                                             const Grid& grid) {
  const int N = grid.size();
  const Samples f = pointwise_force(rho1, pot);
  Samples g(N);
  const double shift = 0.5 / grid.spacing();
  if (std::abs(shift - std::round(shift)) < 1e-12) {
    const int s = static_cast<int>(std::lround(shift));
    for (int j = 0; j < N; ++j) g[j] = f[(j + s) % N] - f[((j - s) % N + N) % N];
  } else {
    const SpectralInterpolant fi(f, grid);
    for (int j = 0; j < N; ++j) g[j] = fi(grid.x(j) + 0.5) - fi(grid.x(j) - 0.5);
  }
  const double w = p.omega;
  Samples gc(N), gs(N);
  for (int j = 0; j < N; ++j) {
    gc[j] = std::cos(w * grid.x(j)) * g[j];
    gs[j] = std::sin(w * grid.x(j)) * g[j];
  }
  const Samples C = detail::cumulative_integral(gc, grid), S = detail::cumulative_integral(gs, grid);
  Rho2Quadrature out;
  out.rho2.resize(N);
  const double pref = -1.0 / (p.c * p.c * w);
  for (int j = 0; j < N; ++j) {
    const double x = grid.x(j);
    out.rho2[j] = pref * (std::sin(w * x) * C[j] - std::cos(w * x) * S[j]);
  }
  const int edge = std::max(1, N / 32);
  double edge_max = 0.0;
  for (int j = 0; j < edge; ++j) edge_max = std::max({edge_max, std::abs(rho1[j]), std::abs(rho1[N - 1 - j])});
  if (edge_max > 1e-8) {
    out.truncated = true;
    out.warning = "rho1 is " + std::to_string(edge_max) + " near the boundary; the -infinity limit is truncated";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence toward the background as n grows.

struct ConvergenceRow {
  int n = 0;
  double mu = 0.0;
  double kappa = 0.0;
  double err_rho1 = 0.0;  // ||sigma - rho1||_L2
  double err_rho2 = 0.0;  // ||rho2||_L2
  double combined = 0.0;
  double n2_combined = 0.0;
  bool converged = false;
  std::string status;
};

/// Which parameter stays fixed along the sequence.
struct FixedParameter {
  enum class Kind { kappa, mu } kind;
  double value;
};

inline WaveParams params_for(double c, FixedParameter fixed, int n) {
  return fixed.kind == FixedParameter::Kind::kappa ? WaveParams::with_kappa(c, fixed.value, n)
                                                   : WaveParams::with_mu(c, fixed.value, n);
}

/// For each n, solves the antiresonant wave and measures its distance to the background.
/// Fixed kappa uses the monatomic wave at speed c; fixed mu uses the (1+mu)-mass wave.
inline std::vector<ConvergenceRow> convergence_study(double c, FixedParameter fixed, std::span<const int> n_list,
                                                     const Potential& pot, const Grid& grid,
                                                     const NewtonOptions& opt = {}) {
  std::optional<BackgroundWave> bg;
  std::string bg_error;
  try {
    if (fixed.kind == FixedParameter::Kind::kappa)
      bg = solve_background(c, pot, grid, std::nullopt, 1.0, opt);
    else
      bg = solve_background(c, pot, grid, std::nullopt, 1.0 / (1.0 + fixed.value), opt);
  } catch (const Error& e) {
    bg_error = e.what();
  }
  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    ConvergenceRow row;
    row.n = n;
    try {
      const WaveParams p = params_for(c, fixed, n);
      row.mu = p.mu;
      row.kappa = p.kappa;
      if (!bg) throw Error("background wave unavailable: " + bg_error);
      const auto sol = solve_mim(p, pot, grid, *bg, opt);
      row.err_rho1 = l2_norm(difference(bg->sigma, sol.rho1), grid);
      row.err_rho2 = l2_norm(sol.rho2, grid);
      row.combined = row.err_rho1 + row.err_rho2;
      row.n2_combined = static_cast<double>(n) * n * row.combined;
      row.converged = true;
      row.status = "ok";
    } catch (const Error& e) {
      row.status = "n=" + std::to_string(n) + ": " + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mim
