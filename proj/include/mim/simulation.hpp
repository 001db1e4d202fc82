#pragma once

// Lattice experiments built on travelling-wave profiles: downsampling to
// initial data, time integration with observers, (1 + eps) perturbations and
// wake measurements.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "mim/integrator.hpp"
#include "mim/lattice.hpp"
#include "mim/solver.hpp"
#include "mim/spectral.hpp"

namespace mim {

namespace detail {

/// Site index i in 0..M-1 sits at lattice coordinate j = i - M/2.
inline int site_coordinate(int i, int M) { return i - M / 2; }

inline LatticeState lattice_from_profiles(std::span<const double> rho1, std::optional<std::span<const double>> rho2,
                                          double c, const Grid& grid, double mu, double kappa, const Potential& pot,
                                          int M) {
  const double span = 2.0 * grid.half_length();
  if (std::abs(span - M) > 1e-12 * span)
    throw Error("lattice size M must equal the grid length 2L (one site per unit length)");
  LatticeState s(M, mu, kappa, pot);
  const SpectralInterpolant p1(rho1, grid);
  std::optional<SpectralInterpolant> p2;
  if (rho2) p2.emplace(*rho2, grid);

  std::vector<double> R(M), Rdot(M), r(M, 0.0), rdot(M, 0.0);
  int anchor = 0;
  double quietest = HUGE_VAL;
  for (int i = 0; i < M; ++i) {
    const double j = site_coordinate(i, M);
    R[i] = p1(j + 0.5);
    Rdot[i] = -c * p1(j + 0.5, 1);
    if (p2) {
      r[i] = (*p2)(j);
      rdot[i] = -c * (*p2)(j, 1);
    }
    if (std::abs(R[i]) < quietest) {
      quietest = std::abs(R[i]);
      anchor = i;
    }
  }
  if (quietest >= 1e-8)
    throw WaveFillsDomainError("no lattice site with |rho1| < 1e-8 to anchor velocities; enlarge the domain");

  s.U[0] = 0.0;
  for (int i = 0; i + 1 < M; ++i) s.U[i + 1] = s.U[i] + R[i];
  s.S = 0.0;
  for (double v : R) s.S += v;

  s.Udot[anchor] = 0.0;
  for (int k = 0; k + 1 < M; ++k) {
    const int i = (anchor + k) % M;
    s.Udot[(i + 1) % M] = s.Udot[i] + Rdot[i];
  }
  for (int i = 0; i < M; ++i) {
    s.u[i] = s.U[i] + r[i];
    s.udot[i] = s.Udot[i] + rdot[i];
  }
  if (!s.has_resonators()) {
    s.u = s.U;
    s.udot = s.Udot;
  }
  return s;
}

}  // namespace detail

/// Initial lattice data from R_j = rho1(j + 1/2), r_j = rho2(j) and their time derivatives.
inline LatticeState downsample(const TravelingWaveSolution& sol, const Potential& pot, int M) {
  return detail::lattice_from_profiles(sol.rho1, std::span<const double>(sol.rho2), sol.params.c, sol.grid,
                                       sol.params.mu, sol.params.kappa, pot, M);
}

/// Monatomic (mu = 0) chain carrying the background wave.
inline LatticeState downsample(const BackgroundWave& bg, const Potential& pot, int M) {
  if (bg.potential_scale != 1.0) throw Error("only the unit-mass background maps onto a mu = 0 chain");
  return detail::lattice_from_profiles(bg.sigma, std::nullopt, bg.c, bg.grid, 0.0, 0.0, pot, M);
}

/// Scales stretches, resonator offsets and all velocities by (1 + eps), keeping U_0.
inline LatticeState perturb(LatticeState s, double eps) {
  if (!(std::abs(eps) < 0.1)) throw Error("perturbation must satisfy |eps| < 0.1");
  const int M = s.sites();
  const double k = 1.0 + eps;
  std::vector<double> r(M), rdot(M);
  for (int j = 0; j < M; ++j) {
    r[j] = s.u[j] - s.U[j];
    rdot[j] = s.udot[j] - s.Udot[j];
  }
  const double U0 = s.U[0];
  for (int j = 0; j < M; ++j) {
    s.U[j] = U0 + k * (s.U[j] - U0);
    s.Udot[j] *= k;
    s.u[j] = s.U[j] + k * r[j];
    s.udot[j] = s.Udot[j] + k * rdot[j];
  }
  s.S *= k;
  return s;
}

struct SiteRecord {
  int site = 0;
  std::vector<double> times;
  std::vector<double> R;
  std::vector<double> r;
};

struct EnergySample {
  double t, H, P;
};

struct Observers {
  std::vector<int> sites;
  long sample_every = 1;            // steps between samples
  std::vector<double> snapshot_times;  // taken at the first step reaching each time
};

struct RunResult {
  LatticeState final_state;
  std::vector<SiteRecord> records;
  std::vector<EnergySample> energy;
  std::vector<LatticeState> snapshots;
};

inline RunResult run(LatticeState state, const IntegratorConfig& config, const Observers& obs = {}) {
  config.validate();
  if (obs.sample_every < 1) throw ConfigError("sample interval must be at least one step");
  for (int site : obs.sites)
    if (site < 0 || site >= state.sites()) throw ConfigError("observer site out of range");

  RunResult out;
  for (int site : obs.sites) out.records.push_back({site, {}, {}, {}});
  std::vector<double> pending = obs.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;

  auto sample = [&](const LatticeState& s) {
    for (auto& rec : out.records) {
      rec.times.push_back(s.t);
      rec.R.push_back(s.stretch(rec.site));
      rec.r.push_back(s.resonator_offset(rec.site));
    }
    out.energy.push_back({s.t, energy(s), momentum(s)});
  };
  auto take_snapshots = [&](const LatticeState& s) {
    while (next_snapshot < pending.size() && s.t >= pending[next_snapshot] - 0.5 * config.dt) {
      out.snapshots.push_back(s);
      ++next_snapshot;
    }
  };

  const double t0 = state.t;
  Accelerations acc = accelerations(state);
  sample(state);
  take_snapshots(state);
  for (long k = 1; k <= config.n_steps; ++k) {
    step(state, acc, config.dt, config.scheme);
    state.t = t0 + k * config.dt;  // avoid drift from repeated addition
    for (int j = 0; j < state.sites(); ++j) {
      if (!std::isfinite(state.U[j]) || !std::isfinite(state.Udot[j]) || !std::isfinite(state.u[j]) ||
          !std::isfinite(state.udot[j]))
        throw BlowUpError("lattice state became non-finite at step " + std::to_string(k), static_cast<std::size_t>(k));
    }
    if (k % obs.sample_every == 0 || k == config.n_steps) sample(state);
    take_snapshots(state);
  }
  out.final_state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics.

/// max_j |R_j(a) - R_j(b)|.
inline double max_stretch_difference(const LatticeState& a, const LatticeState& b) {
  double m = 0.0;
  for (int j = 0; j < a.sites(); ++j) m = std::max(m, std::abs(a.stretch(j) - b.stretch(j)));
  return m;
}

/// Displacement s (in lattice units) that best aligns R_j with rho1(j + 1/2 - s), searched in [guess - 1/2, guess + 1/2].
inline double fit_wave_shift(const LatticeState& s, std::span<const double> rho1, const Grid& grid, double guess) {
  const SpectralInterpolant p1(rho1, grid);
  const int M = s.sites();
  const auto R = s.stretches();
  auto misfit = [&](double shift) {
    double e = 0.0;
    for (int i = 0; i < M; ++i) {
      const double d = R[i] - p1(detail::site_coordinate(i, M) + 0.5 - shift);
      e += d * d;
    }
    return e;
  };
  const auto best = boost::math::tools::brent_find_minima(misfit, guess - 0.5, guess + 0.5,
                                                          std::numeric_limits<double>::digits / 2);
  return best.first;
}

struct WakeWindows {
  double pre_end;     // baseline over [t_start, pre_end]
  double wake_start;  // wake window right after passage
  double wake_end;
  double late_start;  // later window, where the dispersing disturbance shows up
  double late_end;
};

/// Windows around the passage time t_pass = distance / c.
inline WakeWindows passage_windows(double distance, double c, double margin = 3.0, double wake_width = 2.0,
                                   double late_width = 8.0, double late_delay = 4.0) {
  const double t_pass = distance / c;
  WakeWindows w;
  w.pre_end = std::max(0.0, t_pass - margin);
  w.wake_start = t_pass + margin;
  w.wake_end = w.wake_start + wake_width;
  w.late_start = w.wake_end + late_delay;
  w.late_end = w.late_start + late_width;
  return w;
}

struct WakeMeasurement {
  double baseline = 0.0;
  double wake_amplitude = 0.0;
  double dispersing_amplitude = 0.0;
};

inline WakeMeasurement wake_diagnostic(const SiteRecord& rec, const WakeWindows& w) {
  if (rec.times.empty()) throw RangeError("empty site record");
  const double t_first = rec.times.front(), t_last = rec.times.back();
  if (w.pre_end < t_first || w.late_end > t_last || w.wake_start > w.wake_end || w.late_start > w.late_end)
    throw RangeError("wake windows fall outside the recorded time span");
  WakeMeasurement m;
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < rec.times.size() && rec.times[k] <= w.pre_end; ++k) {
    sum += rec.R[k];
    ++count;
  }
  m.baseline = count ? sum / count : 0.0;
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    const double t = rec.times[k], dev = std::abs(rec.R[k] - m.baseline);
    if (t >= w.wake_start && t <= w.wake_end) m.wake_amplitude = std::max(m.wake_amplitude, dev);
    if (t >= w.late_start && t <= w.late_end) m.dispersing_amplitude = std::max(m.dispersing_amplitude, dev);
  }
  return m;
}

}  // namespace mim
