// mimwave: command-line front end for antiresonant mass-in-mass travelling waves.
//
//   mimwave solve    --c 2 --mu 0.4 --n 1
//   mimwave simulate --c 2 --mu 0.4 --n 1 --T 16
//   mimwave converge --c 1.25 --kappa 20 --n-max 4
//   mimwave sweep    --c 1.25 --n 1 --n 2 ...
//   mimwave wake     --c 2 --mu 0.4 --eps 0.01
//
// Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
// 4 simulation blow-up, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mim/config.hpp"
#include "mim/csv.hpp"
#include "mim/simulation.hpp"
#include "mim/solver.hpp"
#include "mim/symbols.hpp"

namespace fs = std::filesystem;
using namespace mim;

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;
constexpr int exit_blowup = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Metadata metadata(const ExperimentConfig& cfg, const Metadata& derived) {
  Metadata m = cfg.entries();
  for (const auto& [k, v] : derived) m.emplace_back("derived." + k, v);
  return m;
}

fs::path output_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Metadata wave_metadata(const WaveParams& p, const Grid& grid, const BackgroundWave& bg) {
  return {{"mu", format_double(p.mu)},
          {"kappa", format_double(p.kappa)},
          {"omega", format_double(p.omega)},
          {"n", std::to_string(p.n)},
          {"L", format_double(grid.half_length())},
          {"N", std::to_string(grid.size())},
          {"background_scale", format_double(bg.potential_scale)}};
}

struct Solved {
  WaveParams params;
  Grid grid;
  Potential pot;
  BackgroundWave bg;
  TravelingWaveSolution sol;
};

// Fixed kappa pairs with the monatomic background, fixed mu with the (1+mu)-mass one.
BackgroundWave background_for(const ExperimentConfig& cfg, const WaveParams& p, const Potential& pot,
                              const Grid& grid) {
  return solve_background_for(cfg.kappa ? Limit::small_mass : Limit::stiff_spring, p, pot, grid);
}

Solved solve_wave(const ExperimentConfig& cfg) {
  const int n = cfg.single_n();
  const WaveParams p = cfg.wave_params(n);
  const Grid grid = cfg.grid_for(n);
  const Potential pot = Potential::parse(cfg.potential);
  BackgroundWave bg = background_for(cfg, p, pot, grid);
  TravelingWaveSolution sol = solve_mim(p, pot, grid, bg);
  return {p, grid, pot, std::move(bg), std::move(sol)};
}

Metadata solution_metadata(const Solved& s) {
  Metadata d = wave_metadata(s.params, s.grid, s.bg);
  const auto& r = s.sol.residuals;
  d.emplace_back("method", s.sol.method);
  d.emplace_back("iterations", std::to_string(s.sol.iterations));
  d.emplace_back("residual_regularized", format_double(r.regularized));
  d.emplace_back("residual_eq_i", format_double(r.eq_i));
  d.emplace_back("residual_eq_ii", format_double(r.eq_ii));
  d.emplace_back("antiresonance_defect", format_double(r.antiresonance_defect));
  return d;
}

int cmd_solve(const ExperimentConfig& cfg) {
  const Solved s = solve_wave(cfg);
  const fs::path dir = output_dir(cfg);
  {
    CsvWriter w((dir / "wave.csv").string(), metadata(cfg, solution_metadata(s)), {"x", "rho1", "rho2", "sigma"});
    for (int j = 0; j < s.grid.size(); ++j) w.row({s.grid.x(j), s.sol.rho1[j], s.sol.rho2[j], s.bg.sigma[j]});
  }
  const auto& r = s.sol.residuals;
  const Samples gap = difference(s.bg.sigma, s.sol.rho1);
  std::cout << "c=" << s.params.c << " mu=" << s.params.mu << " kappa=" << s.params.kappa << " n=" << s.params.n
            << " N=" << s.grid.size() << " method=" << s.sol.method << " iterations=" << s.sol.iterations << '\n'
            << "  residual (regularized)   " << fmt(r.regularized) << '\n'
            << "  residual (i)             " << fmt(r.eq_i) << '\n'
            << "  residual (ii)            " << fmt(r.eq_ii) << '\n'
            << "  antiresonance defect     " << fmt(r.antiresonance_defect) << '\n'
            << "  max |sigma - rho1|       " << fmt(sup_norm(gap)) << '\n'
            << "  ||sigma - rho1||_L2      " << fmt(l2_norm(gap, s.grid)) << '\n'
            << "  ||rho2||_L2              " << fmt(l2_norm(s.sol.rho2, s.grid)) << '\n'
            << "wrote " << (dir / "wave.csv").string() << '\n';
  return 0;
}

void write_record(const fs::path& path, const Metadata& meta, const SiteRecord& rec) {
  CsvWriter w(path.string(), meta, {"t", "R", "r"});
  for (std::size_t k = 0; k < rec.times.size(); ++k) w.row({rec.times[k], rec.R[k], rec.r[k]});
}

long step_count(double T, double dt) { return std::lround(T / dt); }

int cmd_simulate(const ExperimentConfig& cfg) {
  const Solved s = solve_wave(cfg);
  const int M = cfg.sites();
  const LatticeState s0 = downsample(s.sol, s.pot, M);
  const double T = cfg.T.value_or(M / s.params.c);
  const IntegratorConfig ic{cfg.dt, parse_scheme(cfg.scheme), step_count(T, cfg.dt)};
  const int coord = cfg.observer.value_or(0);
  const int site = coord + M / 2;
  if (site < 0 || site >= M) throw ConfigError("observer coordinate outside the lattice");
  const RunResult res = run(s0, ic, {{site}, 1, {}});

  const fs::path dir = output_dir(cfg);
  Metadata d = solution_metadata(s);
  d.emplace_back("M", std::to_string(M));
  d.emplace_back("steps", std::to_string(ic.n_steps));
  const Metadata meta = metadata(cfg, d);
  write_record(dir / ("site_" + std::to_string(coord) + ".csv"), meta, res.records[0]);
  {
    CsvWriter w((dir / "energy.csv").string(), meta, {"t", "H", "P"});
    for (const auto& e : res.energy) w.row({e.t, e.H, e.P});
  }
  {
    CsvWriter w((dir / "snapshot.csv").string(), meta, {"t", "j", "U", "u", "Udot", "udot", "R", "r"});
    for (const LatticeState* st : {&s0, &res.final_state})
      for (int i = 0; i < M; ++i)
        w.row({st->t, static_cast<long>(i - M / 2), st->U[i], st->u[i], st->Udot[i], st->udot[i], st->stretch(i),
               st->resonator_offset(i)});
  }
  double dH = 0.0, dP = 0.0;
  const double H0 = res.energy.front().H, P0 = res.energy.front().P, Pscale = std::max(momentum_scale(s0), 1e-300);
  for (const auto& e : res.energy) {
    dH = std::max(dH, std::abs(e.H - H0) / std::max(std::abs(H0), 1e-300));
    dP = std::max(dP, std::abs(e.P - P0) / Pscale);
  }
  const double travel = s.params.c * res.final_state.t;
  const double guess = std::remainder(travel, static_cast<double>(M));
  const double shift = fit_wave_shift(res.final_state, s.sol.rho1, s.grid, guess);
  std::cout << "M=" << M << " T=" << res.final_state.t << " steps=" << ic.n_steps << " dt=" << cfg.dt << '\n'
            << "  relative energy drift    " << fmt(dH) << '\n'
            << "  relative momentum drift  " << fmt(dP) << '\n'
            << "  position error vs c*T    " << fmt(std::abs(shift - guess)) << '\n';
  if (std::abs(guess) < 1e-9)
    std::cout << "  max |R(T) - R(0)|        " << fmt(max_stretch_difference(res.final_state, s0)) << '\n';
  std::cout << "wrote " << dir.string() << "/{site_" << coord << ",energy,snapshot}.csv\n";
  return 0;
}

int cmd_converge(const ExperimentConfig& cfg) {
  const auto ns = cfg.n_values();
  const int top = *std::max_element(ns.begin(), ns.end());
  const Grid grid = cfg.grid_for(top);
  const Potential pot = Potential::parse(cfg.potential);
  const FixedParameter fixed = cfg.kappa ? FixedParameter{FixedParameter::Kind::kappa, *cfg.kappa}
                                         : FixedParameter{FixedParameter::Kind::mu, *cfg.mu};
  const auto rows = convergence_study(cfg.c, fixed, ns, pot, grid);
  const fs::path dir = output_dir(cfg);
  const Metadata d{{"L", format_double(grid.half_length())}, {"N", std::to_string(grid.size())}};
  CsvWriter w((dir / "converge.csv").string(), metadata(cfg, d),
              {"n", "mu", "kappa", "err_rho1", "err_rho2", "combined", "n2_combined", "status"});
  bool all_ok = true;
  std::cout << "  n          mu       kappa  ||sigma-rho1||     ||rho2||    combined  n^2*combined  status\n";
  for (const auto& r : rows) {
    w.row({static_cast<long>(r.n), r.mu, r.kappa, r.err_rho1, r.err_rho2, r.combined, r.n2_combined,
           r.converged ? std::string("ok") : std::string("failed")});
    char line[200];
    std::snprintf(line, sizeof line, "%3d %11.5g %11.5g %14.4e %12.4e %11.4e %13.4e  ", r.n, r.mu, r.kappa,
                  r.err_rho1, r.err_rho2, r.combined, r.n2_combined);
    std::cout << line << r.status << '\n';
    all_ok = all_ok && r.converged;
  }
  std::cout << "wrote " << (dir / "converge.csv").string() << '\n';
  return all_ok ? 0 : exit_solver;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const auto ns = cfg.n_values();
  std::vector<double> mus;
  for (int k = 0; k < cfg.mu_points; ++k)
    mus.push_back(cfg.mu_min * std::pow(cfg.mu_max / cfg.mu_min, static_cast<double>(k) / (cfg.mu_points - 1)));
  if (cfg.mu && std::find(mus.begin(), mus.end(), *cfg.mu) == mus.end()) mus.push_back(*cfg.mu);
  std::sort(mus.begin(), mus.end());

  const fs::path dir = output_dir(cfg);
  {
    CsvWriter w((dir / "sweep_curves.csv").string(), metadata(cfg, {}), {"n", "mu", "kappa"});
    for (int n : ns)
      for (double mu : mus) w.row({static_cast<long>(n), mu, antiresonant_kappa(cfg.c, mu, n)});
  }
  std::cout << "wrote " << (dir / "sweep_curves.csv").string() << '\n';
  if (!cfg.solve_points) return 0;

  const int top = *std::max_element(ns.begin(), ns.end());
  const Grid grid = cfg.grid_for(top);
  const Potential pot = Potential::parse(cfg.potential);
  const BackgroundWave bg = solve_background(cfg.c, pot, grid);
  CsvWriter w((dir / "sweep_distance.csv").string(),
              metadata(cfg, {{"L", format_double(grid.half_length())}, {"N", std::to_string(grid.size())}}),
              {"n", "mu", "kappa", "distance", "norm_rho2", "status"});
  bool all_ok = true;
  std::cout << "  n          mu       kappa  ||sigma-rho1||  status\n";
  for (int n : ns) {
    for (double mu : mus) {
      const WaveParams p = WaveParams::with_mu(cfg.c, mu, n);
      double dist = std::nan(""), r2 = std::nan("");
      std::string status = "ok";
      try {
        const auto sol = solve_mim(p, pot, grid, bg);
        dist = l2_norm(difference(bg.sigma, sol.rho1), grid);
        r2 = l2_norm(sol.rho2, grid);
      } catch (const Error& e) {
        status = e.what();
        all_ok = false;
      }
      w.row({static_cast<long>(n), mu, p.kappa, dist, r2, status == "ok" ? status : std::string("failed")});
      char line[160];
      std::snprintf(line, sizeof line, "%3d %11.5g %11.5g %14.4e  ", n, mu, p.kappa, dist);
      std::cout << line << status << '\n';
    }
  }
  std::cout << "wrote " << (dir / "sweep_distance.csv").string() << '\n';
  return all_ok ? 0 : exit_solver;
}

int cmd_wake(const ExperimentConfig& cfg) {
  const Solved s = solve_wave(cfg);
  const int M = cfg.sites();
  const int coord = cfg.observer.value_or(32);
  const int site = coord + M / 2;
  if (site < 0 || site >= M) throw ConfigError("observer coordinate outside the lattice");
  // The wave is centred between coordinates -1 and 0 at t = 0.
  const WakeWindows win =
      passage_windows(coord + 0.5, s.params.c, cfg.margin, cfg.wake_width, cfg.late_width, cfg.late_delay);
  const double T = cfg.T.value_or(std::ceil(win.late_end) + 1.0);
  const IntegratorConfig ic{cfg.dt, parse_scheme(cfg.scheme), step_count(T, cfg.dt)};
  const std::vector<double> eps = cfg.eps.empty() ? std::vector<double>{0.01} : cfg.eps;

  // The monatomic control is the exact FPUT wave at the same speed.
  const BackgroundWave fput_bg = solve_background(s.params.c, s.pot, s.grid);
  const LatticeState mim0 = downsample(s.sol, s.pot, M);
  const LatticeState fput0 = downsample(fput_bg, s.pot, M);
  const Observers obs{{site}, 1, {}};

  const fs::path dir = output_dir(cfg);
  Metadata d = solution_metadata(s);
  d.emplace_back("M", std::to_string(M));
  d.emplace_back("observer_site", std::to_string(coord));
  d.emplace_back("wake_window", format_double(win.wake_start) + ":" + format_double(win.wake_end));
  d.emplace_back("late_window", format_double(win.late_start) + ":" + format_double(win.late_end));
  d.emplace_back("steps", std::to_string(ic.n_steps));

  auto measure = [&](const LatticeState& init, const std::string& name, double e) {
    const RunResult r = run(init, ic, obs);
    Metadata md = d;
    md.emplace_back("run", name);
    md.emplace_back("run_eps", format_double(e));
    write_record(dir / ("record_" + name + ".csv"), metadata(cfg, md), r.records[0]);
    return wake_diagnostic(r.records[0], win);
  };
  const WakeMeasurement mim_ctrl = measure(mim0, "mim-control", 0.0);
  const WakeMeasurement fput_ctrl = measure(fput0, "fput-control", 0.0);

  CsvWriter w((dir / "wake.csv").string(), metadata(cfg, d),
              {"eps", "run", "wake_amplitude", "dispersing_amplitude", "ratio_to_control"});
  w.row({0.0, std::string("mim-control"), mim_ctrl.wake_amplitude, mim_ctrl.dispersing_amplitude, 1.0});
  w.row({0.0, std::string("fput-control"), fput_ctrl.wake_amplitude, fput_ctrl.dispersing_amplitude, 1.0});
  std::cout << "observer j=" << coord << " wake window [" << win.wake_start << ", " << win.wake_end
            << "] late window [" << win.late_start << ", " << win.late_end << "] T=" << T << '\n'
            << "       eps  run            wake amp   dispersing   ratio\n";
  auto print = [](double e, const std::string& run_name, const WakeMeasurement& m, double ratio) {
    char line[160];
    std::snprintf(line, sizeof line, "%10.4g  %-13s %10.3e %12.3e %7.3g\n", e, run_name.c_str(), m.wake_amplitude,
                  m.dispersing_amplitude, ratio);
    std::cout << line;
  };
  print(0.0, "mim-control", mim_ctrl, 1.0);
  print(0.0, "fput-control", fput_ctrl, 1.0);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const std::string tag = "_" + std::to_string(k);
    const WakeMeasurement mm = measure(perturb(mim0, eps[k]), "mim" + tag, eps[k]);
    const WakeMeasurement fm = measure(perturb(fput0, eps[k]), "fput" + tag, eps[k]);
    const double rm = mm.wake_amplitude / std::max(mim_ctrl.wake_amplitude, 1e-300);
    const double rf = fm.wake_amplitude / std::max(fput_ctrl.wake_amplitude, 1e-300);
    w.row({eps[k], "mim" + tag, mm.wake_amplitude, mm.dispersing_amplitude, rm});
    w.row({eps[k], "fput" + tag, fm.wake_amplitude, fm.dispersing_amplitude, rf});
    print(eps[k], "mim" + tag, mm, rm);
    print(eps[k], "fput" + tag, fm, rf);
  }
  std::cout << "wrote " << (dir / "wake.csv").string() << " and record_*.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antiresonant mass-in-mass travelling waves: solve, simulate, converge, sweep, wake"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::optional<std::string> config_path, potential, out, scheme;
  std::optional<double> c, mu, kappa, L, dt, T;
  std::optional<int> N, M, n_max, observer;
  std::vector<int> n_list;
  std::vector<double> eps;
  std::optional<double> mu_min, mu_max;
  std::optional<int> mu_points;
  bool solve_points = false;

  app.add_option("--config", config_path, "key=value config file, or a CSV written by this tool");
  app.add_option("--c", c, "wave speed");
  app.add_option("--mu", mu, "resonator mass (fix exactly one of mu, kappa)");
  app.add_option("--kappa", kappa, "internal spring constant");
  app.add_option("--n", n_list, "antiresonance index; repeat for a list (converge, sweep)");
  app.add_option("--n-max", n_max, "use n = 1..n_max");
  app.add_option("--L", L, "half-length of the periodic domain");
  app.add_option("--N", N, "grid points (doubled automatically to resolve omega when not given)");
  app.add_option("--M", M, "lattice sites (default 2L)");
  app.add_option("--dt", dt, "time step");
  app.add_option("--T", T, "final time");
  app.add_option("--eps", eps, "perturbation sizes for wake");
  app.add_option("--potential", potential, "fput-cubic[:a,b], fput-quartic, toda, lennard-jones, hertzian");
  app.add_option("--out", out, "output directory");
  app.add_option("--scheme", scheme, "yoshida6 or leapfrog2");
  app.add_option("--observer", observer, "lattice coordinate of the recording site");
  app.add_option("--mu-min", mu_min, "sweep: smallest mu");
  app.add_option("--mu-max", mu_max, "sweep: largest mu");
  app.add_option("--mu-points", mu_points, "sweep: number of log-spaced mu samples");
  app.add_flag("--solve-points", solve_points, "sweep: solve at each sampled point");

  const std::pair<Command, const char*> commands[]{
      {Command::solve, "compute the travelling wave and write wave.csv"},
      {Command::simulate, "downsample the wave to the lattice and integrate it"},
      {Command::converge, "distance to the limiting wave for a list of n"},
      {Command::sweep, "antiresonance curves in (mu, kappa), optionally solved along them"},
      {Command::wake, "perturbed runs against MiM and FPUT controls at one site"},
  };
  for (const auto& [cmd, help] : commands) app.add_subcommand(to_string(cmd), help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    ExperimentConfig cfg;
    if (config_path) {
      const std::string text = read_file(*config_path);
      cfg.merge_text(text, fs::path(*config_path).extension() == ".csv");
    }
    cfg.command = parse_command(app.get_subcommands().front()->get_name());
    if (potential) cfg.potential = *potential;
    if (c) cfg.c = *c;
    if (mu) {
      cfg.mu = *mu;
      if (!kappa && cfg.kappa && config_path) cfg.kappa.reset();  // command line overrides the file's choice
    }
    if (kappa) {
      cfg.kappa = *kappa;
      if (!mu && cfg.mu && config_path) cfg.mu.reset();
    }
    if (n_list.size() == 1 && !n_max) {
      cfg.n = n_list.front();
      cfg.n_list.clear();
    } else if (!n_list.empty()) {
      cfg.n_list = n_list;
    }
    if (n_max) cfg.n_max = *n_max;
    if (L) cfg.L = *L;
    if (N) cfg.N = *N;
    if (M) cfg.M = *M;
    if (dt) cfg.dt = *dt;
    if (T) cfg.T = *T;
    if (!eps.empty()) cfg.eps = eps;
    if (out) cfg.out = *out;
    if (scheme) cfg.scheme = *scheme;
    if (observer) cfg.observer = *observer;
    if (mu_min) cfg.mu_min = *mu_min;
    if (mu_max) cfg.mu_max = *mu_max;
    if (mu_points) cfg.mu_points = *mu_points;
    if (solve_points) cfg.solve_points = true;
    cfg.validate();

    switch (cfg.command) {
      case Command::solve: return cmd_solve(cfg);
      case Command::simulate: return cmd_simulate(cfg);
      case Command::converge: return cmd_converge(cfg);
      case Command::sweep: return cmd_sweep(cfg);
      case Command::wake: return cmd_wake(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NoPositiveMassError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const AntiresonanceError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const OffGridError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const WaveFillsDomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << " (residual " << e.last_residual() << " after "
              << e.iterations() << " iterations)\n";
    return exit_solver;
  } catch (const TrivialSolutionError& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return exit_solver;
  } catch (const ContractionError& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return exit_solver;
  } catch (const BlowUpError& e) {
    std::cerr << "simulation blew up: " << e.what() << '\n';
    return exit_blowup;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
