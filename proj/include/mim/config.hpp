#pragma once

// Experiment configuration: flat key=value text, one entry per line, '#' starts
// a comment line. Optional fields that were never set are omitted on output so
// parse(serialize(cfg)) == cfg.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mim/csv.hpp"
#include "mim/error.hpp"
#include "mim/integrator.hpp"
#include "mim/params.hpp"
#include "mim/potential.hpp"
#include "mim/spectral.hpp"

namespace mim {

enum class Command { solve, simulate, converge, sweep, wake };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::simulate: return "simulate";
    case Command::converge: return "converge";
    case Command::sweep: return "sweep";
    case Command::wake: return "wake";
  }
  return "?";
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::solve, Command::simulate, Command::converge, Command::sweep, Command::wake})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown command '" + std::string(s) + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty())
    throw ConfigError("bad value '" + std::string(text) + "' for '" + std::string(key) + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(parse_number<T>(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("bad boolean '" + std::string(text) + "' for '" + std::string(key) + "'");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace detail

struct ExperimentConfig {
  Command command = Command::solve;
  std::string potential = "fput-cubic:1,1";
  double c = 2.0;
  std::optional<double> mu;
  std::optional<double> kappa;
  std::optional<int> n;
  std::optional<int> n_max;
  std::vector<int> n_list;
  std::optional<double> L;
  std::optional<int> N;
  std::optional<int> M;
  double dt = 0.01;
  std::optional<double> T;
  std::vector<double> eps;
  std::string out = ".";
  std::string scheme = "yoshida6";
  // sweep
  double mu_min = 0.0125;
  double mu_max = 0.4;
  int mu_points = 6;
  bool solve_points = false;
  // wake
  std::optional<int> observer;  // lattice coordinate of the recording site
  double margin = 3.0;
  double wake_width = 2.0;
  double late_delay = 4.0;
  double late_width = 8.0;

  bool operator==(const ExperimentConfig&) const = default;

  /// Sets one field from its text form.
  void set(std::string_view key, std::string_view raw) {
    using namespace detail;
    const std::string v = trim(raw);
    if (key == "command") command = parse_command(v);
    else if (key == "potential") potential = v;
    else if (key == "c") c = parse_number<double>(key, v);
    else if (key == "mu") mu = parse_number<double>(key, v);
    else if (key == "kappa") kappa = parse_number<double>(key, v);
    else if (key == "n") n = parse_number<int>(key, v);
    else if (key == "n_max") n_max = parse_number<int>(key, v);
    else if (key == "n_list") n_list = parse_list<int>(key, v);
    else if (key == "L") L = parse_number<double>(key, v);
    else if (key == "N") N = parse_number<int>(key, v);
    else if (key == "M") M = parse_number<int>(key, v);
    else if (key == "dt") dt = parse_number<double>(key, v);
    else if (key == "T") T = parse_number<double>(key, v);
    else if (key == "eps") eps = parse_list<double>(key, v);
    else if (key == "out") out = v;
    else if (key == "scheme") scheme = v;
    else if (key == "mu_min") mu_min = parse_number<double>(key, v);
    else if (key == "mu_max") mu_max = parse_number<double>(key, v);
    else if (key == "mu_points") mu_points = parse_number<int>(key, v);
    else if (key == "solve_points") solve_points = parse_bool(key, v);
    else if (key == "observer") observer = parse_number<int>(key, v);
    else if (key == "margin") margin = parse_number<double>(key, v);
    else if (key == "wake_width") wake_width = parse_number<double>(key, v);
    else if (key == "late_delay") late_delay = parse_number<double>(key, v);
    else if (key == "late_width") late_width = parse_number<double>(key, v);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
  }

  /// Key/value pairs in a fixed order; unset optionals are left out.
  Metadata entries() const {
    using detail::join;
    Metadata m;
    m.emplace_back("command", to_string(command));
    m.emplace_back("potential", potential);
    m.emplace_back("c", format_double(c));
    if (mu) m.emplace_back("mu", format_double(*mu));
    if (kappa) m.emplace_back("kappa", format_double(*kappa));
    if (n) m.emplace_back("n", std::to_string(*n));
    if (n_max) m.emplace_back("n_max", std::to_string(*n_max));
    if (!n_list.empty()) m.emplace_back("n_list", join(n_list));
    if (L) m.emplace_back("L", format_double(*L));
    if (N) m.emplace_back("N", std::to_string(*N));
    if (M) m.emplace_back("M", std::to_string(*M));
    m.emplace_back("dt", format_double(dt));
    if (T) m.emplace_back("T", format_double(*T));
    if (!eps.empty()) m.emplace_back("eps", join(eps));
    m.emplace_back("out", out);
    m.emplace_back("scheme", scheme);
    m.emplace_back("mu_min", format_double(mu_min));
    m.emplace_back("mu_max", format_double(mu_max));
    m.emplace_back("mu_points", std::to_string(mu_points));
    m.emplace_back("solve_points", solve_points ? "true" : "false");
    if (observer) m.emplace_back("observer", std::to_string(*observer));
    m.emplace_back("margin", format_double(margin));
    m.emplace_back("wake_width", format_double(wake_width));
    m.emplace_back("late_delay", format_double(late_delay));
    m.emplace_back("late_width", format_double(late_width));
    return m;
  }

  std::string serialize() const {
    std::string s;
    for (const auto& [k, v] : entries()) s += k + '=' + v + '\n';
    return s;
  }

  /// Reads key=value lines on top of the current values. With `metadata` set,
  /// only '#'-prefixed lines are read (the header of a CSV written by the
  /// tool), keys under "derived." are skipped, and reading stops at the first
  /// non-comment line.
  void merge_text(std::string_view text, bool metadata = false) {
    std::istringstream is{std::string(text)};
    std::string line;
    std::map<std::string, int> seen;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::string t = detail::trim(line);
      if (metadata) {
        if (t.empty() || t[0] != '#') break;
        t = detail::trim(std::string_view(t).substr(1));
        if (t.rfind("derived.", 0) == 0) continue;
      } else if (t.empty() || t[0] == '#') {
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        if (metadata) continue;
        throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
      }
      const std::string key = detail::trim(std::string_view(t).substr(0, eq));
      if (seen[key]++) throw ConfigError("duplicate config key '" + key + "'");
      set(key, std::string_view(t).substr(eq + 1));
    }
  }

  static ExperimentConfig parse(std::string_view text) {
    ExperimentConfig cfg;
    cfg.merge_text(text);
    return cfg;
  }

  /// n values requested: n_list, else 1..n_max, else {n}.
  std::vector<int> n_values() const {
    if (!n_list.empty()) return n_list;
    std::vector<int> v;
    if (n_max)
      for (int k = 1; k <= *n_max; ++k) v.push_back(k);
    else if (n)
      v.push_back(*n);
    return v;
  }

  int single_n() const {
    if (!n_list.empty() || n_max) throw ConfigError(to_string(command) + " takes a single n, not a list");
    return n.value_or(1);
  }

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("speed c must be positive");
    if (mu && kappa) throw ConfigError("over-determined parameters: fix exactly one of mu and kappa");
    if (command == Command::sweep) {
      if (kappa) throw ConfigError("sweep runs along antiresonance curves in mu; kappa cannot be fixed");
      if (!(mu_min > 0.0) || !(mu_max > mu_min)) throw ConfigError("sweep needs 0 < mu_min < mu_max");
      if (mu_points < 2) throw ConfigError("sweep needs at least 2 mu points");
    } else if (!mu && !kappa) {
      throw ConfigError("fix exactly one of mu and kappa");
    }
    if (mu && !(*mu > 0.0)) throw ConfigError("mu must be positive");
    if (kappa && !(*kappa > 0.0)) throw ConfigError("kappa must be positive");
    for (int k : n_values())
      if (k < 1) throw ConfigError("n must be a positive integer");
    if ((command == Command::converge || command == Command::sweep) && n_values().empty())
      throw ConfigError("empty n list: give --n, --n-max or n_list");
    if (n && *n < 1) throw ConfigError("n must be a positive integer");
    if (n_max && *n_max < 1) throw ConfigError("n_max must be a positive integer");
    if (L && !(*L > 0.0)) throw ConfigError("L must be positive");
    if (N && (*N < 8 || *N % 2 != 0)) throw ConfigError("N must be even and at least 8");
    if (M && *M < 1) throw ConfigError("M must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (T && !(*T >= 0.0)) throw ConfigError("T must be non-negative");
    for (double e : eps)
      if (!(std::abs(e) < 0.1)) throw ConfigError("each eps must satisfy |eps| < 0.1");
    if (!(margin >= 0.0) || !(wake_width > 0.0) || !(late_delay >= 0.0) || !(late_width > 0.0))
      throw ConfigError("wake windows need margin >= 0, positive widths and late_delay >= 0");
    parse_scheme(scheme);
    Potential::parse(potential);
  }

  // ---- resolved values -------------------------------------------------

  double half_length() const { return L.value_or(command == Command::wake ? 64.0 : 16.0); }

  /// Grid resolving omega = 2 pi n_top. N is doubled from its default until
  /// omega sits below Nyquist unless N was given explicitly.
  Grid grid_for(int n_top) const {
    const double Lh = half_length();
    if (N) return Grid(Lh, *N);
    int points = command == Command::wake ? 1024 : 256;
    while (two_pi * n_top >= std::numbers::pi * points / (2.0 * Lh)) points *= 2;
    return Grid(Lh, points);
  }

  int sites() const {
    if (M) return *M;
    const double span = 2.0 * half_length();
    if (std::abs(span - std::round(span)) > 1e-12) throw ConfigError("2L must be an integer to derive M");
    return static_cast<int>(std::lround(span));
  }

  WaveParams wave_params(int n_value) const {
    return kappa ? WaveParams::with_kappa(c, *kappa, n_value) : WaveParams::with_mu(c, *mu, n_value);
  }
};

}  // namespace mim
