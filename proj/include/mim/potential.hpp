#pragma once

// Nearest-neighbour interaction potentials V(r), normalized so that V'(0) = 0.

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mim/error.hpp"

namespace mim {

/// V'(r) = a r + b r^2, i.e. V(r) = a r^2/2 + b r^3/3.
struct FputCubic {
  double a = 1.0;
  double b = 1.0;
};

/// V(r) = a r^2/2 + b r^4/4.
struct FputQuartic {
  double a = 1.0;
  double b = 1.0;
};

/// V(r) = (a/b)(exp(-b r) + b r - 1), ab > 0.
struct Toda {
  double a = 1.0;
  double b = 1.0;
};

/// V(r) = a (q^12 - 2 q^6 + 1) with q = d/(d + r); equilibrium spacing d, domain r > -d.
struct LennardJones {
  double a = 1.0;
  double d = 1.0;
};

/// V'(r) = [eps0 + r]_+^p - eps0^p (precompressed Hertz contact, shifted so V'(0) = 0).
struct HertzianPrecompressed {
  double eps0 = 1.0;
  double p = 1.5;
};

enum class PotentialKind { fput_cubic, fput_quartic, toda, lennard_jones, hertzian };

class Potential {
 public:
  using Law = std::variant<FputCubic, FputQuartic, Toda, LennardJones, HertzianPrecompressed>;

  Potential() : law_(FputCubic{}) {}

  explicit Potential(Law law) : law_(law) {
    if (const auto* h = std::get_if<HertzianPrecompressed>(&law_)) {
      if (!(h->eps0 > 0.0) || !(h->p > 1.0))
        throw DomainError("hertzian potential requires eps0 > 0 and p > 1");
    }
    if (const auto* lj = std::get_if<LennardJones>(&law_)) {
      if (!(lj->d > 0.0) || !(lj->a > 0.0))
        throw DomainError("lennard-jones potential requires a > 0 and d > 0");
    }
    if (const auto* t = std::get_if<Toda>(&law_)) {
      if (!(t->a * t->b > 0.0)) throw DomainError("toda potential requires ab > 0");
    }
  }

  PotentialKind kind() const noexcept { return static_cast<PotentialKind>(law_.index()); }
  const Law& law() const noexcept { return law_; }

  /// Returns V, V' or V'' at r for order 0, 1, 2.
  double eval(int order, double r) const {
    if (order < 0 || order > 2) throw Error("potential derivative order must be 0, 1 or 2");
    return std::visit([&](const auto& p) { return eval_law(p, order, r); }, law_);
  }

  double value(double r) const { return eval(0, r); }
  double d1(double r) const { return eval(1, r); }
  double d2(double r) const { return eval(2, r); }

  /// Lower end of the evaluation domain (exclusive); -inf where unbounded.
  double domain_lower_bound() const {
    if (const auto* lj = std::get_if<LennardJones>(&law_)) return -lj->d;
    return -HUGE_VAL;
  }

  /// Canonical text form "name:c1,c2" accepted by parse().
  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, FputCubic>) os << "fput-cubic:" << p.a << ',' << p.b;
          if constexpr (std::is_same_v<T, FputQuartic>) os << "fput-quartic:" << p.a << ',' << p.b;
          if constexpr (std::is_same_v<T, Toda>) os << "toda:" << p.a << ',' << p.b;
          if constexpr (std::is_same_v<T, LennardJones>) os << "lennard-jones:" << p.a << ',' << p.d;
          if constexpr (std::is_same_v<T, HertzianPrecompressed>) os << "hertzian:" << p.eps0 << ',' << p.p;
        },
        law_);
    return os.str();
  }

  /// Parses "name" or "name:c1,c2". Names: fput-cubic, fput-quartic, toda, lennard-jones, hertzian.
  static Potential parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    std::vector<double> coeffs;
    if (colon != std::string_view::npos) {
      std::string rest(text.substr(colon + 1));
      std::istringstream is(rest);
      std::string item;
      while (std::getline(is, item, ',')) {
        try {
          std::size_t used = 0;
          coeffs.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw ConfigError("bad potential coefficient '" + item + "'");
        }
      }
    }
    auto pick = [&](double& first, double& second) {
      if (coeffs.size() > 2) throw ConfigError("potential '" + name + "' takes at most 2 coefficients");
      if (coeffs.size() >= 1) first = coeffs[0];
      if (coeffs.size() == 2) second = coeffs[1];
    };
    try {
      if (name == "fput-cubic") {
        FputCubic p;
        pick(p.a, p.b);
        return Potential(p);
      }
      if (name == "fput-quartic") {
        FputQuartic p;
        pick(p.a, p.b);
        return Potential(p);
      }
      if (name == "toda") {
        Toda p;
        pick(p.a, p.b);
        return Potential(p);
      }
      if (name == "lennard-jones") {
        LennardJones p;
        pick(p.a, p.d);
        return Potential(p);
      }
      if (name == "hertzian") {
        HertzianPrecompressed p;
        pick(p.eps0, p.p);
        return Potential(p);
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    throw ConfigError("unknown potential '" + name + "'");
  }

 private:
  static double eval_law(const FputCubic& p, int order, double r) {
    switch (order) {
      case 0: return 0.5 * p.a * r * r + p.b * r * r * r / 3.0;
      case 1: return p.a * r + p.b * r * r;
      default: return p.a + 2.0 * p.b * r;
    }
  }

  static double eval_law(const FputQuartic& p, int order, double r) {
    switch (order) {
      case 0: return 0.5 * p.a * r * r + 0.25 * p.b * r * r * r * r;
      case 1: return p.a * r + p.b * r * r * r;
      default: return p.a + 3.0 * p.b * r * r;
    }
  }

  static double eval_law(const Toda& p, int order, double r) {
    const double e = std::exp(-p.b * r);
    switch (order) {
      case 0: return (p.a / p.b) * std::expm1(-p.b * r) + p.a * r;
      case 1: return -p.a * std::expm1(-p.b * r);
      default: return p.a * p.b * e;
    }
  }

  static double eval_law(const LennardJones& p, int order, double r) {
    if (!(r > -p.d)) throw DomainError("lennard-jones potential evaluated at r <= -d");
    const double q = p.d / (p.d + r);
    const double q6 = std::pow(q, 6);
    switch (order) {
      case 0: return p.a * (q6 * q6 - 2.0 * q6 + 1.0);
      case 1: return 12.0 * p.a / p.d * (q6 * q - q6 * q6 * q);
      default: return 12.0 * p.a / (p.d * p.d) * (13.0 * q6 * q6 * q * q - 7.0 * q6 * q * q);
    }
  }

  // Second derivative at the kink r = -eps0 is the right limit (zero for p > 1).
  static double eval_law(const HertzianPrecompressed& p, int order, double r) {
    const double s = std::max(p.eps0 + r, 0.0);
    const double e0p = std::pow(p.eps0, p.p);
    switch (order) {
      case 0: return (std::pow(s, p.p + 1.0) - std::pow(p.eps0, p.p + 1.0)) / (p.p + 1.0) - e0p * r;
      case 1: return std::pow(s, p.p) - e0p;
      default: return p.p * std::pow(s, p.p - 1.0);
    }
  }

  Law law_;
};

}  // namespace mim
