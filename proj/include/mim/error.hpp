#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A potential was evaluated outside its domain (e.g. Lennard-Jones at r <= -d).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parity or conjugate-symmetry violation in a multiplier application or profile.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Parameters do not satisfy omega = 2*pi*n.
class AntiresonanceError : public Error {
 public:
  using Error::Error;
};

/// Antiresonant mass would be non-positive (4 pi^2 c^2 n^2 <= kappa).
class NoPositiveMassError : public Error {
 public:
  using Error::Error;
};

/// The resonant frequency is not a grid frequency, or sits at/above Nyquist.
class OffGridError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

/// Newton landed on (or started from) the zero solution.
class TrivialSolutionError : public Error {
 public:
  using Error::Error;
};

/// Picard iteration of the fixed-point map did not contract.
class ContractionError : public Error {
 public:
  ContractionError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// No quiescent site available to anchor lattice velocities.
class WaveFillsDomainError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A requested time window lies outside a recorded trajectory.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mim
