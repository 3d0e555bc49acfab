#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symred {

// Root of every error thrown by the library. Numerical failures (non-convergence,
// singular charts, resonances) all derive from it so the CLI can map them to a
// single exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// An elementary function was composed with a series whose constant term lies
// outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// |v| >= r in a Deprit chart, or any other coordinate chart evaluated at a
// point where it is not a diffeomorphism.
class ChartSingularity : public Error {
 public:
  using Error::Error;
};

// The locked inertia tensor (or horizontal metric) is degenerate at the
// requested shape, or the shape lies outside the admissible region.
class SingularShape : public Error {
 public:
  SingularShape(const std::string& what, std::vector<double> direction = {})
      : Error(what), direction_(std::move(direction)) {}
  const std::vector<double>& direction() const { return direction_; }

 private:
  std::vector<double> direction_;
};

class NotEquilibrium : public Error {
 public:
  using Error::Error;
};

class NotElliptic : public Error {
 public:
  using Error::Error;
};

class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A small divisor <m, omega> was met while solving the homological equation.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, std::vector<int> vector, double divisor)
      : Error(what), vector_(std::move(vector)), divisor_(divisor) {}
  const std::vector<int>& vector() const { return vector_; }
  double divisor() const { return divisor_; }

 private:
  std::vector<int> vector_;
  double divisor_;
};

}  // namespace symred
