#pragma once

// Relative equilibria: critical points of the effective potential
// V_eff = 1/2 J^T I^-1 J + V with matched momenta p = A J, plus parameter
// sweeps over the triangle size (three-body) or the momentum (pendulum).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symred/mech.hpp"
#include "symred/models.hpp"

namespace symred {

struct RelativeEquilibrium {
  std::vector<double> z;  // reduced chart point
  double r = 0.0;         // momentum magnitude
  double energy = 0.0;    // h at z
  // Linear frequencies, ascending. Empty when the chart is singular (r = 0).
  std::vector<double> frequencies;
  bool elliptic = false;
  int iterations = 0;
  double residual = 0.0;  // max-norm of the shape gradient of V_eff
};

struct NewtonOptions {
  double step_tol = 1e-12;
  double residual_tol = 1e-10;
  int max_iterations = 100;
};

// Jet of V_eff(q) = 1/2 J^T I(q)^-1 J + V(q) around q0 for a fixed body
// momentum J (3 entries for SO(3), 1 for S^1).
Series effective_potential(const MechanicalSystem& sys, std::span<const double> q0, const Eigen::VectorXd& J,
                           int degree);

// Damped Newton iteration on the gradient of V_eff with respect to the shape
// coordinates listed in `free`; the other coordinates stay at the guess.
// Momenta are set from p = A J. Throws ConvergenceError.
RelativeEquilibrium solve_effective_potential(const ReducedHamiltonian& h, std::vector<double> shape_guess,
                                              std::span<const int> free, const NewtonOptions& opts = {});

// Lagrange triangle of size b: r is obtained in closed form from the radial
// stationarity condition. Throws NoEquilibrium when r^2 < 0 or the remaining
// shape-gradient components do not vanish.
RelativeEquilibrium lagrange_relative_equilibrium(const ThreeBodyParams& params, double b);

// Stretched-out pendulum branch (phi = 0) at momentum r.
RelativeEquilibrium stretched_out_equilibrium(const PendulumParams& params, double r,
                                              std::array<double, 2> guess = {0.4, 0.5});

struct EquilibriumResiduals {
  double momentum = 0.0;        // max |p - A J|
  double coadjoint = 0.0;       // |J x I^-1 J|, zero for abelian groups
  double shape_gradient = 0.0;  // max |dV_eff/dq|
};

EquilibriumResiduals check_equilibrium_conditions(const ReducedHamiltonian& h, std::span<const double> z);

struct LinearSpectrum {
  std::vector<double> frequencies;  // ascending
  bool elliptic = false;
};

// Spectrum of J D^2 h. Elliptic when every eigenvalue has |Re| < tol and
// the imaginary parts come in +- pairs.
LinearSpectrum linear_frequencies(const Eigen::MatrixXd& hessian, double tol = 1e-9);

// Inclusive "lo:hi:step" range. Empty when lo > hi. Throws DomainError on
// malformed input or a non-positive step.
std::vector<double> parse_range(const std::string& spec);

struct SweepRow {
  double param = 0.0;
  std::optional<RelativeEquilibrium> eq;
};

// Rows are independent; `jobs` > 1 evaluates them on worker threads.
// Output order always follows `bs`.
std::vector<SweepRow> sweep_three_body(const ThreeBodyParams& params, std::span<const double> bs, int jobs = 1);

// Continuation along the stretched-out branch, starting from the grid point
// closest to r = 1 and moving outward in both directions.
std::vector<SweepRow> sweep_pendulum(const PendulumParams& params, std::span<const double> rs);

// `param,r,energy,omega_1..omega_f,converged`; failed rows carry nan.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int dof);

}  // namespace symred
