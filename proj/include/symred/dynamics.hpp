#pragma once

// Reduced equations of motion, fixed-step integration and reconstruction of
// the rotation for SO(3)-reduced systems.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symred/mech.hpp"

namespace symred {

// Hamilton's equations of the reduced Hamiltonian in its canonical chart.
Eigen::VectorXd reduced_vector_field(const ReducedHamiltonian& h, std::span<const double> z);

// Body angular velocity xi = I^-1 J - A^T qdot with qdot = dh/dp (SO(3) only).
Eigen::Vector3d body_angular_velocity(const ReducedHamiltonian& h, std::span<const double> z);

// Nearest rotation in the Frobenius norm (polar factor with det = +1).
Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> z;
  std::vector<double> energy;
  // Filled when reconstruction was requested.
  std::vector<Eigen::Matrix3d> rotation;
  bool truncated = false;
  std::string truncation_reason;

  double energy_drift() const;
};

// Classical RK4 with step dt up to time T. A chart singularity or an
// inadmissible shape ends the trajectory early with `truncated` set.
// With g0 given (SO(3) systems), the reconstruction equation gdot = g Xi is
// integrated alongside, each step followed by projection onto SO(3).
Trajectory integrate_reduced(const ReducedHamiltonian& h, std::span<const double> z0, double dt, double T,
                             std::optional<Eigen::Matrix3d> g0 = std::nullopt);

// Re-integrates `traj` from its first state with reconstruction switched on.
std::vector<Eigen::Matrix3d> reconstruct(const ReducedHamiltonian& h, const Trajectory& traj, const Eigen::Matrix3d& g0);

// Solves gdot = g hat(xi(t)) for a prescribed body angular velocity.
std::vector<Eigen::Matrix3d> integrate_rotation(const std::function<Eigen::Vector3d(double)>& xi,
                                                const Eigen::Matrix3d& g0, double dt, int steps);

Eigen::Matrix3d hat(const Eigen::Vector3d& w);

// Rows `t, <chart names...>, energy` plus `g00..g22` when rotations exist.
// Every `stride`-th state is written; the last state always is.
void write_trajectory_csv(std::ostream& out, const ReducedHamiltonian& h, const Trajectory& traj, int stride = 1);

}  // namespace symred
