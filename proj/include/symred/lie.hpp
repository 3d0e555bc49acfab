#pragma once

// Non-canonical bracket structures: Poisson brackets written in an anholonomic
// frame, the so(3) Lie-Poisson structure, and the Deprit chart on the body
// angular momentum sphere.

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symred/series.hpp"

namespace symred {

// Frame X_i = sum_j a(i, j) d/ds_j on an n-dimensional base, with structure
// functions [X_i, X_j] = sum_k c_ij^k X_k. Frame momenta are pi = a p.
struct AnholonomicFrame {
  int dimension = 0;
  std::function<Eigen::MatrixXd(std::span<const double>)> frame;
  // Flattened c[(i * n + j) * n + k].
  std::function<std::vector<double>(std::span<const double>)> structure;

  static AnholonomicFrame constant(Eigen::MatrixXd a, std::vector<double> c = {});
};

// Gradient of a phase-space function with respect to base coordinates s and
// frame momenta pi.
struct FrameGradient {
  Eigen::VectorXd ds;
  Eigen::VectorXd dpi;
};

// {f,g} = sum_ij a(j,i) (df/ds_i dg/dpi_j - df/dpi_j dg/ds_i)
//         - sum_ijk c_ij^k pi_k df/dpi_i dg/dpi_j
// Throws ChartSingularity when a(s) is not invertible.
double anholonomic_bracket(const FrameGradient& f, const FrameGradient& g, const AnholonomicFrame& frame,
                           std::span<const double> s, std::span<const double> pi);

// Same, for functions given as series in the 2n variables (s, pi) around the origin.
double anholonomic_bracket(const Series& f, const Series& g, const AnholonomicFrame& frame,
                           std::span<const double> s, std::span<const double> pi);

// epsilon_abc, the structure constants of so(3) under the hat map.
double levi_civita(int a, int b, int c);

// [xi, eta] in so(3) ~ R^3.
inline Eigen::Vector3d so3_bracket(const Eigen::Vector3d& xi, const Eigen::Vector3d& eta) { return xi.cross(eta); }

// Rate of the body momentum under the (-) Lie-Poisson bracket with
// xi = dh/dJ: Jdot = J x xi. Orthogonal to J, so |J| is conserved.
Eigen::Vector3d so3_coadjoint_rate(const Eigen::Vector3d& xi, const Eigen::Vector3d& J);

// J = (v, sqrt(r^2 - v^2) sin u, sqrt(r^2 - v^2) cos u); {u, v} = 1.
// Throws ChartSingularity for |v| >= r.
Eigen::Vector3d deprit_chart(double u, double v, double r);
std::array<Series, 3> deprit_chart(const Series& u, const Series& v, double r);

// Inverse chart: (u, v) of a body momentum away from the poles J = (+-r, 0, 0).
std::pair<double, double> deprit_coordinates(const Eigen::Vector3d& J);

}  // namespace symred
