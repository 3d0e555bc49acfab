#include "symred/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "symred/errors.hpp"

namespace symred {

Eigen::VectorXd reduced_vector_field(const ReducedHamiltonian& h, std::span<const double> z) {
  const Eigen::VectorXd grad = h.gradient(z);
  return symplectic_unit(h.dof()) * grad;
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w(2), w(1), w(2), 0.0, -w(0), -w(1), w(0), 0.0;
  return m;
}

namespace {

Eigen::Vector3d angular_velocity(const ReducedHamiltonian& h, std::span<const double> z, const Eigen::VectorXd& grad) {
  const ReducedChart& chart = h.chart();
  const Eigen::Vector3d J = h.body_momentum(z);
  const Eigen::Matrix3d I = h.inertia(z);
  const Eigen::MatrixXd A = h.connection(z);
  Eigen::VectorXd qdot(static_cast<Eigen::Index>(chart.shape_p.size()));
  for (std::size_t a = 0; a < chart.shape_p.size(); ++a) qdot(static_cast<Eigen::Index>(a)) = grad(chart.shape_p[a]);
  return I.ldlt().solve(J) - A.transpose() * qdot;
}

std::vector<double> axpy(std::span<const double> z, double a, const Eigen::VectorXd& k) {
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * k(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace

Eigen::Vector3d body_angular_velocity(const ReducedHamiltonian& h, std::span<const double> z) {
  if (h.chart().group != SymmetryGroup::SO3) throw DimensionMismatch("angular velocity needs an SO(3) system");
  return angular_velocity(h, z, h.gradient(z));
}

Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

double Trajectory::energy_drift() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
  return worst;
}

Trajectory integrate_reduced(const ReducedHamiltonian& h, std::span<const double> z0, double dt, double T,
                             std::optional<Eigen::Matrix3d> g0) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(T >= 0.0)) throw DomainError("final time must be non-negative");
  if (g0 && h.chart().group != SymmetryGroup::SO3) throw DimensionMismatch("reconstruction needs an SO(3) system");

  const Eigen::MatrixXd Jm = symplectic_unit(h.dof());
  Trajectory traj;
  traj.dt = dt;
  std::vector<double> z(z0.begin(), z0.end());
  traj.t.push_back(0.0);
  traj.z.push_back(z);
  traj.energy.push_back(h.value(z));
  Eigen::Matrix3d g = g0 ? *g0 : Eigen::Matrix3d::Identity();
  if (g0) traj.rotation.push_back(g);

  const auto steps = static_cast<long>(std::llround(T / dt));
  for (long n = 0; n < steps; ++n) {
    try {
      // Each stage: reduced velocity and, when reconstructing, g Xi.
      auto stage = [&](std::span<const double> zs, const Eigen::Matrix3d& gs, Eigen::Matrix3d& dg) {
        const Eigen::VectorXd grad = h.gradient(zs);
        if (g0) dg = gs * hat(angular_velocity(h, zs, grad));
        return Eigen::VectorXd(Jm * grad);
      };
      Eigen::Matrix3d d1, d2, d3, d4;
      const Eigen::VectorXd k1 = stage(z, g, d1);
      const auto z2 = axpy(z, 0.5 * dt, k1);
      const Eigen::VectorXd k2 = stage(z2, g + 0.5 * dt * d1, d2);
      const auto z3 = axpy(z, 0.5 * dt, k2);
      const Eigen::VectorXd k3 = stage(z3, g + 0.5 * dt * d2, d3);
      const auto z4 = axpy(z, dt, k3);
      const Eigen::VectorXd k4 = stage(z4, g + dt * d3, d4);
      const Eigen::VectorXd incr = (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
      std::vector<double> next = axpy(z, 1.0, incr);
      const double e = h.value(next);
      z = std::move(next);
      if (g0) {
        g = project_to_rotation(g + (dt / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4));
      }
      traj.t.push_back(static_cast<double>(n + 1) * dt);
      traj.z.push_back(z);
      traj.energy.push_back(e);
      if (g0) traj.rotation.push_back(g);
    } catch (const ChartSingularity& err) {
      traj.truncated = true;
      traj.truncation_reason = err.what();
      break;
    } catch (const SingularShape& err) {
      traj.truncated = true;
      traj.truncation_reason = err.what();
      break;
    } catch (const DomainError& err) {
      traj.truncated = true;
      traj.truncation_reason = err.what();
      break;
    }
  }
  return traj;
}

std::vector<Eigen::Matrix3d> reconstruct(const ReducedHamiltonian& h, const Trajectory& traj, const Eigen::Matrix3d& g0) {
  if (traj.z.empty()) return {};
  const double T = traj.t.back();
  Trajectory again = integrate_reduced(h, traj.z.front(), traj.dt, T, g0);
  return again.rotation;
}

std::vector<Eigen::Matrix3d> integrate_rotation(const std::function<Eigen::Vector3d(double)>& xi,
                                                const Eigen::Matrix3d& g0, double dt, int steps) {
  std::vector<Eigen::Matrix3d> out{g0};
  Eigen::Matrix3d g = g0;
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const Eigen::Matrix3d d1 = g * hat(xi(t));
    const Eigen::Matrix3d d2 = (g + 0.5 * dt * d1) * hat(xi(t + 0.5 * dt));
    const Eigen::Matrix3d d3 = (g + 0.5 * dt * d2) * hat(xi(t + 0.5 * dt));
    const Eigen::Matrix3d d4 = (g + dt * d3) * hat(xi(t + dt));
    g = project_to_rotation(g + (dt / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4));
    out.push_back(g);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const ReducedHamiltonian& h, const Trajectory& traj, int stride) {
  const ReducedChart& chart = h.chart();
  std::vector<int> order;
  for (int k : chart.shape_q) order.push_back(k);
  for (int k : chart.shape_p) order.push_back(k);
  if (chart.orbit_u >= 0) order.push_back(chart.orbit_u);
  if (chart.orbit_v >= 0) order.push_back(chart.orbit_v);

  out << "t";
  for (int k : order) out << ',' << chart.names[static_cast<std::size_t>(k)];
  out << ",energy";
  const bool rot = !traj.rotation.empty();
  if (rot) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out << ",g" << i << j;
  }
  out << '\n';
  stride = std::max(stride, 1);
  for (std::size_t n = 0; n < traj.z.size(); ++n) {
    if (n % static_cast<std::size_t>(stride) != 0 && n + 1 != traj.z.size()) continue;
    out << fmt::format("{:.17g}", traj.t[n]);
    for (int k : order) out << fmt::format(",{:.17g}", traj.z[n][static_cast<std::size_t>(k)]);
    out << fmt::format(",{:.17g}", traj.energy[n]);
    if (rot) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << fmt::format(",{:.17g}", traj.rotation[n](i, j));
    }
    out << '\n';
  }
}

}  // namespace symred
