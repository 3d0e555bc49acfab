#include "symred/equilibria.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "symred/errors.hpp"
#include "symred/lie.hpp"

namespace symred {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> all_vars(int f) {
  std::vector<int> v(static_cast<std::size_t>(f));
  for (int i = 0; i < f; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

Eigen::VectorXd jet_gradient(const Series& s, std::span<const int> vars) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(vars.size()));
  for (std::size_t i = 0; i < vars.size(); ++i) g(static_cast<Eigen::Index>(i)) = s.coefficient(MultiIndex::unit(vars[i]));
  return g;
}

Eigen::MatrixXd jet_hessian(const Series& s, std::span<const int> vars) {
  const auto n = static_cast<Eigen::Index>(vars.size());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const MultiIndex m = MultiIndex::unit(vars[static_cast<std::size_t>(i)]) + MultiIndex::unit(vars[static_cast<std::size_t>(j)]);
      h(i, j) = (i == j ? 2.0 : 1.0) * s.coefficient(m);
    }
  }
  return h;
}

// Body momentum used when solving for an equilibrium: along the third body
// axis for SO(3) (the chart point u = v = 0), the parameter itself for S^1.
Eigen::VectorXd reference_momentum(const ReducedChart& chart) {
  switch (chart.group) {
    case SymmetryGroup::SO3:
      return Eigen::Vector3d(0.0, 0.0, chart.momentum);
    case SymmetryGroup::S1:
      return Eigen::VectorXd::Constant(1, chart.momentum);
    case SymmetryGroup::Trivial:
      break;
  }
  return Eigen::VectorXd(0);
}

// Chart point for shape q and body momentum J = reference_momentum, with matched momenta.
std::vector<double> assemble_point(const ReducedHamiltonian& h, std::span<const double> q, const Eigen::VectorXd& J) {
  const ReducedChart& chart = h.chart();
  const auto& sys = h.system();
  const int f = sys.shape_dim();
  std::vector<double> z(static_cast<std::size_t>(chart.num_vars()), 0.0);
  for (int a = 0; a < f; ++a) z[static_cast<std::size_t>(chart.shape_q[static_cast<std::size_t>(a)])] = q[static_cast<std::size_t>(a)];
  const auto vars = all_vars(f);
  const ReducedGeometry geo = reduced_geometry(sys, q, f, vars, 0);
  const Eigen::MatrixXd A = geo.connection.constant_part();
  const Eigen::VectorXd p = A * J;
  for (int a = 0; a < f; ++a) z[static_cast<std::size_t>(chart.shape_p[static_cast<std::size_t>(a)])] = p(a);
  if (chart.group == SymmetryGroup::SO3 && J.norm() > 0.0) {
    const auto [u, v] = deprit_coordinates(Eigen::Vector3d(J));
    z[static_cast<std::size_t>(chart.orbit_u)] = u;
    z[static_cast<std::size_t>(chart.orbit_v)] = v;
  }
  return z;
}

void fill_spectrum(const ReducedHamiltonian& h, RelativeEquilibrium& eq) {
  eq.energy = h.value(eq.z);
  const LinearSpectrum spec = linear_frequencies(h.hessian(eq.z));
  eq.frequencies = spec.frequencies;
  eq.elliptic = spec.elliptic;
}

}  // namespace

Series effective_potential(const MechanicalSystem& sys, std::span<const double> q0, const Eigen::VectorXd& J,
                           int degree) {
  const int f = sys.shape_dim();
  const int g = group_dimension(sys.group);
  if (J.size() != g) throw DimensionMismatch("body momentum has the wrong dimension for the symmetry group");
  const auto vars = all_vars(f);
  const ReducedGeometry geo = reduced_geometry(sys, q0, f, vars, degree);
  Series v = geo.potential;
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double jj = J(a) * J(b);
      if (jj == 0.0 || geo.inertia_inverse(a, b).empty()) continue;
      v += (0.5 * jj) * geo.inertia_inverse(a, b);
    }
  }
  return v;
}

RelativeEquilibrium solve_effective_potential(const ReducedHamiltonian& h, std::vector<double> q,
                                              std::span<const int> free, const NewtonOptions& opts) {
  const auto& sys = h.system();
  if (static_cast<int>(q.size()) != sys.shape_dim()) throw DimensionMismatch("shape guess has the wrong dimension");
  const Eigen::VectorXd J = reference_momentum(h.chart());

  auto gradient_at = [&](std::span<const double> x) {
    return jet_gradient(effective_potential(sys, x, J, 1), free);
  };

  int it = 0;
  Eigen::VectorXd grad = gradient_at(q);
  for (; it < opts.max_iterations; ++it) {
    const Series jet = effective_potential(sys, q, J, 2);
    const Eigen::MatrixXd hess = jet_hessian(jet, free);
    const Eigen::VectorXd step = -hess.colPivHouseholderQr().solve(grad);
    if (!step.allFinite()) throw ConvergenceError("singular Hessian of the effective potential");

    double lambda = 1.0;
    std::vector<double> trial = q;
    Eigen::VectorXd trial_grad;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      trial = q;
      for (std::size_t i = 0; i < free.size(); ++i) {
        trial[static_cast<std::size_t>(free[i])] += lambda * step(static_cast<Eigen::Index>(i));
      }
      try {
        trial_grad = gradient_at(trial);
      } catch (const SingularShape&) {
        continue;
      }
      if (trial_grad.norm() < grad.norm() || k == 29) {
        accepted = true;
        break;
      }
      // Near convergence the gradient is rounding noise; take the full step.
      if (grad.lpNorm<Eigen::Infinity>() < 1e-13) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("line search left the admissible shape region");
    q = trial;
    grad = trial_grad;
    if (lambda * step.norm() < opts.step_tol) {
      ++it;
      break;
    }
  }

  const double residual = grad.lpNorm<Eigen::Infinity>();
  if (!(residual < opts.residual_tol)) {
    throw ConvergenceError(fmt::format("Newton iteration did not converge: residual {:.3e} after {} iterations",
                                       residual, it));
  }

  RelativeEquilibrium eq;
  eq.z = assemble_point(h, q, J);
  eq.r = h.chart().momentum;
  eq.iterations = it;
  eq.residual = residual;
  if (h.chart().group == SymmetryGroup::SO3 && eq.r == 0.0) {
    eq.energy = effective_potential(sys, q, J, 0).constant_term();
  } else {
    fill_spectrum(h, eq);
  }
  return eq;
}

RelativeEquilibrium lagrange_relative_equilibrium(const ThreeBodyParams& params, double b) {
  const LagrangeTriangle tri = lagrange_triangle_shape(params, b);
  const MechanicalSystem sys = three_body_system(params);
  const auto vars = all_vars(3);
  const ReducedGeometry geo = reduced_geometry(sys, tri.shape, 3, vars, 1);

  // V_eff = r^2 K(q) + V(q) with K = I^-1_33 / 2.
  const Series K = 0.5 * geo.inertia_inverse(2, 2);
  const Eigen::VectorXd dK = jet_gradient(K, vars);
  const Eigen::VectorXd dV = jet_gradient(geo.potential, vars);
  if (dK(0) == 0.0) throw NoEquilibrium("radial condition is degenerate");
  const double r2 = -dV(0) / dK(0);
  if (r2 < 0.0) {
    throw NoEquilibrium(fmt::format("no Lagrange relative equilibrium at b = {}: r^2 = {:.6g} < 0", b, r2));
  }
  const double res = std::max(std::abs(r2 * dK(1) + dV(1)), std::abs(r2 * dK(2) + dV(2)));
  if (!(res < 1e-8 * std::max(1.0, dV.lpNorm<Eigen::Infinity>()))) {
    throw NoEquilibrium(fmt::format("equilateral triangle of size b = {} is not a relative equilibrium for these "
                                    "masses (residual {:.3e})",
                                    b, res));
  }

  RelativeEquilibrium eq;
  eq.r = std::sqrt(r2);
  eq.residual = res;
  const Eigen::Vector3d J(0.0, 0.0, eq.r);
  if (eq.r == 0.0) {
    eq.z = {0.0, tri.shape[0], tri.shape[1], tri.shape[2], 0.0, 0.0, 0.0, 0.0};
    eq.energy = geo.potential.constant_term();
    return eq;
  }
  const ReducedHamiltonian h(sys, ReducedChart::deprit(sys.shape_names, eq.r));
  eq.z = assemble_point(h, tri.shape, J);
  fill_spectrum(h, eq);
  return eq;
}

RelativeEquilibrium stretched_out_equilibrium(const PendulumParams& params, double r, std::array<double, 2> guess) {
  const MechanicalSystem sys = pendulum_system(params);
  const ReducedHamiltonian h(sys, ReducedChart::cotangent(sys.shape_names, sys.group, r));
  const std::vector<int> free = {0, 1};
  return solve_effective_potential(h, {guess[0], guess[1], 0.0}, free);
}

EquilibriumResiduals check_equilibrium_conditions(const ReducedHamiltonian& h, std::span<const double> z) {
  const auto& sys = h.system();
  const int f = sys.shape_dim();
  const std::vector<double> q = h.shape(z);
  const std::vector<double> p = h.shape_momenta(z);
  const Eigen::VectorXd J = h.body_momentum(z);
  const auto vars = all_vars(f);
  const ReducedGeometry geo = reduced_geometry(sys, q, f, vars, 0);

  EquilibriumResiduals res;
  const Eigen::VectorXd AJ = geo.connection.constant_part() * J;
  for (int a = 0; a < f; ++a) res.momentum = std::max(res.momentum, std::abs(p[static_cast<std::size_t>(a)] - AJ(a)));
  if (sys.group == SymmetryGroup::SO3) {
    const Eigen::Vector3d J3(J);
    const Eigen::Vector3d w = geo.inertia_inverse.constant_part() * J3;
    res.coadjoint = J3.cross(w).norm();
  }
  res.shape_gradient = jet_gradient(effective_potential(sys, q, J, 1), vars).lpNorm<Eigen::Infinity>();
  return res;
}

LinearSpectrum linear_frequencies(const Eigen::MatrixXd& hessian, double tol) {
  const int n = static_cast<int>(hessian.rows());
  const int f = n / 2;
  const Eigen::MatrixXd a = symplectic_unit(f) * hessian;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  const Eigen::VectorXcd ev = es.eigenvalues();

  LinearSpectrum out;
  out.elliptic = true;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i).real()) > tol * std::max(1.0, std::abs(ev(i)))) out.elliptic = false;
    if (ev(i).imag() > 0.0) out.frequencies.push_back(ev(i).imag());
  }
  if (static_cast<int>(out.frequencies.size()) != f) out.elliptic = false;
  std::sort(out.frequencies.begin(), out.frequencies.end());
  out.frequencies.resize(static_cast<std::size_t>(f), kNaN);
  return out;
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = spec.find(':', start);
    const std::string tok = spec.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw DomainError("malformed range '" + spec + "' (expected lo:hi:step)");
    }
    if (used != tok.size()) throw DomainError("malformed range '" + spec + "' (expected lo:hi:step)");
    parts.push_back(value);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw DomainError("malformed range '" + spec + "' (expected lo:hi:step)");
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("range step must be positive and bounds finite");
  }
  std::vector<double> out;
  if (lo > hi) return out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

std::vector<SweepRow> sweep_three_body(const ThreeBodyParams& params, std::span<const double> bs, int jobs) {
  std::vector<SweepRow> rows(bs.size());
  auto work = [&](std::size_t i) {
    rows[i].param = bs[i];
    try {
      rows[i].eq = lagrange_relative_equilibrium(params, bs[i]);
    } catch (const Error&) {
      rows[i].eq.reset();
    }
  };
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (jobs == 1 || bs.size() < 2) {
    for (std::size_t i = 0; i < bs.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < bs.size(); i = next++) work(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

std::vector<SweepRow> sweep_pendulum(const PendulumParams& params, std::span<const double> rs) {
  std::vector<SweepRow> rows(rs.size());
  if (rs.empty()) return rows;
  std::size_t seed = 0;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    if (std::abs(rs[i] - 1.0) < std::abs(rs[seed] - 1.0)) seed = i;
  }
  auto solve = [&](std::size_t i, std::array<double, 2>& guess) {
    rows[i].param = rs[i];
    try {
      rows[i].eq = stretched_out_equilibrium(params, rs[i], guess);
      guess = {rows[i].eq->z[0], rows[i].eq->z[1]};
    } catch (const Error&) {
      rows[i].eq.reset();
    }
  };
  std::array<double, 2> guess{0.4, 0.5};
  solve(seed, guess);
  const std::array<double, 2> seed_guess = guess;
  for (std::size_t i = seed + 1; i < rs.size(); ++i) solve(i, guess);
  guess = seed_guess;
  for (std::size_t i = seed; i-- > 0;) solve(i, guess);
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int dof) {
  out << "param,r,energy";
  for (int k = 1; k <= dof; ++k) out << ",omega_" << k;
  out << ",converged\n";
  for (const auto& row : rows) {
    out << fmt::format("{:.17g}", row.param);
    if (row.eq) {
      out << fmt::format(",{:.17g},{:.17g}", row.eq->r, row.eq->energy);
      for (int k = 0; k < dof; ++k) {
        const double w = k < static_cast<int>(row.eq->frequencies.size()) ? row.eq->frequencies[static_cast<std::size_t>(k)] : kNaN;
        out << fmt::format(",{:.17g}", w);
      }
      out << ",1\n";
    } else {
      out << ",nan,nan";
      for (int k = 0; k < dof; ++k) out << ",nan";
      out << ",0\n";
    }
  }
}

}  // namespace symred
