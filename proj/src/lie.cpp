#include "symred/lie.hpp"

#include <cmath>
#include <string>

#include "symred/errors.hpp"

namespace symred {

AnholonomicFrame AnholonomicFrame::constant(Eigen::MatrixXd a, std::vector<double> c) {
  const auto n = static_cast<int>(a.rows());
  if (c.empty()) c.assign(static_cast<std::size_t>(n * n * n), 0.0);
  AnholonomicFrame f;
  f.dimension = n;
  f.frame = [a = std::move(a)](std::span<const double>) { return a; };
  f.structure = [c = std::move(c)](std::span<const double>) { return c; };
  return f;
}

double anholonomic_bracket(const FrameGradient& f, const FrameGradient& g, const AnholonomicFrame& frame,
                           std::span<const double> s, std::span<const double> pi) {
  const int n = frame.dimension;
  if (static_cast<int>(s.size()) != n || static_cast<int>(pi.size()) != n || f.ds.size() != n ||
      f.dpi.size() != n || g.ds.size() != n || g.dpi.size() != n) {
    throw DimensionMismatch("anholonomic bracket: inconsistent dimensions");
  }
  const Eigen::MatrixXd a = frame.frame(s);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < n) throw ChartSingularity("anholonomic frame is singular at the requested point");

  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out += a(j, i) * (f.ds(i) * g.dpi(j) - f.dpi(j) * g.ds(i));
    }
  }
  const std::vector<double> c = frame.structure(s);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double cp = 0.0;
      for (int k = 0; k < n; ++k) cp += c[static_cast<std::size_t>((i * n + j) * n + k)] * pi[static_cast<std::size_t>(k)];
      out -= cp * f.dpi(i) * g.dpi(j);
    }
  }
  return out;
}

namespace {

FrameGradient gradient_at(const Series& h, int n, std::span<const double> s, std::span<const double> pi) {
  if (h.num_vars() != 2 * n) throw DimensionMismatch("series must live in the 2n variables (s, pi)");
  std::vector<double> z(s.begin(), s.end());
  z.insert(z.end(), pi.begin(), pi.end());
  FrameGradient g{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    g.ds(i) = h.derivative(i).evaluate(z);
    g.dpi(i) = h.derivative(i + n).evaluate(z);
  }
  return g;
}

}  // namespace

double anholonomic_bracket(const Series& f, const Series& g, const AnholonomicFrame& frame,
                           std::span<const double> s, std::span<const double> pi) {
  const int n = frame.dimension;
  return anholonomic_bracket(gradient_at(f, n, s, pi), gradient_at(g, n, s, pi), frame, s, pi);
}

double levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0.0;
  return ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
}

Eigen::Vector3d so3_coadjoint_rate(const Eigen::Vector3d& xi, const Eigen::Vector3d& J) { return J.cross(xi); }

Eigen::Vector3d deprit_chart(double u, double v, double r) {
  if (!(std::abs(v) < r)) {
    throw ChartSingularity("Deprit chart singular: |v| = " + std::to_string(std::abs(v)) +
                           " >= r = " + std::to_string(r));
  }
  const double rho = std::sqrt(r * r - v * v);
  return {v, rho * std::sin(u), rho * std::cos(u)};
}

std::array<Series, 3> deprit_chart(const Series& u, const Series& v, double r) {
  const double v0 = v.constant_term();
  if (!(std::abs(v0) < r)) {
    throw ChartSingularity("Deprit chart singular: |v| = " + std::to_string(std::abs(v0)) +
                           " >= r = " + std::to_string(r));
  }
  const Series rho = sqrt(r * r - v * v);
  return {v, rho * sin(u), rho * cos(u)};
}

std::pair<double, double> deprit_coordinates(const Eigen::Vector3d& J) {
  const double r = J.norm();
  if (!(std::abs(J(0)) < r)) throw ChartSingularity("momentum at a pole of the Deprit chart");
  return {std::atan2(J(1), J(2)), J(0)};
}

}  // namespace symred
