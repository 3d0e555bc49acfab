#include "symred/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "symred/errors.hpp"

namespace symred {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive");
}

Series zero_like(const Series& s) { return Series(s.num_vars(), s.max_degree()); }

Series morse_jet(const Series& r, double d0) {
  const Series e = exp(-(r - d0));
  return e * e - 2.0 * e;
}

}  // namespace

void ThreeBodyParams::validate() const {
  require_positive(m1, "m1");
  require_positive(m2, "m2");
  require_positive(m3, "m3");
  require_positive(d0, "d0");
}

void PendulumParams::validate() const {
  require_positive(m1, "m1");
  require_positive(m2, "m2");
  require_positive(l1, "l1");
  require_positive(l2, "l2");
  require_positive(gravity, "gravity");
}

double morse(double r, double d0) {
  const double e = std::exp(-(r - d0));
  return e * e - 2.0 * e;
}

std::array<double, 3> three_body_distances(const ThreeBodyParams& p, double r1, double r2, double phi) {
  const double s1 = std::sqrt(p.mu1());
  const double s2 = std::sqrt(p.mu2());
  const double mu1 = p.mu1();
  const double mu2 = p.mu2();
  const double c = std::cos(phi);
  const double r13 = r1 / s1;
  const double r23 = std::sqrt(mu1 * r1 * r1 / (p.m3 * p.m3) + r2 * r2 / mu2 + 2.0 * s1 * r1 * r2 * c / (p.m3 * s2));
  const double r12 = std::sqrt(mu1 * r1 * r1 / (p.m1 * p.m1) + r2 * r2 / mu2 - 2.0 * s1 * r1 * r2 * c / (p.m1 * s2));
  return {r13, r23, r12};
}

MechanicalSystem three_body_system(const ThreeBodyParams& params) {
  params.validate();
  MechanicalSystem sys;
  sys.name = "three-body";
  sys.group = SymmetryGroup::SO3;
  sys.shape_names = {"r1", "r2", "phi"};
  // The Jacobi vectors are already mass weighted.
  sys.masses = {1.0, 1.0};
  sys.embedding = [](std::span<const Series> q) {
    const Series& r1 = q[0];
    const Series& r2 = q[1];
    const Series& phi = q[2];
    std::vector<SeriesVec3> out(2);
    out[0] = {r1, zero_like(r1), zero_like(r1)};
    out[1] = {r2 * cos(phi), r2 * sin(phi), zero_like(r1)};
    return out;
  };
  sys.potential = [p = params](std::span<const Series> q) {
    const Series& r1 = q[0];
    const Series& r2 = q[1];
    const Series& phi = q[2];
    const double mu1 = p.mu1();
    const double mu2 = p.mu2();
    const double s1 = std::sqrt(mu1);
    const double s2 = std::sqrt(mu2);
    const Series r1sq = r1 * r1;
    const Series r2sq = r2 * r2;
    const Series cross = r1 * r2 * cos(phi);
    const Series r13 = r1 * (1.0 / s1);
    const Series r23 = sqrt((mu1 / (p.m3 * p.m3)) * r1sq + (1.0 / mu2) * r2sq + (2.0 * s1 / (p.m3 * s2)) * cross);
    const Series r12 = sqrt((mu1 / (p.m1 * p.m1)) * r1sq + (1.0 / mu2) * r2sq - (2.0 * s1 / (p.m1 * s2)) * cross);
    return morse_jet(r13, p.d0) + morse_jet(r23, p.d0) + morse_jet(r12, p.d0);
  };
  sys.check_shape = [](std::span<const double> q) {
    if (!(q[0] > 0.0) || !(q[1] > 0.0)) {
      throw SingularShape("three-body shape needs r1, r2 > 0", {q[0] > 0.0 ? 0.0 : 1.0, q[0] > 0.0 ? 1.0 : 0.0, 0.0});
    }
    if (!(q[2] > 0.0 && q[2] < std::numbers::pi)) {
      throw SingularShape("collinear three-body shape (phi must lie in (0, pi))", {0.0, 0.0, 1.0});
    }
  };
  return sys;
}

MechanicalSystem pendulum_system(const PendulumParams& params) {
  params.validate();
  MechanicalSystem sys;
  sys.name = "pendulum";
  sys.group = SymmetryGroup::S1;
  sys.shape_names = {"r1", "r2", "phi"};
  sys.masses = {params.m1, params.m2};
  sys.embedding = [p = params](std::span<const Series> q) {
    const Series& r1 = q[0];
    const Series& r2 = q[1];
    const Series& phi = q[2];
    // Downward branch of each sphere.
    const Series z1 = -sqrt(p.l1 * p.l1 - r1 * r1);
    const Series z2 = -sqrt(p.l2 * p.l2 - r2 * r2);
    const Series x2 = r2 * cos(phi);
    const Series y2 = r2 * sin(phi);
    std::vector<SeriesVec3> out(2);
    out[0] = {r1, zero_like(r1), z1};
    out[1] = {r1 + x2, y2, z1 + z2};
    return out;
  };
  sys.potential = [p = params](std::span<const Series> q) {
    const Series& r1 = q[0];
    const Series& r2 = q[1];
    const Series h1 = sqrt(p.l1 * p.l1 - r1 * r1);
    const Series h2 = sqrt(p.l2 * p.l2 - r2 * r2);
    return (-p.m1 * p.gravity) * h1 - (p.m2 * p.gravity) * (h1 + h2);
  };
  sys.check_shape = [p = params](std::span<const double> q) {
    if (!(std::abs(q[0]) < p.l1)) throw SingularShape("pendulum shape needs |r1| < l1", {1.0, 0.0, 0.0});
    if (!(std::abs(q[1]) < p.l2)) throw SingularShape("pendulum shape needs |r2| < l2", {0.0, 1.0, 0.0});
  };
  return sys;
}

std::array<double, 8> LagrangeTriangle::chart_point(double r) const {
  return {0.0, shape[0], shape[1], shape[2], 0.0, 0.0, 0.0, r * p3_per_r};
}

LagrangeTriangle lagrange_triangle_shape(const ThreeBodyParams& params, double b) {
  params.validate();
  if (!(b > 0.0)) throw DomainError("triangle size b must be positive");
  const double s1 = std::sqrt(params.mu1());
  const double s2 = std::sqrt(params.mu2());
  const Eigen::Vector3d v1(s1 * b, 0.0, 0.0);
  const Eigen::Vector3d v2(s2 * 0.5 * b * (params.m3 - params.m1) / (params.m1 + params.m3),
                           s2 * 0.5 * std::sqrt(3.0) * b, 0.0);
  LagrangeTriangle t;
  const double r1 = v1.norm();
  const double r2 = v2.norm();
  t.shape = {r1, r2, std::acos(v1.dot(v2) / (r1 * r2))};
  t.p3_per_r = r2 * r2 / (r1 * r1 + r2 * r2);
  return t;
}

MechanicalSystem ModelConfig::system() const {
  if (const auto* tb = std::get_if<ThreeBodyParams>(&params)) return three_body_system(*tb);
  return pendulum_system(std::get<PendulumParams>(params));
}

ModelConfig model_from_json(const nlohmann::json& j) {
  const std::string name = j.value("system", std::string("three-body"));
  auto masses = [&](std::size_t n) {
    std::vector<double> m;
    if (j.contains("masses")) m = j.at("masses").get<std::vector<double>>();
    if (!m.empty() && m.size() != n) {
      throw DomainError("expected " + std::to_string(n) + " masses for system " + name);
    }
    return m;
  };
  try {
    if (name == "three-body") {
      ThreeBodyParams p;
      if (auto m = masses(3); !m.empty()) {
        p.m1 = m[0];
        p.m2 = m[1];
        p.m3 = m[2];
      }
      p.d0 = j.value("d0", p.d0);
      p.validate();
      return {p};
    }
    if (name == "pendulum") {
      PendulumParams p;
      if (auto m = masses(2); !m.empty()) {
        p.m1 = m[0];
        p.m2 = m[1];
      }
      if (j.contains("lengths")) {
        const auto l = j.at("lengths").get<std::vector<double>>();
        if (l.size() != 2) throw DomainError("expected 2 lengths for system pendulum");
        p.l1 = l[0];
        p.l2 = l[1];
      }
      p.gravity = j.value("gravity", p.gravity);
      p.validate();
      return {p};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed model config: ") + e.what());
  }
  throw DomainError("unknown system '" + name + "' (expected three-body or pendulum)");
}

}  // namespace symred
