#pragma once

// Concrete systems: a translation-reduced three-body molecule with pairwise
// Morse potential (mass-weighted Jacobi vectors, xxy-gauge) and the double
// spherical pendulum in a gravitational field.

#include <array>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "symred/mech.hpp"

namespace symred {

struct ThreeBodyParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double m3 = 1.0;
  double d0 = 6.0;

  double mu1() const { return m1 * m3 / (m1 + m3); }
  double mu2() const { return m2 * (m1 + m3) / (m1 + m2 + m3); }
  // Throws DomainError on non-positive entries.
  void validate() const;
};

struct PendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double gravity = 1.0;

  void validate() const;
};

// Shape (r1, r2, phi); body vectors r1 = (r1, 0, 0), r2 = (r2 cos phi, r2 sin phi, 0).
MechanicalSystem three_body_system(const ThreeBodyParams& params);

// Shape (r1, r2, phi); particles at s1 and s1 + s2 with
// s_i = (r_i cos phi_i, r_i sin phi_i, -sqrt(l_i^2 - r_i^2)), phi_1 = 0, phi_2 = phi.
// Symmetry: rotations about the vertical axis.
MechanicalSystem pendulum_system(const PendulumParams& params);

// Interparticle distances (r13, r23, r12) at a three-body shape point.
std::array<double, 3> three_body_distances(const ThreeBodyParams& params, double r1, double r2, double phi);

double morse(double r, double d0);

struct LagrangeTriangle {
  std::array<double, 3> shape{};  // (r1, r2, phi)
  // p3 = r * p3_per_r, p1 = p2 = 0; Deprit point (u, v) = (0, 0).
  double p3_per_r = 0.0;

  // Full chart point (u, r1, r2, phi, v, p1, p2, p3) at momentum r.
  std::array<double, 8> chart_point(double r) const;
};

// Equilateral triangle of side b in Jacobi coordinates.
LagrangeTriangle lagrange_triangle_shape(const ThreeBodyParams& params, double b);

struct ModelConfig {
  std::variant<ThreeBodyParams, PendulumParams> params;

  bool is_three_body() const { return std::holds_alternative<ThreeBodyParams>(params); }
  MechanicalSystem system() const;
};

// { "system": "three-body" | "pendulum", "masses": [...], "d0": x } or
// { ..., "lengths": [l1, l2], "gravity": a }. Missing keys keep the defaults.
// Throws DomainError on unknown systems or invalid values.
ModelConfig model_from_json(const nlohmann::json& j);

}  // namespace symred
