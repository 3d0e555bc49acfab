#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "symred/errors.hpp"
#include "symred/models.hpp"

using namespace symred;

namespace {

double potential_at(const MechanicalSystem& sys, const std::vector<double>& q) {
  std::vector<Series> s;
  for (double x : q) s.push_back(Series::constant(3, 0, x));
  return sys.potential(s).constant_term();
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("three-body parameters") {
  const ThreeBodyParams p{1.0, 2.0, 3.0, 6.0};
  CHECK(p.mu1() == doctest::Approx(0.75));
  CHECK(p.mu2() == doctest::Approx(2.0 * 4.0 / 6.0));
  CHECK_THROWS_AS(three_body_system({0.0, 1.0, 1.0, 6.0}), DomainError);
  CHECK_THROWS_AS(three_body_system({1.0, 1.0, 1.0, -6.0}), DomainError);
  CHECK_THROWS_AS(pendulum_system({1.0, 1.0, 0.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("Morse potential") {
  CHECK(morse(6.0, 6.0) == -1.0);
  CHECK(morse(6.5, 6.0) > -1.0);
  CHECK(morse(5.5, 6.0) > -1.0);

  const ThreeBodyParams p;
  const auto sys = three_body_system(p);
  const auto tri = lagrange_triangle_shape(p, 6.0);
  const std::vector<double> q(tri.shape.begin(), tri.shape.end());
  CHECK(potential_at(sys, q) == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("distances at the b = 6.5 triangle") {
  const ThreeBodyParams p;
  const double a = 6.5 / std::sqrt(2.0);
  const auto d = three_body_distances(p, a, a, std::numbers::pi / 2);
  for (double x : d) CHECK(x == doctest::Approx(6.5).epsilon(1e-14));
}

TEST_CASE("Lagrange triangle shape") {
  const ThreeBodyParams p;
  const auto t = lagrange_triangle_shape(p, 6.5);
  CHECK(t.shape[0] == doctest::Approx(6.5 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(t.shape[1] == doctest::Approx(6.5 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(t.shape[2] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(std::abs(t.p3_per_r * 19.8302179854 - 9.9151089927) < 1e-9);
  const auto z = t.chart_point(2.0);
  CHECK(z[0] == 0.0);
  CHECK(z[4] == 0.0);
  CHECK(z[7] == doctest::Approx(2.0 * t.p3_per_r));
  for (double b : {3.0, 5.0, 7.25, 9.0}) CHECK(lagrange_triangle_shape(p, b).shape[2] == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(lagrange_triangle_shape(p, -1.0), DomainError);

  // General masses: the shape is still equilateral in physical distances.
  const ThreeBodyParams g{1.0, 2.0, 3.0, 6.0};
  const auto tg = lagrange_triangle_shape(g, 4.0);
  for (double x : three_body_distances(g, tg.shape[0], tg.shape[1], tg.shape[2])) CHECK(x == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("three-body potential is symmetric under exchanging particles 1 and 2") {
  const ThreeBodyParams p;
  const auto sys = three_body_system(p);
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> ur(4.0, 7.0);
  std::uniform_real_distribution<double> up(1.2, 1.9);
  for (int k = 0; k < 20; ++k) {
    const double r1 = ur(rng);
    const double r2 = ur(rng);
    const double ph = up(rng);
    const auto [d13, d23, d12] = three_body_distances(p, r1, r2, ph);
    // Mirrored shape with r13 and r23 exchanged (unit masses).
    const double m1 = d23 / std::sqrt(2.0);
    const double m2 = std::sqrt(((d13 * d13 + d12 * d12) / 2.0 - m1 * m1 / 2.0) / 1.5);
    const double mph = std::acos((d13 * d13 - d12 * d12) / (2.0 * std::sqrt(3.0) * m1 * m2));
    const auto md = three_body_distances(p, m1, m2, mph);
    CHECK(md[0] == doctest::Approx(d23).epsilon(1e-12));
    CHECK(md[1] == doctest::Approx(d13).epsilon(1e-12));
    CHECK(md[2] == doctest::Approx(d12).epsilon(1e-12));
    CHECK(potential_at(sys, {m1, m2, mph}) == doctest::Approx(potential_at(sys, {r1, r2, ph})).epsilon(1e-12));
  }
}

TEST_CASE("pendulum potential") {
  const auto sys = pendulum_system({});
  CHECK(potential_at(sys, {0.0, 0.0, 0.3}) == doctest::Approx(-3.0));
  // No phi dependence in any coefficient.
  std::vector<Series> q{Series::variable(3, 5, 0, 0.2), Series::variable(3, 5, 1, -0.3), Series::variable(3, 5, 2, 0.7)};
  const Series V = sys.potential(q);
  for (const auto& [m, c] : V.terms()) CHECK(m[2] == 0);

  const PendulumParams p{2.0, 0.5, 1.5, 0.8, 9.81};
  const auto s2 = pendulum_system(p);
  const double h1 = std::sqrt(1.5 * 1.5 - 0.4 * 0.4);
  const double h2 = std::sqrt(0.8 * 0.8 - 0.1 * 0.1);
  CHECK(potential_at(s2, {0.4, 0.1, 1.0}) == doctest::Approx(-2.0 * 9.81 * h1 - 0.5 * 9.81 * (h1 + h2)));
}

TEST_CASE("model configuration") {
  const auto c0 = model_from_json(nlohmann::json::object());
  CHECK(c0.is_three_body());
  CHECK(std::get<ThreeBodyParams>(c0.params).d0 == 6.0);

  const auto c1 = model_from_json(nlohmann::json::parse(R"({"system":"three-body","masses":[1,2,3],"d0":5.5})"));
  const auto& t = std::get<ThreeBodyParams>(c1.params);
  CHECK(t.m2 == 2.0);
  CHECK(t.d0 == 5.5);
  CHECK(c1.system().group == SymmetryGroup::SO3);

  const auto c2 = model_from_json(nlohmann::json::parse(R"({"system":"pendulum","lengths":[1.5,0.5],"gravity":2})"));
  CHECK(!c2.is_three_body());
  const auto& pp = std::get<PendulumParams>(c2.params);
  CHECK(pp.l1 == 1.5);
  CHECK(pp.gravity == 2.0);
  CHECK(c2.system().group == SymmetryGroup::S1);

  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"system":"four-body"})")), DomainError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"masses":[1,1]})")), DomainError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"system":"pendulum","lengths":[1]})")), DomainError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"d0":"six"})")), DomainError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"masses":[1,-1,1]})")), DomainError);
}

}  // TEST_SUITE
