#include <doctest.h>

#include <cmath>
#include <sstream>

#include "symred/dynamics.hpp"
#include "symred/equilibria.hpp"
#include "symred/errors.hpp"

using namespace symred;

namespace {

ReducedHamiltonian three_body_h(const ThreeBodyParams& p, double r) {
  const auto sys = three_body_system(p);
  return ReducedHamiltonian(sys, ReducedChart::for_system(sys, r));
}

ReducedHamiltonian pendulum_h(const PendulumParams& p, double r) {
  const auto sys = pendulum_system(p);
  return ReducedHamiltonian(sys, ReducedChart::for_system(sys, r));
}

// b with r(b) = level on [lo, hi], where r - level changes sign.
double bisect_level(const ThreeBodyParams& p, double level, double lo, double hi) {
  const double flo = lagrange_relative_equilibrium(p, lo).r - level;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = lagrange_relative_equilibrium(p, mid).r - level;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("equilibria") {

TEST_CASE("Lagrange triangle at b = 6.5") {
  const ThreeBodyParams p;
  const auto eq = lagrange_relative_equilibrium(p, 6.5);
  CHECK(std::abs(eq.r - 19.8302179854) < 1e-8);
  CHECK(std::abs(eq.z[7] - 9.9151089927) < 1e-8);
  CHECK(eq.z[0] == 0.0);
  CHECK(eq.z[4] == 0.0);
  CHECK(std::abs(eq.z[5]) < 1e-14);
  CHECK(std::abs(eq.z[6]) < 1e-14);
  CHECK(std::abs(eq.energy - 2.1181531267) < 1e-9);
  CHECK(eq.elliptic);
  REQUIRE(eq.frequencies.size() == 4);
  CHECK(std::abs(eq.frequencies[0] - 0.2362174000) < 1e-8);
  CHECK(std::abs(eq.frequencies[3] - 1.1984363284) < 1e-8);
}

TEST_CASE("zero momentum gives the potential minimum") {
  const ThreeBodyParams p;
  const auto eq = lagrange_relative_equilibrium(p, 6.0);
  CHECK(eq.r < 1e-6);
  CHECK(eq.energy == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(eq.frequencies.empty());
}

TEST_CASE("no equilibrium inside the potential well") {
  const ThreeBodyParams p;
  CHECK_THROWS_AS(lagrange_relative_equilibrium(p, 5.0), NoEquilibrium);
  CHECK_THROWS_AS(lagrange_relative_equilibrium(p, -1.0), DomainError);
  // With unequal masses and a short-range pair potential the rigidly rotating
  // equilateral triangle is not balanced.
  CHECK_THROWS_AS(lagrange_relative_equilibrium({1.0, 2.0, 3.0, 6.0}, 6.5), NoEquilibrium);
}

TEST_CASE("Newton solve agrees with the closed form") {
  const ThreeBodyParams p;
  const auto closed = lagrange_relative_equilibrium(p, 6.5);
  const auto h = three_body_h(p, closed.r);
  const std::vector<int> free{0, 1, 2};
  const auto eq = solve_effective_potential(h, {4.5, 4.7, 1.55}, free);
  for (std::size_t i = 0; i < eq.z.size(); ++i) CHECK(eq.z[i] == doctest::Approx(closed.z[i]).epsilon(1e-9).scale(1.0));
  CHECK(eq.residual < 1e-10);
}

TEST_CASE("stretched-out pendulum at r = 1") {
  const PendulumParams p;
  const auto eq = stretched_out_equilibrium(p, 1.0);
  CHECK(std::abs(eq.z[0] - 0.4425598655) < 1e-8);
  CHECK(std::abs(eq.z[1] - 0.5656579210) < 1e-8);
  CHECK(eq.z[2] == 0.0);
  CHECK(std::abs(eq.z[5] - 0.4704091824) < 1e-8);
  CHECK(std::abs(eq.energy + 2.2056999577) < 1e-9);
  CHECK(eq.elliptic);
  CHECK(std::abs(eq.frequencies[0] - 1.2572610531) < 1e-8);
  CHECK(std::abs(eq.frequencies[1] - 1.4864684140) < 1e-8);
  CHECK(std::abs(eq.frequencies[2] - 2.6603546311) < 1e-8);
  CHECK(eq.residual < 1e-10);

  NewtonOptions tight;
  tight.max_iterations = 1;
  const auto h = pendulum_h(p, 1.0);
  const std::vector<int> free{0, 1};
  CHECK_THROWS_AS(solve_effective_potential(h, {0.1, 0.1, 0.0}, free, tight), ConvergenceError);
}

TEST_CASE("equilibrium residual report") {
  const ThreeBodyParams p;
  const auto eq = lagrange_relative_equilibrium(p, 6.5);
  const auto h = three_body_h(p, eq.r);
  const auto res = check_equilibrium_conditions(h, eq.z);
  CHECK(res.momentum < 1e-8);
  CHECK(res.shape_gradient < 1e-8);
  CHECK(res.coadjoint == 0.0);

  auto z = eq.z;
  z[0] = 0.4;
  z[1] += 0.3;
  z[6] = 1.0;
  const auto bad = check_equilibrium_conditions(h, z);
  CHECK(std::max({bad.momentum, bad.coadjoint, bad.shape_gradient}) > 1e-3);
  CHECK(bad.coadjoint > 1e-3);
}

TEST_CASE("linear spectrum") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
  H.diagonal() << 2.0, 0.5, 2.0, 0.5;
  auto s = linear_frequencies(H);
  CHECK(s.elliptic);
  CHECK(s.frequencies[0] == doctest::Approx(0.5));
  CHECK(s.frequencies[1] == doctest::Approx(2.0));
  H(1, 1) = -0.5;
  s = linear_frequencies(H);
  CHECK(!s.elliptic);
}

TEST_CASE("range parsing") {
  CHECK(parse_range("5:9:0.05").size() == 81);
  CHECK(parse_range("5:9:0.05").back() == doctest::Approx(9.0));
  CHECK(parse_range("1.5") == std::vector<double>{1.5});
  CHECK(parse_range("3:1:0.1").empty());
  CHECK_THROWS_AS(parse_range("1:2"), DomainError);
  CHECK_THROWS_AS(parse_range("1:2:0"), DomainError);
  CHECK_THROWS_AS(parse_range("a:2:1"), DomainError);
  CHECK_THROWS_AS(parse_range("1:2:0.1x"), DomainError);
}

TEST_CASE("three-body sweep") {
  const ThreeBodyParams p;
  const auto bs = parse_range("5:9:0.05");
  const auto rows = sweep_three_body(p, bs, 1);
  const auto rows4 = sweep_three_body(p, bs, 4);
  REQUIRE(rows.size() == bs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].param == bs[i]);
    CHECK(rows[i].eq.has_value() == rows4[i].eq.has_value());
    if (rows[i].eq) CHECK(rows[i].eq->r == rows4[i].eq->r);
  }
  // b below d0 has no equilibrium; failed rows are kept.
  CHECK(!rows.front().eq);

  const auto single = lagrange_relative_equilibrium(p, 6.5);
  bool found = false;
  for (const auto& row : rows) {
    if (std::abs(row.param - 6.5) < 1e-12) {
      found = true;
      REQUIRE(row.eq);
      CHECK(row.eq->r == doctest::Approx(single.r).epsilon(1e-14));
    }
  }
  CHECK(found);

  // The reduced vector field vanishes at every converged point.
  for (const auto& row : rows) {
    if (!row.eq || row.eq->r == 0.0) continue;
    const auto sys = three_body_system(p);
    const ReducedHamiltonian h(sys, ReducedChart::for_system(sys, row.eq->r));
    CHECK(reduced_vector_field(h, row.eq->z).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("r(b) levels have two roots and the smaller triangle has lower energy") {
  const ThreeBodyParams p;
  const auto bs = parse_range("6.2:9:0.01");
  const auto rows = sweep_three_body(p, bs, 0);
  std::vector<double> r;
  for (const auto& row : rows) {
    REQUIRE(row.eq);
    r.push_back(row.eq->r);
  }
  const auto imax = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  CHECK(imax > 0);
  CHECK(imax + 1 < r.size());
  const double floor = std::max(r.front(), r.back());
  for (int k = 1; k <= 20; ++k) {
    const double level = floor + (r[imax] - floor) * k / 21.0;
    int roots = 0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      if ((r[i] - level) * (r[i + 1] - level) < 0.0) ++roots;
    }
    CHECK(roots == 2);
    const double b_small = bisect_level(p, level, bs.front(), bs[imax]);
    const double b_large = bisect_level(p, level, bs[imax], bs.back());
    const auto e_small = lagrange_relative_equilibrium(p, b_small);
    const auto e_large = lagrange_relative_equilibrium(p, b_large);
    CHECK(e_small.r == doctest::Approx(level).epsilon(1e-9));
    CHECK(e_small.energy < e_large.energy);
  }
}

TEST_CASE("pendulum sweep") {
  const PendulumParams p;
  const auto rs = parse_range("0.5:2:0.05");
  const auto rows = sweep_pendulum(p, rs);
  REQUIRE(rows.size() == rs.size());
  bool found = false;
  for (const auto& row : rows) {
    REQUIRE(row.eq);
    CHECK(row.eq->elliptic);
    if (std::abs(row.param - 1.0) < 1e-12) {
      found = true;
      CHECK(std::abs(row.eq->frequencies[0] - 1.2572610531) < 1e-8);
      CHECK(std::abs(row.eq->frequencies[1] - 1.4864684140) < 1e-8);
      CHECK(std::abs(row.eq->frequencies[2] - 2.6603546311) < 1e-8);
    }
  }
  CHECK(found);
  CHECK(sweep_pendulum(p, std::vector<double>{}).empty());
}

TEST_CASE("sweep CSV") {
  std::vector<SweepRow> rows(2);
  rows[0].param = 5.0;
  rows[1].param = 6.5;
  rows[1].eq = lagrange_relative_equilibrium({}, 6.5);
  std::ostringstream os;
  write_sweep_csv(os, rows, 4);
  std::istringstream is(os.str());
  std::string header, l1, l2;
  std::getline(is, header);
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(header == "param,r,energy,omega_1,omega_2,omega_3,omega_4,converged");
  CHECK(l1 == "5,nan,nan,nan,nan,nan,nan,0");
  CHECK(l2.rfind("6.5,19.83021798", 0) == 0);
  CHECK(l2.substr(l2.size() - 2) == ",1");

  std::ostringstream empty;
  write_sweep_csv(empty, std::vector<SweepRow>{}, 3);
  CHECK(empty.str() == "param,r,energy,omega_1,omega_2,omega_3,converged\n");
}

}  // TEST_SUITE
