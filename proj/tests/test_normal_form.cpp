#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "symred/equilibria.hpp"
#include "symred/errors.hpp"
#include "symred/normal_form.hpp"

using namespace symred;
using testing::random_point;
using testing::random_series;
using testing::series_distance;
using testing::with_degree;

namespace {

// omega_k/2 (q_k^2 + p_k^2) summed over modes.
Series oscillators(const std::vector<double>& w, int degree) {
  const int f = static_cast<int>(w.size());
  Series h(2 * f, degree);
  for (int k = 0; k < f; ++k) {
    const Series q = Series::variable(2 * f, degree, k);
    const Series p = Series::variable(2 * f, degree, f + k);
    h += (0.5 * w[static_cast<std::size_t>(k)]) * (q * q + p * p);
  }
  return h;
}

// Hamiltonian vector field of g in canonical (q, p) order.
std::vector<double> field(const std::vector<Series>& dg, int f, const std::vector<double>& z) {
  std::vector<double> v(z.size());
  for (int k = 0; k < f; ++k) {
    v[static_cast<std::size_t>(k)] = dg[static_cast<std::size_t>(f + k)].evaluate(z);
    v[static_cast<std::size_t>(f + k)] = -dg[static_cast<std::size_t>(k)].evaluate(z);
  }
  return v;
}

// Time-one map of the flow of g, RK4 with many small steps.
std::vector<double> flow(const Series& g, std::vector<double> z, int steps = 2000) {
  const int n = g.num_vars();
  const int f = n / 2;
  std::vector<Series> dg;
  for (int i = 0; i < n; ++i) dg.push_back(g.derivative(i));
  const double h = 1.0 / steps;
  auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  for (int s = 0; s < steps; ++s) {
    const auto k1 = field(dg, f, z);
    const auto k2 = field(dg, f, axpy(z, 0.5 * h, k1));
    const auto k3 = field(dg, f, axpy(z, 0.5 * h, k2));
    const auto k4 = field(dg, f, axpy(z, h, k3));
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return z;
}

ReducedHamiltonian pendulum_h(double r) {
  const auto sys = pendulum_system({});
  return ReducedHamiltonian(sys, ReducedChart::for_system(sys, r));
}

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("Taylor shift") {
  const Series q = Series::variable(2, 4, 0);
  const Series p = Series::variable(2, 4, 1);
  const Series h = (q - 1.0) * (q - 1.0) + 0.5 * p * p;
  const std::vector<double> z0{1.0, 0.0};
  const Series s = taylor_shift(h, z0, 4);
  CHECK(series_distance(s, q * q + 0.5 * p * p) < 1e-14);
  const std::vector<double> off{0.5, 0.0};
  CHECK_THROWS_AS(taylor_shift(h, off, 4), NotEquilibrium);
}

TEST_CASE("cubic terms are removed entirely") {
  // f = 1: every cubic monomial is non-resonant, so the kernel is empty.
  const std::vector<double> w{1.3};
  std::mt19937 rng(61);
  const Series h3 = with_degree(random_series(rng, 2, 3, 8, 3), 3);
  const auto sol = homological_solve(h3, w);
  CHECK(sol.kernel.empty());
  // {H2, W} = H3 - K3.
  const Series lhs = poisson_bracket(oscillators(w, 3), sol.generator);
  CHECK(series_distance(lhs, h3) < 1e-12);
}

TEST_CASE("homological equation in two and three modes") {
  std::mt19937 rng(62);
  for (const std::vector<double>& w : {std::vector<double>{0.7, 1.9}, std::vector<double>{1.0, std::sqrt(2.0), std::sqrt(5.0)}}) {
    const int n = 2 * static_cast<int>(w.size());
    for (int deg = 3; deg <= 6; ++deg) {
      const Series hn = with_degree(random_series(rng, n, deg, 25, deg), deg);
      const auto sol = homological_solve(hn, w);
      const Series lhs = poisson_bracket(oscillators(w, deg), sol.generator);
      CHECK(series_distance(lhs, hn - sol.kernel) < 1e-11);
      CHECK(poisson_bracket(oscillators(w, deg), sol.kernel).max_abs_coefficient() < 1e-11);
    }
  }
}

TEST_CASE("quartic oscillator") {
  // h = omega/2 (q^2 + p^2) + q^4: with q = sqrt(2I) sin(theta), q^4 averages to 3/2 I^2.
  for (double w : {1.0, 0.6, 2.5}) {
    const Series q = Series::variable(2, 4, 0);
    const Series h = oscillators({w}, 4) + q * q * q * q;
    const std::vector<double> z0{0.0, 0.0};
    const NormalForm nf = normal_form_of_series(h, z0, 4);
    CHECK(std::abs(nf.action_coefficient(std::vector<int>{1}) - w) < 1e-12);
    CHECK(std::abs(nf.action_coefficient(std::vector<int>{2}) - 1.5) < 1e-12);
    CHECK(nf.action_terms.size() == 2);
  }
}

TEST_CASE("resonances") {
  // 1:2 resonance: z1^2 zbar2 has divisor 0.
  const std::vector<double> w{1.0, 2.0};
  const Series q1 = Series::variable(4, 3, 0);
  const Series q2 = Series::variable(4, 3, 1);
  const Series h3 = q1 * q1 * q2;
  CHECK_THROWS_AS(homological_solve(h3, w), ResonanceError);
  const auto kept = homological_solve(to_complex(h3), w, 1e-10, true);
  CHECK(!kept.resonant.empty());

  const auto m = resonance_margin(w, 3);
  CHECK(m.value == 0.0);
  const auto m2 = resonance_margin(std::vector<double>{1.0, std::sqrt(2.0)}, 4);
  CHECK(m2.value == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(resonance_margin(std::vector<double>{1.0, std::sqrt(2.0)}, 5).value == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("Lie transform basics") {
  std::mt19937 rng(63);
  const Series h = with_degree(random_series(rng, 4, 6, 20), 6);
  CHECK(lie_transform(h, Series(4, 6)) == h);

  // A degree-k generator lowers degrees by at most k - 2, so degrees below k - 1 are unchanged.
  const Series w = with_degree(random_series(rng, 4, 4, 10, 4), 6);
  const Series t = lie_transform(h, w);
  CHECK(series_distance(t.truncated(2), h.truncated(2)) < 1e-14);
}

TEST_CASE("Lie transform equals composition with the flow of -W") {
  std::mt19937 rng(64);
  const Series h = with_degree(random_series(rng, 4, 4, 15, 2), 12);
  const Series w = with_degree(random_series(rng, 4, 3, 8, 3), 12);
  const Series t = lie_transform(h, w);
  for (int k = 0; k < 10; ++k) {
    const auto z = random_point(rng, 4, 0.05);
    const auto moved = flow(-w, z);
    CHECK(std::abs(t.evaluate(z) - h.evaluate(moved)) < 1e-14);
  }
}

TEST_CASE("normal form of an action polynomial is itself") {
  const std::vector<double> w{1.0, std::sqrt(3.0)};
  Series h = oscillators(w, 6);
  const Series I1 = oscillators({1.0, 0.0}, 6);
  const Series I2 = oscillators({0.0, 1.0}, 6);
  h += 0.3 * I1 * I1 - 0.7 * I1 * I2 + 0.2 * I1 * I2 * I2;
  const std::vector<double> z0(4, 0.0);
  const NormalForm nf = normal_form_of_series(h, z0, 6);
  for (const auto& g : nf.generators) CHECK(g.max_abs_coefficient() < 1e-12);
  CHECK(nf.action_coefficient(std::vector<int>{2, 0}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(nf.action_coefficient(std::vector<int>{1, 1}) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(nf.action_coefficient(std::vector<int>{1, 2}) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("linear normalization") {
  const auto h = pendulum_h(1.0);
  const auto eq = stretched_out_equilibrium({}, 1.0);
  const Series shifted = taylor_shift(h.jet(), eq.z, 2);
  const auto lin = linearize_and_normalize(shifted.homogeneous_part(2));
  const Eigen::MatrixXd Jf = symplectic_unit(3);
  CHECK((lin.M.transpose() * Jf * lin.M - Jf).cwiseAbs().maxCoeff() < 1e-10);

  const Series h2 = linear_substitute(shifted.homogeneous_part(2), lin.M);
  for (const auto& [m, c] : h2.terms()) {
    bool diagonal = false;
    for (int k = 0; k < 3; ++k) {
      std::vector<int> eq2(6, 0), eq3(6, 0);
      eq2[static_cast<std::size_t>(k)] = 2;
      eq3[static_cast<std::size_t>(k + 3)] = 2;
      if (m == MultiIndex(eq2) || m == MultiIndex(eq3)) {
        diagonal = true;
        CHECK(c == doctest::Approx(0.5 * lin.frequencies[static_cast<std::size_t>(k)]).epsilon(1e-10));
      }
    }
    if (!diagonal) CHECK(std::abs(c) < 1e-10);
  }

  Series hyper = Series::variable(2, 2, 0) * Series::variable(2, 2, 1);
  CHECK_THROWS_AS(linearize_and_normalize(hyper), NotElliptic);
}

TEST_CASE("action coefficients do not depend on the eigenvector phase") {
  const auto h = pendulum_h(1.0);
  const auto eq = stretched_out_equilibrium({}, 1.0);
  const NormalForm a = normal_form(h.jet(), eq.z, 4);
  NormalFormOptions opts;
  opts.extra_phase = {0.4, -1.1, 2.0};
  const NormalForm b = normal_form(h.jet(), eq.z, 4, opts);
  CHECK((a.linear.M - b.linear.M).cwiseAbs().maxCoeff() > 1e-3);
  for (const auto& [alpha, c] : a.action_terms) CHECK(std::abs(b.action_coefficient(alpha) - c) < 1e-8);
}

TEST_CASE("pendulum normal form") {
  const auto h = pendulum_h(1.0);
  const auto eq = stretched_out_equilibrium({}, 1.0);
  const NormalForm nf = normal_form(h.jet(), eq.z, 4);
  CHECK(std::abs(nf.E0 + 2.2056999577) < 1e-9);
  CHECK(nf.resonant.empty());

  const Series h2 = oscillators(nf.linear.signed_frequencies(), 4);
  CHECK(poisson_bracket(h2, nf.h_nf).max_abs_coefficient() < 1e-10);

  // h(to_original(z)) - h_nf(z) = O(|z|^5).
  const Series shifted = taylor_shift(h.jet(), eq.z, 6);
  std::mt19937 rng(65);
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < 20; ++k) {
    auto d = random_point(rng, 6, 1.0);
    double norm = 0.0;
    for (double x : d) norm += x * x;
    for (double& x : d) x /= std::sqrt(norm);
    dirs.push_back(d);
  }
  const std::vector<double> eps{2e-2, 1e-2, 5e-3, 2.5e-3};
  std::vector<double> err;
  for (double e : eps) {
    double worst = 0.0;
    for (const auto& d : dirs) {
      std::vector<double> z(d.size());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = e * d[i];
      auto x = nf.to_original(z);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eq.z[i];
      worst = std::max(worst, std::abs(shifted.evaluate(x) - nf.h_nf.evaluate(z)));
    }
    err.push_back(worst);
  }
  CHECK(testing::fitted_exponent(eps, err) == doctest::Approx(5.0).epsilon(0.3 / 5.0));
}

TEST_CASE("order validation and output") {
  const Series q = Series::variable(2, 4, 0);
  const Series h = oscillators({1.0}, 4) + q * q * q * q;
  const std::vector<double> z0{0.0, 0.0};
  CHECK_THROWS_AS(normal_form_of_series(h, z0, 3), DomainError);
  CHECK_THROWS_AS(normal_form_of_series(h, z0, 0), DomainError);
  const NormalForm nf = normal_form_of_series(h, z0, 4);
  const auto j = normal_form_to_json(nf);
  CHECK(j.at("order") == 4);
  CHECK(j.at("frequencies").size() == 1);
  CHECK(j.at("action_terms").size() == 2);
  CHECK(j.at("M").size() == 4);
  CHECK(j.contains("resonance_margin"));
}

}  // TEST_SUITE
