#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "symred/series.hpp"

namespace testing {

// Random sparse series with `terms` monomials of degree <= max_degree.
inline symred::Series random_series(std::mt19937& rng, int num_vars, int max_degree, int terms, int min_degree = 0) {
  std::uniform_int_distribution<int> deg(min_degree, max_degree);
  std::uniform_int_distribution<int> var(0, num_vars - 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<symred::Series::Term> t;
  for (int k = 0; k < terms; ++k) {
    std::vector<int> e(static_cast<std::size_t>(num_vars), 0);
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) ++e[static_cast<std::size_t>(var(rng))];
    t.emplace_back(symred::MultiIndex(e), coef(rng));
  }
  return symred::Series::from_terms(num_vars, max_degree, std::move(t));
}

// Same terms under a different truncation degree.
inline symred::Series with_degree(const symred::Series& s, int d) {
  return symred::Series::from_terms(s.num_vars(), d, {s.terms().begin(), s.terms().end()});
}

inline std::vector<double> random_point(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> z(static_cast<std::size_t>(n));
  for (auto& x : z) x = u(rng);
  return z;
}

// Largest coefficient of a - b.
inline double series_distance(const symred::Series& a, const symred::Series& b) {
  symred::Series d = a - b;
  return d.max_abs_coefficient();
}

// Central-difference gradient of a scalar function.
template <typename F>
std::vector<double> fd_gradient(F&& f, std::vector<double> z, double h) {
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double z0 = z[i];
    z[i] = z0 + h;
    const double fp = f(z);
    z[i] = z0 - h;
    const double fm = f(z);
    z[i] = z0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Least-squares slope of log(err) against log(eps).
inline double fitted_exponent(const std::vector<double>& eps, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing
