#pragma once

// Birkhoff normal form around an elliptic equilibrium.
//
// Pipeline: Taylor shift to the equilibrium, linear symplectic change of
// variables diagonalizing the quadratic part, then Lie-series normalization
// degree by degree. All nonlinear algebra runs in complex variables
// z = (q + ip)/sqrt2, where {H2, .} is diagonal on monomials.

#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "symred/series.hpp"

namespace symred {

// Expansion of h around z0 in displacement variables, to degree n0.
// Throws NotEquilibrium when the linear part exceeds tol_linear.
Series taylor_shift(const JetFunction& h, std::span<const double> z0, int n0, double tol_linear = 1e-9);
Series taylor_shift(const Series& h, std::span<const double> z0, int n0, double tol_linear = 1e-9);

struct LinearNormalization {
  // Maps normalized coordinates to the original ones: z_old = M z_new.
  Eigen::MatrixXd M;
  // Positive, ascending.
  std::vector<double> frequencies;
  // +1, or -1 when the mode carries negative energy and the normalized
  // quadratic term is -omega_k (q_k^2 + p_k^2)/2.
  std::vector<int> krein;
  // Complex eigenvectors of J D^2 h used for the columns of M.
  Eigen::MatrixXcd eigenvectors;

  // Signed frequencies krein_k * omega_k.
  std::vector<double> signed_frequencies() const;
};

// Diagonalizes the quadratic part of h2 (the higher degrees are ignored).
// `extra_phase` rotates each mode's eigenvector by the given angle after the
// default phase convention; used to check phase independence.
// Throws NotElliptic on real or repeated eigenvalues.
LinearNormalization linearize_and_normalize(const Series& h2, std::span<const double> extra_phase = {});

// s(M z) for a linear change of variables.
Series linear_substitute(const Series& s, const Eigen::MatrixXd& M);

// Solution of D W = H_n - K_n with D = {H2, .}, H2 = sum omega_k z_k zbar_k,
// and K_n the kernel (alpha = beta) part. D acts on z^alpha zbar^beta by
// multiplication with -i <omega, beta - alpha>.
struct HomologicalSolution {
  ComplexSeries generator;
  ComplexSeries kernel;
  // Non-kernel terms with a divisor below tol_res (only with keep_resonant).
  ComplexSeries resonant;
};

// Throws ResonanceError when a non-kernel divisor <omega, beta - alpha> is
// below tol_res, unless keep_resonant is set, in which case such terms are
// returned in `resonant` and left out of the generator.
HomologicalSolution homological_solve(const ComplexSeries& hn, std::span<const double> omega, double tol_res = 1e-10,
                                      bool keep_resonant = false);

struct RealHomologicalSolution {
  Series generator;
  Series kernel;
};
RealHomologicalSolution homological_solve(const Series& hn, std::span<const double> omega, double tol_res = 1e-10);

// exp(ad_W) H = sum_k ad_W^k H / k!, with ad_W H = {W, H}, truncated at H's degree.
// The result is H composed with the time-one map of the flow generated by -W.
Series lie_transform(const Series& h, const Series& w);
ComplexSeries lie_transform(const ComplexSeries& h, const ComplexSeries& w);

// min |<m, omega>| over integer vectors with 0 < |m|_1 <= order.
struct ResonanceMargin {
  double value = 0.0;
  std::vector<int> vector;
};
ResonanceMargin resonance_margin(std::span<const double> omega, int order);

struct NormalForm {
  double E0 = 0.0;
  int order = 0;
  std::vector<double> z0;
  LinearNormalization linear;
  // Action multi-index (powers of I_k = (q_k^2 + p_k^2)/2) -> coefficient.
  // Includes the constant and the linear terms.
  std::map<std::vector<int>, double> action_terms;
  // Generators W_3..W_order in the normalized real coordinates.
  std::vector<Series> generators;
  // Normal form as a series in the normalized real coordinates.
  Series h_nf;
  // Resonant terms of the top degree that were kept in h_nf. They are not
  // monomials in the actions, so the action coefficients do not see them.
  Series resonant;
  ResonanceMargin margin;
  // Chart point as series in the normal-form coordinates, to degree `order`.
  std::vector<Series> coordinate_map;

  // Chart point corresponding to normal-form coordinates z.
  std::vector<double> to_original(std::span<const double> z) const;
  double action_coefficient(std::span<const int> alpha) const;
};

struct NormalFormOptions {
  double tol_res = 1e-10;
  double tol_linear = 1e-9;
  std::vector<double> extra_phase;
};

// Throws NotEquilibrium, NotElliptic, ResonanceError, or DomainError for an
// odd or too small order. A resonance is fatal below the top degree; at the
// top degree the resonant terms stay in h_nf and are listed in `resonant`.
NormalForm normal_form(const JetFunction& h, std::span<const double> z0, int order, const NormalFormOptions& opts = {});
// Same for a Hamiltonian already expanded at its equilibrium.
NormalForm normal_form_of_series(const Series& shifted, std::span<const double> z0, int order,
                                 const NormalFormOptions& opts = {});

// { E0, order, frequencies, action_terms: [[alpha, coeff], ...], M (row-major), resonance_margin }
nlohmann::json normal_form_to_json(const NormalForm& nf);

}  // namespace symred
