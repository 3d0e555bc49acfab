#include "symred/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "symred/errors.hpp"
#include "symred/mech.hpp"

namespace symred {

namespace {

using C = std::complex<double>;

void check_linear_part(const Series& s, double tol) {
  double worst = 0.0;
  for (const auto& [m, c] : s.terms()) {
    if (m.degree() == 1) worst = std::max(worst, std::abs(c));
  }
  if (worst > tol) {
    throw NotEquilibrium(fmt::format("expansion point is not an equilibrium: linear part {:.3e} exceeds {:.1e}",
                                     worst, tol));
  }
}

// Split of a packed index over 2f variables into (alpha, beta).
void split_index(MultiIndex m, int f, std::vector<int>& alpha, std::vector<int>& beta) {
  for (int k = 0; k < f; ++k) {
    alpha[static_cast<std::size_t>(k)] = m[k];
    beta[static_cast<std::size_t>(k)] = m[k + f];
  }
}

template <typename T>
BasicSeries<T> lie_series(const BasicSeries<T>& h, const BasicSeries<T>& w) {
  const int d = h.max_degree();
  const BasicSeries<T> wd = w.truncated(d);
  BasicSeries<T> out = h;
  BasicSeries<T> term = h;
  // Each bracket with a generator of degree >= 3 raises the lowest degree, so
  // the sum terminates; the cap only guards against degenerate input.
  for (int k = 1; k <= 4 * d + 8; ++k) {
    term = poisson_bracket(wd, term);
    if (term.empty()) break;
    term *= T(1.0 / k);
    out += term;
  }
  return out;
}

}  // namespace

Series taylor_shift(const JetFunction& h, std::span<const double> z0, int n0, double tol_linear) {
  Series s = h(z0, n0).truncated(n0);
  check_linear_part(s, tol_linear);
  return s;
}

Series taylor_shift(const Series& h, std::span<const double> z0, int n0, double tol_linear) {
  const int n = h.num_vars();
  if (static_cast<int>(z0.size()) != n) throw DimensionMismatch("shift point has the wrong dimension");
  std::vector<Series> rep;
  rep.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) rep.push_back(Series::variable(n, n0, k, z0[static_cast<std::size_t>(k)]));
  Series s = substitute<double>(h, rep).truncated(n0);
  check_linear_part(s, tol_linear);
  return s;
}

std::vector<double> LinearNormalization::signed_frequencies() const {
  std::vector<double> w(frequencies.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = krein[k] * frequencies[k];
  return w;
}

LinearNormalization linearize_and_normalize(const Series& h2, std::span<const double> extra_phase) {
  const int n = h2.num_vars();
  if (n % 2 != 0) throw DimensionMismatch("phase space must be even-dimensional");
  const int f = n / 2;
  if (!extra_phase.empty() && static_cast<int>(extra_phase.size()) != f) {
    throw DimensionMismatch("one extra phase per mode expected");
  }

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [m, c] : h2.terms()) {
    if (m.degree() != 2) continue;
    int i = -1;
    int j = -1;
    for (int k = 0; k < n; ++k) {
      for (int e = 0; e < m[k]; ++e) (i < 0 ? i : j) = k;
    }
    if (i == j) {
      S(i, i) = 2.0 * c;
    } else {
      S(i, j) = c;
      S(j, i) = c;
    }
  }
  const Eigen::MatrixXd A = symplectic_unit(f) * S;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  const Eigen::VectorXcd ev = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();

  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<int> picked;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i).real()) > 1e-9 * scale) {
      throw NotElliptic(fmt::format("linearization has eigenvalue {:.10g}{:+.10g}i with nonzero real part",
                                    ev(i).real(), ev(i).imag()));
    }
    if (ev(i).imag() > 0.0) picked.push_back(i);
  }
  if (static_cast<int>(picked.size()) != f) throw NotElliptic("linearization has a zero or repeated eigenvalue");
  std::sort(picked.begin(), picked.end(), [&](int a, int b) { return ev(a).imag() < ev(b).imag(); });
  for (int k = 0; k + 1 < f; ++k) {
    if (ev(picked[static_cast<std::size_t>(k + 1)]).imag() - ev(picked[static_cast<std::size_t>(k)]).imag() < 1e-9 * scale) {
      throw NotElliptic("repeated linear frequency");
    }
  }

  const Eigen::MatrixXd Jm = symplectic_unit(f);
  LinearNormalization out;
  out.M = Eigen::MatrixXd::Zero(n, n);
  out.eigenvectors = Eigen::MatrixXcd::Zero(n, f);
  for (int k = 0; k < f; ++k) {
    const int i = picked[static_cast<std::size_t>(k)];
    Eigen::VectorXcd v = vecs.col(i);
    double s = v.real().dot(Jm * v.imag());
    int krein = 1;
    if (s < 0.0) {
      v = v.conjugate().eval();
      s = -s;
      krein = -1;
    }
    Eigen::Index jmax = 0;
    v.cwiseAbs().maxCoeff(&jmax);
    v *= std::conj(v(jmax)) / std::abs(v(jmax));
    if (!extra_phase.empty()) v *= std::polar(1.0, extra_phase[static_cast<std::size_t>(k)]);
    s = v.real().dot(Jm * v.imag());
    const double c = 1.0 / std::sqrt(s);
    out.M.col(k) = c * v.real();
    out.M.col(f + k) = c * v.imag();
    out.eigenvectors.col(k) = v;
    out.frequencies.push_back(ev(i).imag());
    out.krein.push_back(krein);
  }
  return out;
}

Series linear_substitute(const Series& s, const Eigen::MatrixXd& M) {
  const int n = s.num_vars();
  if (M.rows() != n || M.cols() != n) throw DimensionMismatch("linear map has the wrong size");
  std::vector<Series> rep;
  rep.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<Series::Term> t;
    for (int j = 0; j < n; ++j) {
      if (M(i, j) != 0.0) t.emplace_back(MultiIndex::unit(j), M(i, j));
    }
    rep.push_back(Series::from_terms(n, s.max_degree(), std::move(t)));
  }
  return substitute<double>(s, rep);
}

HomologicalSolution homological_solve(const ComplexSeries& hn, std::span<const double> omega, double tol_res,
                                      bool keep_resonant) {
  const int n = hn.num_vars();
  const int f = n / 2;
  if (static_cast<int>(omega.size()) != f) throw DimensionMismatch("one frequency per degree of freedom expected");
  std::vector<int> alpha(static_cast<std::size_t>(f));
  std::vector<int> beta(static_cast<std::size_t>(f));
  std::vector<ComplexSeries::Term> w;
  std::vector<ComplexSeries::Term> ker;
  std::vector<ComplexSeries::Term> res;
  for (const auto& [m, c] : hn.terms()) {
    split_index(m, f, alpha, beta);
    if (alpha == beta) {
      ker.emplace_back(m, c);
      continue;
    }
    double div = 0.0;
    std::vector<int> diff(static_cast<std::size_t>(f));
    for (int k = 0; k < f; ++k) {
      diff[static_cast<std::size_t>(k)] = beta[static_cast<std::size_t>(k)] - alpha[static_cast<std::size_t>(k)];
      div += omega[static_cast<std::size_t>(k)] * diff[static_cast<std::size_t>(k)];
    }
    if (std::abs(div) < tol_res) {
      if (keep_resonant) {
        res.emplace_back(m, c);
        continue;
      }
      throw ResonanceError(fmt::format("resonance: |<omega, m>| = {:.3e} < {:.1e} for m = ({})", std::abs(div),
                                       tol_res, fmt::join(diff, ", ")),
                           diff, div);
    }
    w.emplace_back(m, c / C(0.0, -div));
  }
  return {ComplexSeries::from_terms(n, hn.max_degree(), std::move(w)),
          ComplexSeries::from_terms(n, hn.max_degree(), std::move(ker)),
          ComplexSeries::from_terms(n, hn.max_degree(), std::move(res))};
}

RealHomologicalSolution homological_solve(const Series& hn, std::span<const double> omega, double tol_res) {
  const HomologicalSolution s = homological_solve(to_complex(hn), omega, tol_res);
  return {from_complex(s.generator), from_complex(s.kernel)};
}

Series lie_transform(const Series& h, const Series& w) { return lie_series(h, w); }
ComplexSeries lie_transform(const ComplexSeries& h, const ComplexSeries& w) { return lie_series(h, w); }

ResonanceMargin resonance_margin(std::span<const double> omega, int order) {
  const int f = static_cast<int>(omega.size());
  ResonanceMargin best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<int> m(static_cast<std::size_t>(f), 0);
  std::function<void(int, int)> rec = [&](int k, int budget) {
    if (k == f) {
      if (budget == order) return;  // m = 0
      double s = 0.0;
      for (int i = 0; i < f; ++i) s += m[static_cast<std::size_t>(i)] * std::abs(omega[static_cast<std::size_t>(i)]);
      if (std::abs(s) < best.value) {
        best.value = std::abs(s);
        best.vector = m;
      }
      return;
    }
    for (int e = -budget; e <= budget; ++e) {
      m[static_cast<std::size_t>(k)] = e;
      rec(k + 1, budget - std::abs(e));
    }
    m[static_cast<std::size_t>(k)] = 0;
  };
  if (f > 0 && order > 0) rec(0, order);
  return best;
}

std::vector<double> NormalForm::to_original(std::span<const double> z) const {
  std::vector<double> out(coordinate_map.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = coordinate_map[j].evaluate(z);
  return out;
}

double NormalForm::action_coefficient(std::span<const int> alpha) const {
  const auto it = action_terms.find(std::vector<int>(alpha.begin(), alpha.end()));
  return it == action_terms.end() ? 0.0 : it->second;
}

NormalForm normal_form(const JetFunction& h, std::span<const double> z0, int order, const NormalFormOptions& opts) {
  if (order < 2 || order % 2 != 0) throw DomainError("normal form order must be even and at least 2");
  return normal_form_of_series(taylor_shift(h, z0, order, opts.tol_linear), z0, order, opts);
}

NormalForm normal_form_of_series(const Series& shifted, std::span<const double> z0, int order,
                                 const NormalFormOptions& opts) {
  if (order < 2 || order % 2 != 0) throw DomainError("normal form order must be even and at least 2");
  const int n = shifted.num_vars();
  const int f = n / 2;
  if (static_cast<int>(z0.size()) != n) throw DimensionMismatch("equilibrium point has the wrong dimension");
  check_linear_part(shifted, opts.tol_linear);

  NormalForm nf;
  nf.order = order;
  nf.z0.assign(z0.begin(), z0.end());
  nf.E0 = shifted.constant_term();
  nf.linear = linearize_and_normalize(shifted.homogeneous_part(2), opts.extra_phase);
  nf.margin = resonance_margin(nf.linear.frequencies, order);
  const std::vector<double> omega = nf.linear.signed_frequencies();

  // Linear terms are rounding noise at an equilibrium; drop them before normalizing.
  Series base = shifted.truncated(order);
  base -= base.homogeneous_part(1);
  ComplexSeries current = to_complex(linear_substitute(base, nf.linear.M));

  ComplexSeries resonant(n, order);
  for (int deg = 3; deg <= order; ++deg) {
    const ComplexSeries hn = current.homogeneous_part(deg);
    const HomologicalSolution sol = homological_solve(hn, omega, opts.tol_res, deg == order);
    current = lie_transform(current, sol.generator);
    // The transformed degree-deg part equals kernel + resonant up to rounding.
    current -= current.homogeneous_part(deg);
    current += sol.kernel;
    current += sol.resonant;
    resonant = sol.resonant;
    nf.generators.push_back(from_complex(sol.generator));
  }
  nf.h_nf = from_complex(current);
  nf.resonant = from_complex(resonant);

  std::vector<int> alpha(static_cast<std::size_t>(f));
  std::vector<int> beta(static_cast<std::size_t>(f));
  for (const auto& [m, c] : current.terms()) {
    split_index(m, f, alpha, beta);
    if (alpha == beta) nf.action_terms[alpha] = c.real();
  }

  std::vector<Series> F;
  F.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) F.push_back(Series::variable(n, order, j));
  for (const Series& w : nf.generators) {
    for (auto& fj : F) fj = lie_transform(fj, w);
  }
  for (int i = 0; i < n; ++i) {
    Series s = Series::constant(n, order, z0[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      if (nf.linear.M(i, j) != 0.0) s += nf.linear.M(i, j) * F[static_cast<std::size_t>(j)];
    }
    nf.coordinate_map.push_back(std::move(s));
  }
  return nf;
}

nlohmann::json normal_form_to_json(const NormalForm& nf) {
  nlohmann::json j;
  j["E0"] = nf.E0;
  j["order"] = nf.order;
  j["frequencies"] = nf.linear.frequencies;
  j["krein"] = nf.linear.krein;

  std::vector<std::pair<std::vector<int>, double>> terms(nf.action_terms.begin(), nf.action_terms.end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    const int da = std::accumulate(a.first.begin(), a.first.end(), 0);
    const int db = std::accumulate(b.first.begin(), b.first.end(), 0);
    if (da != db) return da < db;
    return a.first > b.first;
  });
  nlohmann::json at = nlohmann::json::array();
  for (const auto& [alpha, c] : terms) at.push_back(nlohmann::json::array({alpha, c}));
  j["action_terms"] = at;

  std::vector<double> m;
  for (Eigen::Index r = 0; r < nf.linear.M.rows(); ++r)
    for (Eigen::Index c = 0; c < nf.linear.M.cols(); ++c) m.push_back(nf.linear.M(r, c));
  j["M"] = m;
  j["resonance_margin"] = nf.margin.value;
  j["resonance_vector"] = nf.margin.vector;
  j["resonant_terms"] = nf.resonant.size();
  return j;
}

}  // namespace symred
