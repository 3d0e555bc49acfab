#include "symred/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "symred/errors.hpp"

namespace symred {

namespace {

void check_shape(int num_vars, int max_degree) {
  if (num_vars < 0 || num_vars > MultiIndex::kMaxVars) {
    throw DimensionMismatch("series supports at most " + std::to_string(MultiIndex::kMaxVars) +
                            " variables, got " + std::to_string(num_vars));
  }
  if (max_degree < 0 || max_degree > MultiIndex::kMaxExponent) {
    throw DimensionMismatch("truncation degree must lie in [0, " +
                            std::to_string(MultiIndex::kMaxExponent) + "], got " +
                            std::to_string(max_degree));
  }
}

template <typename T>
void check_same_vars(const BasicSeries<T>& a, const BasicSeries<T>& b) {
  if (a.num_vars() != b.num_vars()) {
    throw DimensionMismatch("series variable counts differ: " + std::to_string(a.num_vars()) +
                            " vs " + std::to_string(b.num_vars()));
  }
}

template <typename T>
bool negligible(const T& c) {
  return std::abs(c) < BasicSeries<T>::kPruneThreshold;
}

// d/dz_var without lowering the truncation degree; used where the operands are
// exact polynomials (brackets of homogeneous parts).
template <typename T>
BasicSeries<T> partial(const BasicSeries<T>& s, int var) {
  std::vector<typename BasicSeries<T>::Term> out;
  out.reserve(s.size());
  const std::uint64_t step = std::uint64_t{1} << (4 * var);
  for (const auto& [k, c] : s.terms()) {
    const int e = k[var];
    if (e == 0) continue;
    out.emplace_back(MultiIndex::from_packed(k.packed() - step), c * static_cast<double>(e));
  }
  return BasicSeries<T>::from_terms(s.num_vars(), s.max_degree(), std::move(out));
}

}  // namespace

MultiIndex::MultiIndex(std::span<const int> exponents) {
  if (exponents.size() > static_cast<std::size_t>(kMaxVars)) {
    throw DimensionMismatch("multi-index longer than " + std::to_string(kMaxVars));
  }
  int total = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const int e = exponents[i];
    if (e < 0 || e > kMaxExponent) throw DomainError("exponent out of range: " + std::to_string(e));
    total += e;
    bits_ |= static_cast<std::uint64_t>(e) << (4 * i);
  }
  if (total > kMaxExponent) throw DomainError("total degree above " + std::to_string(kMaxExponent));
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::span<const int>(exponents.begin(), exponents.size())) {}

MultiIndex MultiIndex::unit(int var) {
  if (var < 0 || var >= kMaxVars) throw DimensionMismatch("variable index out of range");
  return from_packed(std::uint64_t{1} << (4 * var));
}

std::vector<int> MultiIndex::exponents(int num_vars) const {
  std::vector<int> e(static_cast<std::size_t>(num_vars));
  for (int i = 0; i < num_vars; ++i) e[static_cast<std::size_t>(i)] = (*this)[i];
  return e;
}

template <typename T>
BasicSeries<T>::BasicSeries(int num_vars, int max_degree) : num_vars_(num_vars), max_degree_(max_degree) {
  check_shape(num_vars, max_degree);
}

template <typename T>
BasicSeries<T> BasicSeries<T>::constant(int num_vars, int max_degree, T value) {
  BasicSeries s(num_vars, max_degree);
  if (!negligible(value)) s.terms_.emplace_back(MultiIndex{}, value);
  return s;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::variable(int num_vars, int max_degree, int var, T offset) {
  if (var < 0 || var >= num_vars) throw DimensionMismatch("variable index out of range");
  std::vector<Term> t;
  t.emplace_back(MultiIndex{}, offset);
  if (max_degree >= 1) t.emplace_back(MultiIndex::unit(var), T(1));
  return from_terms(num_vars, max_degree, std::move(t));
}

template <typename T>
BasicSeries<T> BasicSeries<T>::from_terms(int num_vars, int max_degree, std::vector<Term> terms) {
  BasicSeries s(num_vars, max_degree);
  s.terms_ = std::move(terms);
  s.canonicalize();
  return s;
}

template <typename T>
void BasicSeries<T>::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms_.size();) {
    const MultiIndex key = terms_[i].first;
    T sum = terms_[i].second;
    std::size_t j = i + 1;
    while (j < terms_.size() && terms_[j].first == key) sum += terms_[j++].second;
    if (key.degree() <= max_degree_ && !negligible(sum)) terms_[out++] = Term{key, sum};
    i = j;
  }
  terms_.resize(out);
}

template <typename T>
T BasicSeries<T>::coefficient(MultiIndex index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, MultiIndex k) { return t.first < k; });
  if (it != terms_.end() && it->first == index) return it->second;
  return T{};
}

template <typename T>
T BasicSeries<T>::constant_term() const {
  if (!terms_.empty() && terms_.front().first == MultiIndex{}) return terms_.front().second;
  return T{};
}

template <typename T>
int BasicSeries<T>::lowest_degree() const {
  return terms_.empty() ? -1 : terms_.front().first.degree();
}

template <typename T>
double BasicSeries<T>::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, static_cast<double>(std::abs(c)));
  return m;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::homogeneous_part(int degree) const {
  BasicSeries s(num_vars_, max_degree_);
  for (const auto& t : terms_) {
    if (t.first.degree() == degree) s.terms_.push_back(t);
  }
  return s;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::truncated(int d) const {
  BasicSeries s(num_vars_, d);
  for (const auto& t : terms_) {
    if (t.first.degree() <= d) s.terms_.push_back(t);
  }
  return s;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::without_constant() const {
  BasicSeries s = *this;
  if (!s.terms_.empty() && s.terms_.front().first == MultiIndex{}) s.terms_.erase(s.terms_.begin());
  return s;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw DimensionMismatch("derivative variable out of range");
  BasicSeries d = partial(*this, var);
  return d.truncated(std::max(max_degree_ - 1, 0));
}

template <typename T>
T BasicSeries<T>::evaluate(std::span<const T> z) const {
  if (z.size() != static_cast<std::size_t>(num_vars_)) {
    throw DimensionMismatch("evaluation point has " + std::to_string(z.size()) + " entries, series has " +
                            std::to_string(num_vars_) + " variables");
  }
  const int top = std::max(max_degree_, 1);
  std::vector<T> powers(static_cast<std::size_t>(num_vars_ * (top + 1)));
  for (int i = 0; i < num_vars_; ++i) {
    T p(1);
    for (int e = 0; e <= top; ++e) {
      powers[static_cast<std::size_t>(i * (top + 1) + e)] = p;
      p *= z[static_cast<std::size_t>(i)];
    }
  }
  T sum{};
  for (const auto& [k, c] : terms_) {
    T m = c;
    for (int i = 0; i < num_vars_; ++i) {
      const int e = k[i];
      if (e) m *= powers[static_cast<std::size_t>(i * (top + 1) + e)];
    }
    sum += m;
  }
  return sum;
}

template <typename T>
BasicSeries<T>& BasicSeries<T>::operator+=(const BasicSeries& other) {
  check_same_vars(*this, other);
  max_degree_ = std::min(max_degree_, other.max_degree_);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  while (a != terms_.end() || b != other.terms_.end()) {
    Term t;
    if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      t = *a++;
    } else if (a == terms_.end() || b->first < a->first) {
      t = *b++;
    } else {
      t = Term{a->first, a->second + b->second};
      ++a;
      ++b;
    }
    if (t.first.degree() <= max_degree_ && !negligible(t.second)) merged.push_back(t);
  }
  terms_ = std::move(merged);
  return *this;
}

template <typename T>
BasicSeries<T>& BasicSeries<T>::operator-=(const BasicSeries& other) {
  return *this += -other;
}

template <typename T>
BasicSeries<T>& BasicSeries<T>::operator*=(T scalar) {
  for (auto& t : terms_) t.second *= scalar;
  std::erase_if(terms_, [](const Term& t) { return negligible(t.second); });
  return *this;
}

template <typename T>
BasicSeries<T> BasicSeries<T>::operator-() const {
  BasicSeries s = *this;
  for (auto& t : s.terms_) t.second = -t.second;
  return s;
}

template <typename T>
BasicSeries<T> operator*(const BasicSeries<T>& a, const BasicSeries<T>& b) {
  check_same_vars(a, b);
  const int d = std::min(a.max_degree(), b.max_degree());
  std::vector<typename BasicSeries<T>::Term> out;
  out.reserve(a.size() * b.size());
  const auto bt = b.terms();
  for (const auto& [ka, ca] : a.terms()) {
    const int room = d - ka.degree();
    if (room < 0) break;
    for (const auto& [kb, cb] : bt) {
      if (kb.degree() > room) break;
      out.emplace_back(ka + kb, ca * cb);
    }
  }
  return BasicSeries<T>::from_terms(a.num_vars(), d, std::move(out));
}

template <typename T>
BasicSeries<T> substitute(const BasicSeries<T>& s, std::span<const BasicSeries<T>> replacements) {
  if (replacements.size() != static_cast<std::size_t>(s.num_vars())) {
    throw DimensionMismatch("substitution needs one replacement per variable");
  }
  if (replacements.empty()) return s;
  const int n = replacements.front().num_vars();
  int d = replacements.front().max_degree();
  for (const auto& r : replacements) {
    if (r.num_vars() != n) throw DimensionMismatch("replacement series differ in variable count");
    d = std::min(d, r.max_degree());
  }
  const int nv = s.num_vars();
  std::vector<int> top(static_cast<std::size_t>(nv), 0);
  for (const auto& [k, c] : s.terms()) {
    for (int i = 0; i < nv; ++i) top[static_cast<std::size_t>(i)] = std::max(top[static_cast<std::size_t>(i)], k[i]);
  }
  std::vector<std::vector<BasicSeries<T>>> powers(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    auto& p = powers[static_cast<std::size_t>(i)];
    p.push_back(BasicSeries<T>::constant(n, d, T(1)));
    for (int e = 1; e <= top[static_cast<std::size_t>(i)]; ++e) {
      p.push_back(p.back() * replacements[static_cast<std::size_t>(i)].truncated(d));
    }
  }
  BasicSeries<T> result(n, d);
  for (const auto& [k, c] : s.terms()) {
    BasicSeries<T> m = BasicSeries<T>::constant(n, d, c);
    for (int i = 0; i < nv && !m.empty(); ++i) {
      const int e = k[i];
      if (e) m = m * powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
    }
    result += m;
  }
  return result;
}

template class BasicSeries<double>;
template class BasicSeries<std::complex<double>>;
template Series operator*(const Series&, const Series&);
template ComplexSeries operator*(const ComplexSeries&, const ComplexSeries&);
template Series substitute(const Series&, std::span<const Series>);
template ComplexSeries substitute(const ComplexSeries&, std::span<const ComplexSeries>);

namespace {

template <typename T>
BasicSeries<T> canonical_bracket(const BasicSeries<T>& a, const BasicSeries<T>& b) {
  check_same_vars(a, b);
  if (a.num_vars() % 2 != 0) throw DimensionMismatch("Poisson bracket needs an even number of variables");
  const int f = a.num_vars() / 2;
  const int d = std::min(a.max_degree(), b.max_degree());
  BasicSeries<T> out(a.num_vars(), d);
  for (int k = 0; k < f; ++k) {
    out += partial(a, k) * partial(b, k + f);
    out -= partial(a, k + f) * partial(b, k);
  }
  return out;
}

}  // namespace

Series poisson_bracket(const Series& a, const Series& b) { return canonical_bracket(a, b); }

ComplexSeries poisson_bracket(const ComplexSeries& a, const ComplexSeries& b) {
  ComplexSeries s = canonical_bracket(a, b);
  s *= std::complex<double>(0.0, -1.0);
  return s;
}

Series compose(Elementary fn, const Series& a) {
  const int n = a.num_vars();
  const int d = a.max_degree();
  const double c0 = a.constant_term();
  std::vector<double> coef(static_cast<std::size_t>(d + 1));
  switch (fn) {
    case Elementary::Exp: {
      double f = std::exp(c0);
      for (int k = 0; k <= d; ++k) {
        coef[static_cast<std::size_t>(k)] = f;
        f /= (k + 1);
      }
      break;
    }
    case Elementary::Sin:
    case Elementary::Cos: {
      const double s = std::sin(c0), c = std::cos(c0);
      // k-th derivative of sin cycles through sin, cos, -sin, -cos.
      const double cycle_sin[4] = {s, c, -s, -c};
      const double cycle_cos[4] = {c, -s, -c, s};
      double fact = 1.0;
      for (int k = 0; k <= d; ++k) {
        if (k > 0) fact *= k;
        const double deriv = (fn == Elementary::Sin ? cycle_sin : cycle_cos)[k % 4];
        coef[static_cast<std::size_t>(k)] = deriv / fact;
      }
      break;
    }
    case Elementary::Sqrt: {
      if (!(c0 > 0.0)) {
        throw DomainError("sqrt of a series with constant term " + std::to_string(c0) + " (needs > 0)");
      }
      // sqrt(c0) * binom(1/2, k) * c0^-k
      double b = std::sqrt(c0);
      for (int k = 0; k <= d; ++k) {
        coef[static_cast<std::size_t>(k)] = b;
        b *= (0.5 - k) / ((k + 1) * c0);
      }
      break;
    }
    case Elementary::Recip: {
      if (c0 == 0.0) throw DomainError("reciprocal of a series with zero constant term");
      double r = 1.0 / c0;
      for (int k = 0; k <= d; ++k) {
        coef[static_cast<std::size_t>(k)] = r;
        r *= -1.0 / c0;
      }
      break;
    }
  }
  const Series x = a.without_constant();
  Series result = Series::constant(n, d, coef[0]);
  Series power = Series::constant(n, d, 1.0);
  for (int k = 1; k <= d; ++k) {
    power = power * x;
    if (power.empty()) break;
    result += coef[static_cast<std::size_t>(k)] * power;
  }
  return result;
}

ComplexSeries to_complex(const Series& a) {
  const int n = a.num_vars();
  if (n % 2 != 0) throw DimensionMismatch("complex variables need an even number of variables");
  const int f = n / 2;
  const int d = a.max_degree();
  const double h = 1.0 / std::numbers::sqrt2;
  using C = std::complex<double>;
  std::vector<ComplexSeries> rep;
  rep.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < f; ++k) {
    rep.push_back(ComplexSeries::from_terms(n, d, {{MultiIndex::unit(k), C(h)}, {MultiIndex::unit(k + f), C(h)}}));
  }
  for (int k = 0; k < f; ++k) {
    rep.push_back(
        ComplexSeries::from_terms(n, d, {{MultiIndex::unit(k), C(0, -h)}, {MultiIndex::unit(k + f), C(0, h)}}));
  }
  std::vector<ComplexSeries::Term> t;
  t.reserve(a.size());
  for (const auto& [k, c] : a.terms()) t.emplace_back(k, C(c));
  const ComplexSeries ac = ComplexSeries::from_terms(n, d, std::move(t));
  return substitute<C>(ac, rep);
}

Series from_complex(const ComplexSeries& a) {
  const int n = a.num_vars();
  if (n % 2 != 0) throw DimensionMismatch("complex variables need an even number of variables");
  const int f = n / 2;
  const int d = a.max_degree();
  const double h = 1.0 / std::numbers::sqrt2;
  using C = std::complex<double>;
  std::vector<ComplexSeries> rep;
  rep.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < f; ++k) {
    rep.push_back(ComplexSeries::from_terms(n, d, {{MultiIndex::unit(k), C(h)}, {MultiIndex::unit(k + f), C(0, h)}}));
  }
  for (int k = 0; k < f; ++k) {
    rep.push_back(
        ComplexSeries::from_terms(n, d, {{MultiIndex::unit(k), C(h)}, {MultiIndex::unit(k + f), C(0, -h)}}));
  }
  const ComplexSeries qp = substitute<C>(a, rep);
  std::vector<Series::Term> t;
  t.reserve(qp.size());
  for (const auto& [k, c] : qp.terms()) t.emplace_back(k, c.real());
  return Series::from_terms(n, d, std::move(t));
}

double reality_defect(const ComplexSeries& a) {
  const int n = a.num_vars();
  const int f = n / 2;
  const int half = 4 * f;
  const std::uint64_t mask = half == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << half) - 1);
  double worst = 0.0;
  for (const auto& [k, c] : a.terms()) {
    const std::uint64_t bits = k.packed();
    const std::uint64_t swapped = ((bits & mask) << half) | ((bits >> half) & mask);
    const auto partner = a.coefficient(MultiIndex::from_packed(swapped));
    worst = std::max(worst, std::abs(c - std::conj(partner)));
  }
  return worst;
}

}  // namespace symred
