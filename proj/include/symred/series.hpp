#pragma once

// Sparse truncated multivariate power series over phase space.
//
// A series lives in a fixed number of variables ordered (q_1..q_f, p_1..p_f)
// and carries a truncation degree: every product or composition discards terms
// of total degree above it. Terms are kept sorted by (total degree, packed
// exponent) so iteration is graded and deterministic.

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace symred {

// Exponent vector packed four bits per variable into one word.
class MultiIndex {
 public:
  static constexpr int kMaxVars = 16;
  static constexpr int kMaxExponent = 15;

  constexpr MultiIndex() = default;
  explicit MultiIndex(std::span<const int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  static constexpr MultiIndex from_packed(std::uint64_t bits) {
    MultiIndex m;
    m.bits_ = bits;
    return m;
  }
  static MultiIndex unit(int var);

  int operator[](int var) const { return static_cast<int>((bits_ >> (4 * var)) & 0xFu); }

  // Nibble sum; valid because every stored index has total degree <= 15.
  int degree() const { return static_cast<int>((bits_ * 0x1111111111111111ULL) >> 60); }

  std::uint64_t packed() const { return bits_; }
  std::vector<int> exponents(int num_vars) const;

  // Caller guarantees the total degree of the sum stays <= kMaxExponent.
  friend MultiIndex operator+(MultiIndex a, MultiIndex b) { return from_packed(a.bits_ + b.bits_); }

  friend bool operator==(MultiIndex a, MultiIndex b) { return a.bits_ == b.bits_; }
  friend std::strong_ordering operator<=>(MultiIndex a, MultiIndex b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
};

template <typename T>
class BasicSeries {
 public:
  using coefficient_type = T;
  using Term = std::pair<MultiIndex, T>;

  // Coefficients with smaller magnitude are dropped after every operation.
  static constexpr double kPruneThreshold = 1e-14;

  BasicSeries() = default;
  BasicSeries(int num_vars, int max_degree);

  static BasicSeries constant(int num_vars, int max_degree, T value);
  // offset + z_var
  static BasicSeries variable(int num_vars, int max_degree, int var, T offset = T{});
  // Sorts, merges duplicates, prunes and truncates.
  static BasicSeries from_terms(int num_vars, int max_degree, std::vector<Term> terms);

  int num_vars() const { return num_vars_; }
  int max_degree() const { return max_degree_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  T coefficient(MultiIndex index) const;
  T constant_term() const;
  // -1 for the zero series.
  int lowest_degree() const;
  double max_abs_coefficient() const;

  BasicSeries homogeneous_part(int degree) const;
  // Keeps terms of degree <= d and sets the truncation degree to d.
  BasicSeries truncated(int d) const;
  BasicSeries without_constant() const;
  // Truncation degree drops by one.
  BasicSeries derivative(int var) const;
  T evaluate(std::span<const T> z) const;

  BasicSeries& operator+=(const BasicSeries& other);
  BasicSeries& operator-=(const BasicSeries& other);
  BasicSeries& operator*=(T scalar);

  BasicSeries operator-() const;

  // Equality of canonical term maps (the truncation degree is not compared).
  bool operator==(const BasicSeries& other) const {
    return num_vars_ == other.num_vars_ && terms_ == other.terms_;
  }

 private:
  void canonicalize();

  int num_vars_ = 0;
  int max_degree_ = 0;
  std::vector<Term> terms_;
};

using Series = BasicSeries<double>;
using ComplexSeries = BasicSeries<std::complex<double>>;

extern template class BasicSeries<double>;
extern template class BasicSeries<std::complex<double>>;

template <typename T>
BasicSeries<T> operator+(BasicSeries<T> a, const BasicSeries<T>& b) {
  a += b;
  return a;
}
template <typename T>
BasicSeries<T> operator-(BasicSeries<T> a, const BasicSeries<T>& b) {
  a -= b;
  return a;
}
template <typename T>
BasicSeries<T> operator*(BasicSeries<T> a, T s) {
  a *= s;
  return a;
}
template <typename T>
BasicSeries<T> operator*(T s, BasicSeries<T> a) {
  a *= s;
  return a;
}
template <typename T>
BasicSeries<T> operator/(BasicSeries<T> a, T s) {
  a *= T(1) / s;
  return a;
}
template <typename T>
BasicSeries<T> operator+(BasicSeries<T> a, T s) {
  a += BasicSeries<T>::constant(a.num_vars(), a.max_degree(), s);
  return a;
}
template <typename T>
BasicSeries<T> operator+(T s, BasicSeries<T> a) {
  return std::move(a) + s;
}
template <typename T>
BasicSeries<T> operator-(BasicSeries<T> a, T s) {
  return std::move(a) + (-s);
}
template <typename T>
BasicSeries<T> operator-(T s, const BasicSeries<T>& a) {
  return (-a) + s;
}

template <typename T>
BasicSeries<T> operator*(const BasicSeries<T>& a, const BasicSeries<T>& b);

extern template Series operator*(const Series&, const Series&);
extern template ComplexSeries operator*(const ComplexSeries&, const ComplexSeries&);

// sum_k (da/dq_k db/dp_k - da/dp_k db/dq_k), truncated at the common degree.
Series poisson_bracket(const Series& a, const Series& b);
// The same bracket expressed in z_k = (q_k + i p_k)/sqrt2, zbar_k = (q_k - i p_k)/sqrt2,
// where it reads -i sum_k (da/dz_k db/dzbar_k - da/dzbar_k db/dz_k).
ComplexSeries poisson_bracket(const ComplexSeries& a, const ComplexSeries& b);

enum class Elementary { Exp, Sin, Cos, Sqrt, Recip };

// Exact jet composition fn(c0) + fn'(c0)(a - c0) + ... up to a's truncation degree.
// Throws DomainError when c0 is outside fn's domain (sqrt needs c0 > 0, recip c0 != 0).
Series compose(Elementary fn, const Series& a);

inline Series exp(const Series& a) { return compose(Elementary::Exp, a); }
inline Series sin(const Series& a) { return compose(Elementary::Sin, a); }
inline Series cos(const Series& a) { return compose(Elementary::Cos, a); }
inline Series sqrt(const Series& a) { return compose(Elementary::Sqrt, a); }
inline Series recip(const Series& a) { return compose(Elementary::Recip, a); }

// Replaces variable i of s by replacements[i]. The result lives in the
// replacements' variable space and truncation degree.
template <typename T>
BasicSeries<T> substitute(const BasicSeries<T>& s, std::span<const BasicSeries<T>> replacements);

extern template Series substitute(const Series&, std::span<const Series>);
extern template ComplexSeries substitute(const ComplexSeries&, std::span<const ComplexSeries>);

// q_k = (z_k + zbar_k)/sqrt2, p_k = -i (z_k - zbar_k)/sqrt2.
ComplexSeries to_complex(const Series& a);
// Inverse substitution; the imaginary residue of a series satisfying the
// reality condition is rounding noise and is discarded.
Series from_complex(const ComplexSeries& a);

// Largest |c(alpha,beta) - conj(c(beta,alpha))| over all stored terms.
double reality_defect(const ComplexSeries& a);

// A function known through its Taylor expansions: jet(z0, d) returns the
// degree-d expansion of the function at z0 as a series in the displacement z - z0.
using JetFunction = std::function<Series(std::span<const double> z0, int degree)>;

}  // namespace symred
