#include "symred/mech.hpp"

#include <cmath>
#include <string>

#include "symred/errors.hpp"
#include "symred/lie.hpp"

namespace symred {

int group_dimension(SymmetryGroup g) {
  switch (g) {
    case SymmetryGroup::SO3:
      return 3;
    case SymmetryGroup::S1:
      return 1;
    case SymmetryGroup::Trivial:
      return 0;
  }
  return 0;
}

const char* group_name(SymmetryGroup g) {
  switch (g) {
    case SymmetryGroup::SO3:
      return "SO3";
    case SymmetryGroup::S1:
      return "S1";
    case SymmetryGroup::Trivial:
      return "Trivial";
  }
  return "?";
}

// ---- SeriesMatrix ----

SeriesMatrix::SeriesMatrix(int rows, int cols, int num_vars, int max_degree)
    : rows_(rows), cols_(cols), num_vars_(num_vars), max_degree_(max_degree),
      entries_(static_cast<std::size_t>(rows * cols), Series(num_vars, max_degree)) {}

SeriesMatrix SeriesMatrix::identity(int n, int num_vars, int max_degree) {
  SeriesMatrix m(n, n, num_vars, max_degree);
  for (int i = 0; i < n; ++i) m(i, i) = Series::constant(num_vars, max_degree, 1.0);
  return m;
}

SeriesMatrix SeriesMatrix::from_constant(const Eigen::MatrixXd& c, int num_vars, int max_degree) {
  SeriesMatrix m(static_cast<int>(c.rows()), static_cast<int>(c.cols()), num_vars, max_degree);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = Series::constant(num_vars, max_degree, c(i, j));
  return m;
}

Eigen::MatrixXd SeriesMatrix::constant_part() const {
  Eigen::MatrixXd c(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) c(i, j) = (*this)(i, j).constant_term();
  return c;
}

Eigen::MatrixXd SeriesMatrix::evaluate(std::span<const double> z) const {
  Eigen::MatrixXd c(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) c(i, j) = (*this)(i, j).evaluate(z);
  return c;
}

SeriesMatrix SeriesMatrix::transpose() const {
  SeriesMatrix t(cols_, rows_, num_vars_, max_degree_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

SeriesMatrix SeriesMatrix::truncated(int d) const {
  SeriesMatrix t(rows_, cols_, num_vars_, d);
  for (std::size_t k = 0; k < entries_.size(); ++k) t.entries_[k] = entries_[k].truncated(d);
  return t;
}

SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionMismatch("series matrix product: inner dimensions differ");
  const int deg = std::min(a.max_degree_, b.max_degree_);
  SeriesMatrix c(a.rows_, b.cols_, a.num_vars_, deg);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < b.cols_; ++j) {
      Series s(a.num_vars_, deg);
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).empty() || b(k, j).empty()) continue;
        s += a(i, k) * b(k, j);
      }
      c(i, j) = std::move(s);
    }
  }
  return c;
}

SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("series matrix sum: shapes differ");
  SeriesMatrix c = a;
  for (std::size_t k = 0; k < c.entries_.size(); ++k) c.entries_[k] += b.entries_[k];
  return c;
}

SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("series matrix difference: shapes differ");
  SeriesMatrix c = a;
  for (std::size_t k = 0; k < c.entries_.size(); ++k) c.entries_[k] -= b.entries_[k];
  return c;
}

SeriesMatrix inverse(const SeriesMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of a non-square series matrix");
  const int n = m.rows();
  const int nv = m.num_vars();
  const int deg = m.max_degree();
  if (n == 0) return m;

  const Eigen::MatrixXd m0 = m.constant_part();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m0, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!(sv(n - 1) > 1e-12 * std::max(1.0, sv(0)))) {
    const Eigen::VectorXd dir = svd.matrixV().col(n - 1);
    throw SingularShape("matrix jet is singular at the expansion point (smallest singular value " +
                            std::to_string(sv(n - 1)) + ")",
                        std::vector<double>(dir.data(), dir.data() + n));
  }
  const Eigen::MatrixXd m0inv = m0.inverse();

  // P = -M0^-1 N has no constant term, so P^k starts at degree k.
  SeriesMatrix p = SeriesMatrix::from_constant(-m0inv, nv, deg) * m;
  for (int i = 0; i < n; ++i) p(i, i) += Series::constant(nv, deg, 1.0);

  SeriesMatrix term = SeriesMatrix::from_constant(m0inv, nv, deg);
  SeriesMatrix sum = term;
  for (int k = 1; k <= deg; ++k) {
    term = p * term;
    sum = sum + term;
  }
  return sum;
}

// ---- geometry ----

namespace {

// Infinitesimal generators xi_a(r) for the basis of the group's algebra.
std::vector<SeriesVec3> generators(SymmetryGroup g, const SeriesVec3& r) {
  std::vector<SeriesVec3> out;
  if (g == SymmetryGroup::SO3) {
    // e_a x r
    out.push_back({Series(r[0].num_vars(), r[0].max_degree()), -r[2], r[1]});
    out.push_back({r[2], Series(r[0].num_vars(), r[0].max_degree()), -r[0]});
    out.push_back({-r[1], r[0], Series(r[0].num_vars(), r[0].max_degree())});
  } else if (g == SymmetryGroup::S1) {
    out.push_back({-r[1], r[0], Series(r[0].num_vars(), r[0].max_degree())});
  }
  return out;
}

Series dot(const SeriesVec3& a, const SeriesVec3& b) {
  Series s(a[0].num_vars(), std::min(a[0].max_degree(), b[0].max_degree()));
  for (int k = 0; k < 3; ++k) {
    if (a[k].empty() || b[k].empty()) continue;
    s += a[k] * b[k];
  }
  return s;
}

SeriesVec3 truncate(const SeriesVec3& v, int d) { return {v[0].truncated(d), v[1].truncated(d), v[2].truncated(d)}; }

SeriesVec3 derivative(const SeriesVec3& v, int var) {
  return {v[0].derivative(var), v[1].derivative(var), v[2].derivative(var)};
}

std::vector<int> identity_vars(int f) {
  std::vector<int> v(static_cast<std::size_t>(f));
  for (int i = 0; i < f; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

ReducedGeometry reduced_geometry(const MechanicalSystem& sys, std::span<const double> q0, int num_vars,
                                 std::span<const int> shape_vars, int degree) {
  const int f = sys.shape_dim();
  if (static_cast<int>(q0.size()) != f || static_cast<int>(shape_vars.size()) != f) {
    throw DimensionMismatch("shape point has " + std::to_string(q0.size()) + " entries, system expects " +
                            std::to_string(f));
  }
  if (sys.check_shape) sys.check_shape(q0);

  // One extra degree so that the velocity jets dr/dq are exact to `degree`.
  std::vector<Series> shape;
  shape.reserve(static_cast<std::size_t>(f));
  for (int a = 0; a < f; ++a) {
    shape.push_back(Series::variable(num_vars, degree + 1, shape_vars[static_cast<std::size_t>(a)], q0[static_cast<std::size_t>(a)]));
  }
  const std::vector<SeriesVec3> pos_hi = sys.embedding(shape);
  if (pos_hi.size() != sys.masses.size()) throw DimensionMismatch("embedding and mass list disagree in length");

  const int g = group_dimension(sys.group);
  const std::size_t npart = pos_hi.size();

  std::vector<SeriesVec3> pos(npart);
  std::vector<std::vector<SeriesVec3>> vel(npart);  // vel[i][alpha] = dr_i/dq_alpha
  std::vector<std::vector<SeriesVec3>> gen(npart);
  for (std::size_t i = 0; i < npart; ++i) {
    pos[i] = truncate(pos_hi[i], degree);
    for (int a = 0; a < f; ++a) vel[i].push_back(derivative(pos_hi[i], shape_vars[static_cast<std::size_t>(a)]));
    gen[i] = generators(sys.group, pos[i]);
  }

  ReducedGeometry geo;
  geo.inertia = SeriesMatrix(g, g, num_vars, degree);
  geo.coupling = SeriesMatrix(f, g, num_vars, degree);
  geo.shape_metric = SeriesMatrix(f, f, num_vars, degree);
  for (std::size_t i = 0; i < npart; ++i) {
    const double m = sys.masses[i];
    for (int a = 0; a < g; ++a) {
      for (int b = a; b < g; ++b) {
        geo.inertia(a, b) += m * dot(gen[i][static_cast<std::size_t>(a)], gen[i][static_cast<std::size_t>(b)]);
      }
      for (int al = 0; al < f; ++al) {
        geo.coupling(al, a) += m * dot(gen[i][static_cast<std::size_t>(a)], vel[i][static_cast<std::size_t>(al)]);
      }
    }
    for (int al = 0; al < f; ++al) {
      for (int be = al; be < f; ++be) {
        geo.shape_metric(al, be) += m * dot(vel[i][static_cast<std::size_t>(al)], vel[i][static_cast<std::size_t>(be)]);
      }
    }
  }
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < a; ++b) geo.inertia(a, b) = geo.inertia(b, a);
  for (int al = 0; al < f; ++al)
    for (int be = 0; be < al; ++be) geo.shape_metric(al, be) = geo.shape_metric(be, al);

  geo.inertia_inverse = inverse(geo.inertia);
  geo.connection = geo.coupling * geo.inertia_inverse;
  geo.horizontal_metric = geo.shape_metric - geo.connection * geo.coupling.transpose();
  // Symmetrize the rounding noise away.
  for (int al = 0; al < f; ++al)
    for (int be = 0; be < al; ++be) geo.horizontal_metric(al, be) = geo.horizontal_metric(be, al);

  std::vector<Series> shape_lo;
  for (const auto& s : shape) shape_lo.push_back(s.truncated(degree));
  geo.potential = sys.potential(shape_lo).truncated(degree);
  return geo;
}

SeriesMatrix locked_inertia(const MechanicalSystem& sys, std::span<const double> q0, int degree) {
  const auto vars = identity_vars(sys.shape_dim());
  return reduced_geometry(sys, q0, sys.shape_dim(), vars, degree).inertia;
}

SeriesMatrix mechanical_connection(const MechanicalSystem& sys, std::span<const double> q0, int degree) {
  const auto vars = identity_vars(sys.shape_dim());
  return reduced_geometry(sys, q0, sys.shape_dim(), vars, degree).connection;
}

SeriesMatrix horizontal_metric(const MechanicalSystem& sys, std::span<const double> q0, int degree) {
  const auto vars = identity_vars(sys.shape_dim());
  return reduced_geometry(sys, q0, sys.shape_dim(), vars, degree).horizontal_metric;
}

// ---- charts ----

ReducedChart ReducedChart::deprit(const std::vector<std::string>& shape_names, double r) {
  ReducedChart c;
  c.group = SymmetryGroup::SO3;
  c.momentum = r;
  const int n = static_cast<int>(shape_names.size());
  const int f = n + 1;
  c.names.push_back("u");
  for (const auto& s : shape_names) c.names.push_back(s);
  c.names.push_back("v");
  for (const auto& s : shape_names) c.names.push_back("p_" + s);
  c.orbit_u = 0;
  c.orbit_v = f;
  for (int a = 0; a < n; ++a) {
    c.shape_q.push_back(1 + a);
    c.shape_p.push_back(f + 1 + a);
  }
  return c;
}

ReducedChart ReducedChart::cotangent(const std::vector<std::string>& shape_names, SymmetryGroup group,
                                     double momentum) {
  ReducedChart c;
  c.group = group;
  c.momentum = momentum;
  const int n = static_cast<int>(shape_names.size());
  for (const auto& s : shape_names) c.names.push_back(s);
  for (const auto& s : shape_names) c.names.push_back("p_" + s);
  for (int a = 0; a < n; ++a) {
    c.shape_q.push_back(a);
    c.shape_p.push_back(n + a);
  }
  return c;
}

ReducedChart ReducedChart::for_system(const MechanicalSystem& sys, double momentum) {
  if (sys.group == SymmetryGroup::SO3) return deprit(sys.shape_names, momentum);
  return cotangent(sys.shape_names, sys.group, momentum);
}

// ---- reduced Hamiltonian ----

ReducedHamiltonian::ReducedHamiltonian(MechanicalSystem sys, ReducedChart chart)
    : sys_(std::move(sys)), chart_(std::move(chart)) {
  if (chart_.group != sys_.group) throw DimensionMismatch("chart and system use different symmetry groups");
  if (static_cast<int>(chart_.shape_q.size()) != sys_.shape_dim()) {
    throw DimensionMismatch("chart shape dimension does not match the system");
  }
}

std::vector<Series> ReducedHamiltonian::momentum_jets(std::span<const Series> vars) const {
  const int nv = chart_.num_vars();
  const int deg = vars.empty() ? 0 : vars[0].max_degree();
  switch (chart_.group) {
    case SymmetryGroup::SO3: {
      auto j = deprit_chart(vars[static_cast<std::size_t>(chart_.orbit_u)],
                            vars[static_cast<std::size_t>(chart_.orbit_v)], chart_.momentum);
      return {j[0], j[1], j[2]};
    }
    case SymmetryGroup::S1:
      return {Series::constant(nv, deg, chart_.momentum)};
    case SymmetryGroup::Trivial:
      return {};
  }
  return {};
}

Series ReducedHamiltonian::expand(std::span<const double> z0, int degree) const {
  const int nv = chart_.num_vars();
  if (static_cast<int>(z0.size()) != nv) {
    throw DimensionMismatch("chart point has " + std::to_string(z0.size()) + " entries, expected " +
                            std::to_string(nv));
  }
  std::vector<Series> vars;
  vars.reserve(static_cast<std::size_t>(nv));
  for (int k = 0; k < nv; ++k) vars.push_back(Series::variable(nv, degree, k, z0[static_cast<std::size_t>(k)]));

  const int f = sys_.shape_dim();
  std::vector<double> q0(static_cast<std::size_t>(f));
  for (int a = 0; a < f; ++a) q0[static_cast<std::size_t>(a)] = z0[static_cast<std::size_t>(chart_.shape_q[static_cast<std::size_t>(a)])];

  const std::vector<Series> J = momentum_jets(vars);
  const ReducedGeometry geo = reduced_geometry(sys_, q0, nv, chart_.shape_q, degree);

  const int g = group_dimension(sys_.group);
  Series h = geo.potential;

  // 1/2 J^T I^-1 J
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      if (geo.inertia_inverse(a, b).empty()) continue;
      h += 0.5 * (geo.inertia_inverse(a, b) * (J[static_cast<std::size_t>(a)] * J[static_cast<std::size_t>(b)]));
    }
  }

  // w = p - A J, then 1/2 w^T d^-1 w
  const SeriesMatrix dinv = inverse(geo.horizontal_metric);
  std::vector<Series> w;
  for (int al = 0; al < f; ++al) {
    Series s = vars[static_cast<std::size_t>(chart_.shape_p[static_cast<std::size_t>(al)])];
    for (int a = 0; a < g; ++a) {
      if (geo.connection(al, a).empty()) continue;
      s -= geo.connection(al, a) * J[static_cast<std::size_t>(a)];
    }
    w.push_back(std::move(s));
  }
  for (int al = 0; al < f; ++al) {
    Series row(nv, degree);
    for (int be = 0; be < f; ++be) {
      if (dinv(al, be).empty() || w[static_cast<std::size_t>(be)].empty()) continue;
      row += dinv(al, be) * w[static_cast<std::size_t>(be)];
    }
    if (!row.empty() && !w[static_cast<std::size_t>(al)].empty()) h += 0.5 * (w[static_cast<std::size_t>(al)] * row);
  }
  return h;
}

JetFunction ReducedHamiltonian::jet() const {
  return [self = *this](std::span<const double> z0, int degree) { return self.expand(z0, degree); };
}

double ReducedHamiltonian::value(std::span<const double> z) const { return expand(z, 0).constant_term(); }

Eigen::VectorXd ReducedHamiltonian::gradient(std::span<const double> z) const {
  const Series h = expand(z, 1);
  const int nv = chart_.num_vars();
  Eigen::VectorXd grad(nv);
  for (int k = 0; k < nv; ++k) grad(k) = h.coefficient(MultiIndex::unit(k));
  return grad;
}

Eigen::MatrixXd ReducedHamiltonian::hessian(std::span<const double> z) const {
  const Series h = expand(z, 2);
  const int nv = chart_.num_vars();
  Eigen::MatrixXd H(nv, nv);
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      const MultiIndex m = MultiIndex::unit(i) + MultiIndex::unit(j);
      H(i, j) = (i == j ? 2.0 : 1.0) * h.coefficient(m);
    }
  }
  return H;
}

std::vector<double> ReducedHamiltonian::shape(std::span<const double> z) const {
  std::vector<double> q;
  for (int k : chart_.shape_q) q.push_back(z[static_cast<std::size_t>(k)]);
  return q;
}

std::vector<double> ReducedHamiltonian::shape_momenta(std::span<const double> z) const {
  std::vector<double> p;
  for (int k : chart_.shape_p) p.push_back(z[static_cast<std::size_t>(k)]);
  return p;
}

Eigen::VectorXd ReducedHamiltonian::body_momentum(std::span<const double> z) const {
  switch (chart_.group) {
    case SymmetryGroup::SO3:
      return deprit_chart(z[static_cast<std::size_t>(chart_.orbit_u)], z[static_cast<std::size_t>(chart_.orbit_v)],
                          chart_.momentum);
    case SymmetryGroup::S1:
      return Eigen::VectorXd::Constant(1, chart_.momentum);
    case SymmetryGroup::Trivial:
      break;
  }
  return Eigen::VectorXd(0);
}

Eigen::MatrixXd ReducedHamiltonian::inertia(std::span<const double> z) const {
  const auto q = shape(z);
  const auto vars = identity_vars(sys_.shape_dim());
  return reduced_geometry(sys_, q, sys_.shape_dim(), vars, 0).inertia.constant_part();
}

Eigen::MatrixXd ReducedHamiltonian::connection(std::span<const double> z) const {
  const auto q = shape(z);
  const auto vars = identity_vars(sys_.shape_dim());
  return reduced_geometry(sys_, q, sys_.shape_dim(), vars, 0).connection.constant_part();
}

Eigen::MatrixXd symplectic_unit(int f) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * f, 2 * f);
  j.topRightCorner(f, f) = Eigen::MatrixXd::Identity(f, f);
  j.bottomLeftCorner(f, f) = -Eigen::MatrixXd::Identity(f, f);
  return j;
}

}  // namespace symred
