#pragma once

// Reduction of simple mechanical systems.
//
// A system is given by point masses whose body-frame positions r_i(q) depend on
// shape coordinates q only, plus an invariant potential V(q). From the
// embedding we build, as jets around a shape point, the locked inertia tensor
// I, the mechanical connection A = I^-1 L, the horizontal metric
// d = h - A^T I A, and finally the reduced Hamiltonian
//
//   h = 1/2 J^T I^-1 J + 1/2 (p - A J)^T d^-1 (p - A J) + V
//
// in a canonical chart on the reduced space.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symred/series.hpp"

namespace symred {

enum class SymmetryGroup { SO3, S1, Trivial };

// Dimension of the group's Lie algebra.
int group_dimension(SymmetryGroup g);
const char* group_name(SymmetryGroup g);

// Dense matrix whose entries are series in a common variable space.
class SeriesMatrix {
 public:
  SeriesMatrix() = default;
  SeriesMatrix(int rows, int cols, int num_vars, int max_degree);

  static SeriesMatrix identity(int n, int num_vars, int max_degree);
  static SeriesMatrix from_constant(const Eigen::MatrixXd& m, int num_vars, int max_degree);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const { return num_vars_; }
  int max_degree() const { return max_degree_; }

  Series& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r * cols_ + c)]; }
  const Series& operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r * cols_ + c)]; }

  Eigen::MatrixXd constant_part() const;
  Eigen::MatrixXd evaluate(std::span<const double> z) const;
  SeriesMatrix transpose() const;
  SeriesMatrix truncated(int d) const;

  friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b);
  friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b);
  friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  int num_vars_ = 0;
  int max_degree_ = 0;
  std::vector<Series> entries_;
};

// Neumann series around the constant part, exact to the truncation degree:
// (M0 + N)^-1 = sum_k (-M0^-1 N)^k M0^-1.
// Throws SingularShape with the null direction when M0 is singular.
SeriesMatrix inverse(const SeriesMatrix& m);

using SeriesVec3 = std::array<Series, 3>;

struct MechanicalSystem {
  std::string name;
  SymmetryGroup group = SymmetryGroup::Trivial;
  std::vector<std::string> shape_names;
  // Mass attached to each embedded point.
  std::vector<double> masses;
  // Body-frame positions r_i(q); must accept series arguments of any degree.
  std::function<std::vector<SeriesVec3>(std::span<const Series> shape)> embedding;
  std::function<Series(std::span<const Series> shape)> potential;
  // Throws SingularShape when q is outside the admissible region. Optional.
  std::function<void(std::span<const double> shape)> check_shape;

  int shape_dim() const { return static_cast<int>(shape_names.size()); }
};

struct ReducedGeometry {
  SeriesMatrix inertia;            // g x g, locked inertia I
  SeriesMatrix inertia_inverse;    // g x g
  SeriesMatrix coupling;           // f x g, row alpha = L(dr/dq_alpha)
  SeriesMatrix connection;         // f x g, row alpha = A_alpha = I^-1 L_alpha
  SeriesMatrix shape_metric;       // f x f, h_ab = sum m_i dr_i/dq_a . dr_i/dq_b
  SeriesMatrix horizontal_metric;  // f x f, d = h - A I A^T
  Series potential;
};

// Geometry jets around the shape point q0. The shape coordinate alpha is
// q0[alpha] + z_{shape_vars[alpha]} in a num_vars-variable space. All jets are
// exact to `degree`.
ReducedGeometry reduced_geometry(const MechanicalSystem& sys, std::span<const double> q0, int num_vars,
                                 std::span<const int> shape_vars, int degree);

// The same jets in the f_shape shape variables alone.
SeriesMatrix locked_inertia(const MechanicalSystem& sys, std::span<const double> q0, int degree);
SeriesMatrix mechanical_connection(const MechanicalSystem& sys, std::span<const double> q0, int degree);
SeriesMatrix horizontal_metric(const MechanicalSystem& sys, std::span<const double> q0, int degree);

// Names and ordering of the canonical variables on the reduced space plus the
// fixed momentum parameter. For SO(3) the orbit coordinates (u, v) come first:
// (u, q_1..q_n, v, p_1..p_n). For S^1 and trivial groups the chart is plain
// (q, p) and J is a parameter.
struct ReducedChart {
  SymmetryGroup group = SymmetryGroup::Trivial;
  double momentum = 0.0;  // |J| for SO(3), J for S^1
  std::vector<std::string> names;
  std::vector<int> shape_q;
  std::vector<int> shape_p;
  int orbit_u = -1;
  int orbit_v = -1;

  int dof() const { return static_cast<int>(names.size()) / 2; }
  int num_vars() const { return static_cast<int>(names.size()); }

  static ReducedChart deprit(const std::vector<std::string>& shape_names, double r);
  static ReducedChart cotangent(const std::vector<std::string>& shape_names, SymmetryGroup group, double momentum);
  // Deprit chart for SO(3), cotangent chart otherwise.
  static ReducedChart for_system(const MechanicalSystem& sys, double momentum);
};

class ReducedHamiltonian {
 public:
  ReducedHamiltonian(MechanicalSystem sys, ReducedChart chart);

  const MechanicalSystem& system() const { return sys_; }
  const ReducedChart& chart() const { return chart_; }
  int dof() const { return chart_.dof(); }

  // Degree-`degree` Taylor expansion at z0, in displacement variables.
  // Throws ChartSingularity or SingularShape at inadmissible points.
  Series expand(std::span<const double> z0, int degree) const;
  JetFunction jet() const;

  double value(std::span<const double> z) const;
  Eigen::VectorXd gradient(std::span<const double> z) const;
  Eigen::MatrixXd hessian(std::span<const double> z) const;

  std::vector<double> shape(std::span<const double> z) const;
  std::vector<double> shape_momenta(std::span<const double> z) const;
  // Body momentum J in g^* (3 entries for SO(3), 1 for S^1, none otherwise).
  Eigen::VectorXd body_momentum(std::span<const double> z) const;
  // Numerical I(q) and A(q) at the chart point.
  Eigen::MatrixXd inertia(std::span<const double> z) const;
  Eigen::MatrixXd connection(std::span<const double> z) const;

 private:
  std::vector<Series> momentum_jets(std::span<const Series> vars) const;

  MechanicalSystem sys_;
  ReducedChart chart_;
};

// The standard symplectic matrix [[0, Id], [-Id, 0]] of size 2f.
Eigen::MatrixXd symplectic_unit(int f);

}  // namespace symred
