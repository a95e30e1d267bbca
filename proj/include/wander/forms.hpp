#pragma once

// Exterior algebra on a metric vector space R^d, d <= 8.
//
// A k-form is stored densely: one coefficient per k-subset of {0,..,d-1},
// ordered by colex rank (equivalently by the integer value of the subset's
// bitmask). Coefficients are normalized so that dx^I evaluated on the
// coordinate vectors e_I gives 1.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wander {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace forms {

inline constexpr int max_dim = 8;

using Mask = std::uint32_t;

class KForm {
 public:
  KForm(int dim, int degree);

  /// dx^{i_1} ^ ... ^ dx^{i_k}; indices need not be sorted (the permutation sign is applied).
  static KForm basis(int dim, std::initializer_list<int> indices);
  static KForm basis(int dim, std::span<const int> indices);
  static KForm scalar(int dim, double value);
  static KForm one_form(const Vector& coeffs);
  /// dx^0 ^ ... ^ dx^{d-1}
  static KForm volume(int dim);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }

  double operator[](std::size_t rank) const { return coeffs_[rank]; }
  double& operator[](std::size_t rank) { return coeffs_[rank]; }
  Mask mask(std::size_t rank) const;
  std::size_t rank(Mask mask) const;

  /// Coefficient of the strictly increasing index tuple.
  double coefficient(std::span<const int> increasing) const;
  double coefficient(std::initializer_list<int> increasing) const;

  /// a(v_1, ..., v_k); requires exactly k vectors of length d.
  double evaluate(std::span<const Vector> vectors) const;

  double max_abs() const;

  KForm& operator+=(const KForm& other);
  KForm& operator-=(const KForm& other);
  KForm& operator*=(double s);

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(double s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, double s) { return a *= s; }

 private:
  int dim_;
  int degree_;
  std::vector<double> coeffs_;
};

/// Sign of dx^I ^ dx^J relative to dx^{I u J}; 0 when I and J overlap.
int shuffle_sign(Mask a, Mask b);

KForm wedge(const KForm& a, const KForm& b);

/// a ^ a ^ ... (k factors); k = 0 gives the constant 1.
KForm wedge_power(const KForm& a, int k);

/// Contraction in the first slot.
KForm interior_product(const Vector& v, const KForm& a);

class MetricTensor {
 public:
  explicit MetricTensor(Matrix entries);
  static MetricTensor euclidean(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  const Matrix& inverse() const { return inverse_; }
  double sqrt_det() const { return sqrt_det_; }

  double inner(const Vector& a, const Vector& b) const { return a.dot(entries_ * b); }
  double norm2(const Vector& a) const { return inner(a, a); }

 private:
  Matrix entries_;
  Matrix inverse_;
  double sqrt_det_;
};

/// Linear map J with J^2 = -1.
class ComplexStructureOp {
 public:
  explicit ComplexStructureOp(Matrix entries);
  /// J(Q, P) = (-P, Q) in the (q, p) splitting of R^{2n}.
  static ComplexStructureOp standard(int n);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Vector apply(const Vector& v) const { return entries_ * v; }

 private:
  Matrix entries_;
};

/// Throws incompatible_structure unless g(JX, JY) = g(X, Y) (checked on the
/// basis and on a fixed set of pseudo-random vectors, tolerance 1e-10).
void require_compatible(const MetricTensor& g, const ComplexStructureOp& J);

/// Which top form the Hodge star is normalized against.
enum class Orientation {
  coordinate,  // +sqrt(det g) dx^0 ^ ... ^ dx^{d-1}
  symplectic,  // omega^n / n!, i.e. s times the coordinate one, s = (-1)^{floor(n/2)}
};

/// Induced inner product on k-forms: <dx^I, dx^J> = det((g^{-1})_{IJ}).
double inner_product(const KForm& a, const KForm& b, const MetricTensor& g);

/// Defined by phi ^ *psi = <phi, psi> vol for every phi of the same degree.
KForm hodge_star(const KForm& a, const MetricTensor& g, Orientation orientation = Orientation::coordinate);

/// s = (-1)^{floor(n/2)}, the sign relating omega^n/n! to dq_1..dq_n dp_1..dp_n.
int orientation_sign(int n);

/// omega = sum_i dq_i ^ dp_i on R^{2n} with coordinates (q_1..q_n, p_1..p_n).
KForm symplectic_form(int n);

/// omega^{^k} / k!
KForm symplectic_power(int n, int k);

/// The 2-form omega(X, Y) = g(JX, Y).
KForm kaehler_form(const MetricTensor& g, const ComplexStructureOp& J);

}  // namespace forms
}  // namespace wander
