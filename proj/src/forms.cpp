#include "wander/forms.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "wander/errors.hpp"

namespace wander::forms {
namespace {

struct SubsetTables {
  // masks[d][k] lists the k-subsets of {0..d-1} in colex order.
  std::array<std::array<std::vector<Mask>, max_dim + 1>, max_dim + 1> masks;
  // rank_of[m] is the colex rank of m among subsets of equal size (independent of d).
  std::array<std::uint32_t, 1u << max_dim> rank_of{};

  SubsetTables() {
    std::array<std::uint32_t, max_dim + 1> next{};
    for (Mask m = 0; m < (1u << max_dim); ++m) {
      const int k = std::popcount(m);
      rank_of[m] = next[k]++;
    }
    for (int d = 0; d <= max_dim; ++d) {
      for (Mask m = 0; m < (1u << d); ++m) masks[d][std::popcount(m)].push_back(m);
    }
  }
};

const SubsetTables& tables() {
  static const SubsetTables t;
  return t;
}

std::size_t binomial(int n, int k) { return tables().masks[n][k].size(); }

void check_dim(int dim) {
  require(dim >= 1 && dim <= max_dim, ErrorKind::precondition,
          "form dimension must lie in [1, " + std::to_string(max_dim) + "], got " + std::to_string(dim));
}

void check_same_dim(const KForm& a, const KForm& b) {
  require(a.dim() == b.dim(), ErrorKind::dimension_mismatch,
          "forms live on R^" + std::to_string(a.dim()) + " and R^" + std::to_string(b.dim()));
}

// Number of elements of `set` strictly below bit i.
int count_below(Mask set, int i) { return std::popcount(set & ((Mask{1} << i) - 1)); }

double small_det(Matrix& m) {
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default:
      return m.partialPivLu().determinant();
  }
}

}  // namespace

KForm::KForm(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dim(dim);
  require(degree >= 0 && degree <= dim, ErrorKind::precondition,
          "form degree " + std::to_string(degree) + " outside [0, " + std::to_string(dim) + "]");
  coeffs_.assign(binomial(dim, degree), 0.0);
}

KForm KForm::basis(int dim, std::initializer_list<int> indices) {
  return basis(dim, std::span<const int>(indices.begin(), indices.size()));
}

KForm KForm::basis(int dim, std::span<const int> indices) {
  KForm out(dim, static_cast<int>(indices.size()));
  Mask mask = 0;
  int sign = 1;
  for (int i : indices) {
    require(i >= 0 && i < dim, ErrorKind::precondition, "basis index out of range");
    require(!(mask & (Mask{1} << i)), ErrorKind::precondition, "repeated basis index");
    // moving i past the already placed larger indices
    if (std::popcount(mask >> i) % 2 == 1) sign = -sign;
    mask |= Mask{1} << i;
  }
  out.coeffs_[out.rank(mask)] = sign;
  return out;
}

KForm KForm::scalar(int dim, double value) {
  KForm out(dim, 0);
  out.coeffs_[0] = value;
  return out;
}

KForm KForm::one_form(const Vector& coeffs) {
  const int d = static_cast<int>(coeffs.size());
  KForm out(d, 1);
  for (int i = 0; i < d; ++i) out.coeffs_[i] = coeffs[i];
  return out;
}

KForm KForm::volume(int dim) {
  KForm out(dim, dim);
  out.coeffs_[0] = 1.0;
  return out;
}

Mask KForm::mask(std::size_t rank) const { return tables().masks[dim_][degree_][rank]; }

std::size_t KForm::rank(Mask mask) const { return tables().rank_of[mask]; }

double KForm::coefficient(std::initializer_list<int> increasing) const {
  return coefficient(std::span<const int>(increasing.begin(), increasing.size()));
}

double KForm::coefficient(std::span<const int> increasing) const {
  require(static_cast<int>(increasing.size()) == degree_, ErrorKind::precondition, "index tuple length != degree");
  Mask m = 0;
  int last = -1;
  for (int i : increasing) {
    require(i > last && i < dim_, ErrorKind::precondition, "index tuple must be strictly increasing and in range");
    m |= Mask{1} << i;
    last = i;
  }
  return coeffs_[rank(m)];
}

double KForm::evaluate(std::span<const Vector> vectors) const {
  require(static_cast<int>(vectors.size()) == degree_, ErrorKind::precondition, "need exactly k argument vectors");
  for (const auto& v : vectors) {
    require(v.size() == dim_, ErrorKind::dimension_mismatch, "argument vector has wrong length");
  }
  if (degree_ == 0) return coeffs_[0];
  double total = 0.0;
  Matrix minor(degree_, degree_);
  const auto& masks = tables().masks[dim_][degree_];
  for (std::size_t r = 0; r < masks.size(); ++r) {
    if (coeffs_[r] == 0.0) continue;
    int row = 0;
    for (int i = 0; i < dim_; ++i) {
      if (!(masks[r] & (Mask{1} << i))) continue;
      for (int col = 0; col < degree_; ++col) minor(row, col) = vectors[col][i];
      ++row;
    }
    total += coeffs_[r] * small_det(minor);
  }
  return total;
}

double KForm::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

KForm& KForm::operator+=(const KForm& other) {
  check_same_dim(*this, other);
  require(degree_ == other.degree_, ErrorKind::dimension_mismatch, "adding forms of different degree");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

KForm& KForm::operator-=(const KForm& other) {
  check_same_dim(*this, other);
  require(degree_ == other.degree_, ErrorKind::dimension_mismatch, "subtracting forms of different degree");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

KForm& KForm::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

int shuffle_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (Mask rest = a; rest; rest &= rest - 1) inversions += count_below(b, std::countr_zero(rest));
  return inversions % 2 ? -1 : 1;
}

KForm wedge(const KForm& a, const KForm& b) {
  check_same_dim(a, b);
  require(a.degree() + b.degree() <= a.dim(), ErrorKind::precondition,
          "wedge degree " + std::to_string(a.degree() + b.degree()) + " exceeds dimension");
  KForm out(a.dim(), a.degree() + b.degree());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const Mask ma = a.mask(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Mask mb = b.mask(j);
      const int sign = shuffle_sign(ma, mb);
      if (sign == 0 || b[j] == 0.0) continue;
      out[out.rank(ma | mb)] += sign * a[i] * b[j];
    }
  }
  return out;
}

KForm wedge_power(const KForm& a, int k) {
  require(k >= 0, ErrorKind::precondition, "negative wedge power");
  KForm out = KForm::scalar(a.dim(), 1.0);
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

KForm interior_product(const Vector& v, const KForm& a) {
  require(v.size() == a.dim(), ErrorKind::dimension_mismatch, "vector and form dimensions differ");
  require(a.degree() >= 1, ErrorKind::precondition, "interior product of a 0-form");
  KForm out(a.dim(), a.degree() - 1);
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r] == 0.0) continue;
    const Mask m = a.mask(r);
    for (Mask rest = m; rest; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      const double sign = count_below(m, i) % 2 ? -1.0 : 1.0;
      out[out.rank(m & ~(Mask{1} << i))] += sign * v[i] * a[r];
    }
  }
  return out;
}

MetricTensor::MetricTensor(Matrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), ErrorKind::precondition, "metric must be square");
  check_dim(static_cast<int>(entries_.rows()));
  require((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::precondition,
          "metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(entries_, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > 0.0, ErrorKind::precondition, "metric is not positive definite");
  inverse_ = entries_.inverse();
  sqrt_det_ = std::sqrt(eig.eigenvalues().prod());
}

MetricTensor MetricTensor::euclidean(int dim) {
  check_dim(dim);
  return MetricTensor(Matrix::Identity(dim, dim));
}

ComplexStructureOp::ComplexStructureOp(Matrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), ErrorKind::precondition, "complex structure must be square");
  require(entries_.rows() % 2 == 0, ErrorKind::precondition, "complex structure needs even dimension");
  const Matrix sq = entries_ * entries_ + Matrix::Identity(entries_.rows(), entries_.cols());
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  require(sq.cwiseAbs().maxCoeff() <= 1e-12 * scale * scale * static_cast<double>(entries_.rows()),
          ErrorKind::incompatible_structure, "J^2 != -1");
}

ComplexStructureOp ComplexStructureOp::standard(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(i, n + i) = -1.0;  // Q-component of J(Q,P) is -P
    j(n + i, i) = 1.0;   // P-component is Q
  }
  return ComplexStructureOp(std::move(j));
}

void require_compatible(const MetricTensor& g, const ComplexStructureOp& J) {
  require(g.dim() == J.dim(), ErrorKind::dimension_mismatch, "metric and complex structure dimensions differ");
  const Matrix& G = g.matrix();
  const Matrix& A = J.matrix();
  const Matrix pulled = A.transpose() * G * A;
  double scale = G.cwiseAbs().maxCoeff();
  require((pulled - G).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, scale), ErrorKind::incompatible_structure,
          "g(JX, JY) != g(X, Y)");
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 8; ++trial) {
    Vector x(g.dim()), y(g.dim());
    for (int i = 0; i < g.dim(); ++i) {
      x[i] = normal(rng);
      y[i] = normal(rng);
    }
    const double lhs = g.inner(J.apply(x), J.apply(y));
    const double rhs = g.inner(x, y);
    require(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::sqrt(g.norm2(x) * g.norm2(y))),
            ErrorKind::incompatible_structure, "g(JX, JY) != g(X, Y) on a random pair");
  }
}

double inner_product(const KForm& a, const KForm& b, const MetricTensor& g) {
  check_same_dim(a, b);
  require(a.degree() == b.degree(), ErrorKind::dimension_mismatch, "inner product of forms of different degree");
  require(g.dim() == a.dim(), ErrorKind::dimension_mismatch, "metric dimension differs from form dimension");
  const int k = a.degree();
  if (k == 0) return a[0] * b[0];
  const Matrix& ginv = g.inverse();
  Matrix minor(k, k);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const Mask mi = a.mask(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0.0) continue;
      const Mask mj = b.mask(j);
      int r = 0;
      for (Mask ri = mi; ri; ri &= ri - 1, ++r) {
        int c = 0;
        for (Mask cj = mj; cj; cj &= cj - 1, ++c) minor(r, c) = ginv(std::countr_zero(ri), std::countr_zero(cj));
      }
      total += a[i] * b[j] * small_det(minor);
    }
  }
  return total;
}

int orientation_sign(int n) { return (n / 2) % 2 ? -1 : 1; }

KForm hodge_star(const KForm& a, const MetricTensor& g, Orientation orientation) {
  require(g.dim() == a.dim(), ErrorKind::dimension_mismatch, "metric dimension differs from form dimension");
  const int d = a.dim();
  const int k = a.degree();
  double vol = g.sqrt_det();
  if (orientation == Orientation::symplectic) {
    require(d % 2 == 0, ErrorKind::precondition, "symplectic orientation needs even dimension");
    vol *= orientation_sign(d / 2);
  }
  const Mask full = (Mask{1} << d) - 1;
  KForm out(d, d - k);
  // (*a)_{I^c} = sign(I, I^c) vol <dx^I, a>
  for (std::size_t r = 0; r < a.size(); ++r) {
    const Mask m = a.mask(r);
    const KForm e = KForm::basis(d, [&] {
      std::vector<int> idx;
      for (Mask rest = m; rest; rest &= rest - 1) idx.push_back(std::countr_zero(rest));
      return idx;
    }());
    const double projected = inner_product(e, a, g);
    if (projected == 0.0) continue;
    out[out.rank(full & ~m)] += shuffle_sign(m, full & ~m) * vol * projected;
  }
  return out;
}

KForm symplectic_form(int n) {
  require(n >= 1 && 2 * n <= max_dim, ErrorKind::precondition, "symplectic form needs 1 <= n <= 4");
  KForm omega(2 * n, 2);
  for (int i = 0; i < n; ++i) omega += KForm::basis(2 * n, {i, n + i});
  return omega;
}

KForm symplectic_power(int n, int k) {
  require(k >= 0 && k <= n, ErrorKind::precondition, "symplectic power out of range");
  KForm out = wedge_power(symplectic_form(n), k);
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  return out * (1.0 / factorial);
}

KForm kaehler_form(const MetricTensor& g, const ComplexStructureOp& J) {
  require(g.dim() == J.dim(), ErrorKind::dimension_mismatch, "metric and complex structure dimensions differ");
  const int d = g.dim();
  // omega(e_i, e_j) = (J^T G)_{ij}
  const Matrix w = J.matrix().transpose() * g.matrix();
  KForm omega(d, 2);
  for (std::size_t r = 0; r < omega.size(); ++r) {
    const Mask m = omega.mask(r);
    const int i = std::countr_zero(m);
    const int j = std::countr_zero(m & (m - 1));
    omega[r] = w(i, j);
  }
  return omega;
}

}  // namespace wander::forms
