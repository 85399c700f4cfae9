#pragma once

#include <Eigen/Dense>

#include "sfl/error.hpp"

namespace sfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thin SVD a = u * diag(s) * vt with s sorted in decreasing order,
// u (rows x k), vt (k x cols), k = min(rows, cols).
struct SvdResult {
  Matrix u;
  Vector s;
  Matrix vt;
};

void require_finite(const Matrix& a, const char* what);

SvdResult svd(const Matrix& a);

// Values-only decomposition, decreasing order.
Vector singular_values(const Matrix& a);

// Smallest of the min(rows, cols) singular values; the tall/square convention
// rows >= cols is required so "smallest" always means the n-th value.
double smallest_singular_value(const Matrix& a);

double operator_norm(const Matrix& a);
double hs_norm(const Matrix& a);

// Threshold below which singular values count as zero for rank purposes.
double rank_threshold(Index rows, Index cols, double s1);
Index numerical_rank(const Matrix& a);

// Linear subspace of R^ambient held as an orthonormal basis (ambient x dim).
// dim = 0 is the zero subspace and is a valid value.
class Subspace {
 public:
  Subspace(Index ambient, Matrix basis);

  static Subspace zero(Index ambient);
  // Orthonormalizes the columns of `vectors`; rank deficiency reduces dim.
  static Subspace span_of(const Matrix& vectors);

  Index ambient() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

 private:
  Index ambient_;
  Matrix basis_;
};

double dist_to_subspace(const Vector& x, const Subspace& h);
Subspace orthonormal_complement(const Subspace& h);

}  // namespace sfl
