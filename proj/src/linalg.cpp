#include "sfl/linalg.hpp"

#include <limits>
#include <string>

namespace sfl {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": matrix has NaN or Inf entries");
  }
}

SvdResult svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("svd: empty matrix");
  }
  require_finite(a, "svd");
  SvdResult out;
  // Jacobi is more accurate on small blocks; BDC scales to the big ones.
  if (a.rows() <= 32 && a.cols() <= 32) {
    Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = dec.matrixU();
    out.s = dec.singularValues();
    out.vt = dec.matrixV().transpose();
  } else {
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = dec.matrixU();
    out.s = dec.singularValues();
    out.vt = dec.matrixV().transpose();
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("singular_values: empty matrix");
  }
  require_finite(a, "singular_values");
  if (a.rows() <= 32 && a.cols() <= 32) {
    Eigen::JacobiSVD<Matrix> dec(a);
    return dec.singularValues();
  }
  Eigen::BDCSVD<Matrix> dec(a);
  return dec.singularValues();
}

double smallest_singular_value(const Matrix& a) {
  if (a.rows() < a.cols()) {
    throw std::invalid_argument(
        "smallest_singular_value: requires rows >= cols");
  }
  Vector s = singular_values(a);
  return s(s.size() - 1);
}

double operator_norm(const Matrix& a) { return singular_values(a)(0); }

double hs_norm(const Matrix& a) {
  require_finite(a, "hs_norm");
  return a.norm();
}

double rank_threshold(Index rows, Index cols, double s1) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * s1;
}

Index numerical_rank(const Matrix& a) {
  SvdResult r = svd(a);
  double thr = rank_threshold(a.rows(), a.cols(), r.s(0));
  Index rank = 0;
  for (Index i = 0; i < r.s.size(); ++i) {
    if (r.s(i) > thr) ++rank;
  }
  return rank;
}

Subspace::Subspace(Index ambient, Matrix basis) : ambient_(ambient) {
  if (ambient < 0 || basis.cols() > ambient ||
      (basis.cols() > 0 && basis.rows() != ambient)) {
    throw std::invalid_argument("Subspace: basis shape does not fit ambient");
  }
  if (basis.cols() > 0) {
    require_finite(basis, "Subspace");
    Matrix gram = basis.transpose() * basis;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("Subspace: basis is not orthonormal");
    }
  } else {
    basis = Matrix(ambient, 0);
  }
  basis_ = std::move(basis);
}

Subspace Subspace::zero(Index ambient) {
  return Subspace(ambient, Matrix(ambient, 0));
}

Subspace Subspace::span_of(const Matrix& vectors) {
  if (vectors.rows() == 0) {
    throw std::invalid_argument("Subspace::span_of: empty ambient dimension");
  }
  require_finite(vectors, "Subspace::span_of");
  Index ambient = vectors.rows();
  if (vectors.cols() == 0) return zero(ambient);
  Eigen::ColPivHouseholderQR<Matrix> qr(vectors);
  double s1 = qr.matrixR().cwiseAbs().maxCoeff();
  if (s1 == 0.0) return zero(ambient);
  qr.setThreshold(rank_threshold(vectors.rows(), vectors.cols(), 1.0));
  Index rank = qr.rank();
  if (rank == 0) return zero(ambient);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient, rank);
  return Subspace(ambient, std::move(q));
}

double dist_to_subspace(const Vector& x, const Subspace& h) {
  if (x.size() != h.ambient()) {
    throw std::invalid_argument("dist_to_subspace: dimension mismatch");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("dist_to_subspace: vector has NaN or Inf");
  }
  if (h.dim() == 0) return x.norm();
  return (x - h.basis() * (h.basis().transpose() * x)).norm();
}

Subspace orthonormal_complement(const Subspace& h) {
  Index ambient = h.ambient();
  Index dim = h.dim();
  if (dim == 0) {
    return Subspace(ambient, Matrix::Identity(ambient, ambient));
  }
  if (dim == ambient) return Subspace::zero(ambient);
  Eigen::HouseholderQR<Matrix> qr(h.basis());
  Matrix q = qr.householderQ();
  return Subspace(ambient, q.rightCols(ambient - dim));
}

}  // namespace sfl
