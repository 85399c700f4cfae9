#include "sfl/deformations.hpp"

#include <cmath>
#include <stdexcept>

namespace sfl {
namespace {

constexpr std::uint64_t kRoleU = 0;
constexpr std::uint64_t kRoleV = 1;
constexpr std::uint64_t kRoleShiftLeft = 2;
constexpr std::uint64_t kRoleShiftRight = 3;

void validate_spectrum(const DimensionConfig& dims,
                       const DeformationSpec& spec) {
  if (static_cast<int>(spec.spectrum.size()) != dims.N) {
    throw std::invalid_argument("deformation: spectrum must have N entries");
  }
  double lo = 1.0 / dims.k0 - 1e-12;
  double hi = dims.k0 + 1e-12;
  double prev = hi;
  for (double s : spec.spectrum) {
    if (!(s >= lo && s <= hi)) {
      throw std::invalid_argument(
          "deformation: spectrum entry outside [1/k0, k0]");
    }
    if (s > prev + 1e-12) {
      throw std::invalid_argument("deformation: spectrum must be nonincreasing");
    }
    prev = s;
  }
}

}  // namespace

void DimensionConfig::validate() const {
  if (n < 1 || N < n || M < N) {
    throw std::invalid_argument("dims: need 1 <= n <= N <= M");
  }
  if (lambda_cap < 1.0) {
    throw std::invalid_argument("dims: lambda_cap must be >= 1");
  }
  if (static_cast<double>(M) > lambda_cap * static_cast<double>(N) + 1e-9) {
    throw std::invalid_argument("dims: M exceeds lambda_cap * N");
  }
  if (!(k0 >= 1.0)) {
    throw std::invalid_argument("dims: k0 must be >= 1");
  }
}

std::pair<Matrix, FactorizedT> build_T(const DimensionConfig& dims,
                                       const DeformationSpec& spec) {
  dims.validate();
  validate_spectrum(dims, spec);
  const Index N = dims.N, M = dims.M;

  FactorizedT f;
  f.d = Vector(N);
  for (Index i = 0; i < N; ++i) {
    f.d(i) = std::sqrt(spec.spectrum[static_cast<std::size_t>(i)]);
  }
  if (spec.identity_rotations) {
    f.u = Matrix::Identity(N, N);
    f.v1 = Matrix::Identity(M, M).topRows(N);
    f.v2 = Matrix::Identity(M, M).bottomRows(M - N);
  } else {
    f.u = sample_orthogonal(N, rng::substream(spec.rotation_seed, kRoleU));
    Matrix v = sample_orthogonal(M, rng::substream(spec.rotation_seed, kRoleV));
    f.v1 = v.topRows(N);
    f.v2 = v.bottomRows(M - N);
  }
  Matrix t = f.u * f.d.asDiagonal() * f.v1;
  return {std::move(t), std::move(f)};
}

Matrix build_B(const DimensionConfig& dims, const DeformationSpec& spec) {
  dims.validate();
  const Index N = dims.N, n = dims.n;
  double target = spec.b_norm_target;
  if (target < 0.0 || target > dims.k0 * std::sqrt(static_cast<double>(N)) + 1e-9) {
    throw std::invalid_argument(
        "deformation: b_norm_target must lie in [0, k0 * sqrt(N)]");
  }
  switch (spec.b_kind) {
    case ShiftKind::Zero:
      return Matrix::Zero(N, n);
    case ShiftKind::RankOne: {
      Vector left, right;
      if (spec.identity_rotations) {
        left = Vector::Zero(N);
        left(0) = 1.0;
        right = Vector::Zero(n);
        right(0) = 1.0;
      } else {
        left = sample_unit_sphere(
            N, rng::substream(spec.rotation_seed, kRoleShiftLeft));
        right = sample_unit_sphere(
            n, rng::substream(spec.rotation_seed, kRoleShiftRight));
      }
      return target * left * right.transpose();
    }
    case ShiftKind::HaarRotatedDiagonal: {
      // diagonal profile from target down to target/2, then rotated on
      // both sides; operator norm stays exactly target.
      Vector diag(n);
      for (Index i = 0; i < n; ++i) {
        double frac = n == 1 ? 0.0
                             : static_cast<double>(i) /
                                   static_cast<double>(n - 1);
        diag(i) = target * (1.0 - 0.5 * frac);
      }
      Matrix core = Matrix::Zero(N, n);
      core.topLeftCorner(n, n) = diag.asDiagonal();
      if (spec.identity_rotations) return core;
      Matrix ql = sample_orthogonal(
          N, rng::substream(spec.rotation_seed, kRoleShiftLeft));
      Matrix qr = sample_orthogonal(
          n, rng::substream(spec.rotation_seed, kRoleShiftRight));
      return ql * core * qr.transpose();
    }
  }
  throw std::logic_error("build_B: bad shift kind");
}

Matrix projection_P(const FactorizedT& f) {
  const Index N = f.v1.rows();
  if (N == 0) throw std::invalid_argument("projection_P: empty factor");
  Matrix gram = f.v1 * f.v1.transpose();
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("projection_P: v1 rows lost orthonormality");
  }
  return f.v1;
}

std::vector<double> constant_spectrum(int count, double value) {
  return std::vector<double>(static_cast<std::size_t>(count), value);
}

std::vector<double> linear_spectrum(int count, double lo, double hi) {
  if (count < 1) throw std::invalid_argument("linear_spectrum: empty");
  if (hi < lo) std::swap(hi, lo);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double frac = count == 1 ? 0.0
                             : static_cast<double>(i) /
                                   static_cast<double>(count - 1);
    out[static_cast<std::size_t>(i)] = hi - (hi - lo) * frac;
  }
  return out;
}

}  // namespace sfl
