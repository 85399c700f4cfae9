#pragma once

#include <utility>
#include <vector>

#include "sfl/ensembles.hpp"
#include "sfl/linalg.hpp"
#include "sfl/rng.hpp"

namespace sfl {

// Shapes of the rectangular model: X is M x n, T is N x M, B is N x n,
// n <= N <= M <= lambda_cap * N.  d = N - n + 1 counts the tail exponent.
struct DimensionConfig {
  int n = 0;
  int N = 0;
  int M = 0;
  double lambda_cap = 4.0;
  double k0 = 2.0;  // conditioning band: spectrum of T*T^t within [1/k0, k0]

  int d() const { return N - n + 1; }
  double aspect() const { return static_cast<double>(n) / N; }
  void validate() const;
};

enum class ShiftKind { Zero, RankOne, HaarRotatedDiagonal };

struct DeformationSpec {
  // Singular values squared of T (eigenvalues of T*T^t), nonincreasing,
  // each within [1/k0, k0].
  std::vector<double> spectrum;
  rng::SeedSpec rotation_seed{};
  // Replaces Haar rotations by identity/aligned blocks for worst-case probes.
  bool identity_rotations = false;
  ShiftKind b_kind = ShiftKind::Zero;
  double b_norm_target = 0.0;  // operator norm of B; must be <= k0 * sqrt(N)
};

// T = u * diag(d) * v1 with (v1; v2) the rows of an M x M orthogonal matrix.
// v1 is N x M and doubles as the projection P (v1 * v1^t = I_N).
struct FactorizedT {
  Matrix u;
  Vector d;
  Matrix v1;
  Matrix v2;  // (M - N) x M, empty when M == N
};

std::pair<Matrix, FactorizedT> build_T(const DimensionConfig& dims,
                                       const DeformationSpec& spec);
Matrix build_B(const DimensionConfig& dims, const DeformationSpec& spec);

// Returns v1 after re-checking orthogonality of the stored factor.
Matrix projection_P(const FactorizedT& f);

std::vector<double> constant_spectrum(int count, double value);
// Linearly spaced between hi and lo, nonincreasing.
std::vector<double> linear_spectrum(int count, double lo, double hi);

}  // namespace sfl
