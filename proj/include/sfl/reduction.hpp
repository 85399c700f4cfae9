#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/deformations.hpp"
#include "sfl/ensembles.hpp"
#include "sfl/linalg.hpp"

namespace sfl {

// Entry truncation level is N^omega / 2; omega in (0, 1/2).
struct TruncationParams {
  double omega = 0.25;
  double gamma_target = 2.0;  // polynomial failure exponent aimed for

  double level(int N) const;
  void validate() const;
};

struct TruncatedMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of xi * 1{|xi| <= level}, in closed form.
// Throws NumericalError when the truncated variance degenerates to 0.
TruncatedMoments truncated_moments(const EntryDistribution& dist, double level);

// The centered, renormalized model: T*Xt - B = u * diag(d) * (v1*y - a) * diag(d1)
// where Xt is the truncated X, y = (Xt - E Xt) * D1^-1 and
// a = (D^-1 u^t B - v1 * E Xt) * D1^-1.
struct ReducedModel {
  Matrix y;  // M x n, centered, unit variance entries
  Matrix a;  // N x n deterministic shift
  Vector d1;
  std::int64_t truncation_hit_count = 0;
  double y_bound = 0.0;  // N^omega
};

ReducedModel reduce(const Matrix& x, const FactorizedT& f, const Matrix& b,
                    const EntryDistribution& dist, const TruncationParams& tp);
ReducedModel reduce(const Matrix& x, const FactorizedT& f, const Matrix& b,
                    const std::vector<EntryDistribution>& columns,
                    const TruncationParams& tp);

// Rebuilds T*Xt - B from the factorized pieces.
Matrix reassemble(const FactorizedT& f, const ReducedModel& rm);

struct ReducedContractReport {
  std::int64_t truncation_hit_count = 0;
  bool omega_event_held = false;  // no entry was clipped
  double y_bound = 0.0;
  double max_abs_y = 0.0;
  bool y_bound_ok = false;
  std::vector<double> column_variance;
  std::vector<double> column_tolerance;
  bool variances_ok = false;
  std::vector<std::string> violations;
};

// Checks the advertised properties of the reduced model on one sample and
// reports violations instead of throwing: at desk scale some bounds
// (notably |y| <= N^omega for heavy-tailed entries) can fail legitimately.
ReducedContractReport verify_reduced_contract(const ReducedModel& rm);

}  // namespace sfl
