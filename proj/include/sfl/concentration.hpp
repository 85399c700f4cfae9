#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/ensembles.hpp"
#include "sfl/linalg.hpp"
#include "sfl/rng.hpp"

namespace sfl {

// One Levy-concentration estimate L(S, eps) = sup_v P(|S - v| <= eps).
// The sup is searched over candidate centers, so the value is a lower bound
// on the true concentration function (exact in 1-D where the optimal window
// can be anchored at a sample).
struct ConcentrationEstimate {
  double epsilon = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string center_search;
};

ConcentrationEstimate levy_concentration(std::vector<double> values,
                                         double epsilon);
ConcentrationEstimate levy_concentration(const std::vector<Vector>& samples,
                                         double epsilon,
                                         Index max_centers = 4096);

// Scalar small-ball bound sqrt(2/pi) eps/|a| + C (|a|_3/|a|_2)^3 B for
// S = sum a_k xi_k; rows compare the estimated left side per epsilon and fit
// the constant that would make the bound tight.
struct SmallBallCltRow {
  double epsilon = 0.0;
  ConcentrationEstimate lhs;
  double gauss_term = 0.0;
  double berry_term = 0.0;
  double fitted_c = 0.0;
};

struct SmallBallCltReport {
  std::vector<SmallBallCltRow> rows;
  double l3_ratio_cubed = 0.0;
  double b_constant = 0.0;
  double fitted_c_tilde = 0.0;
};

SmallBallCltReport check_small_ball_clt(const Vector& a,
                                        const EntryDistribution& dist,
                                        const std::vector<double>& epsilons,
                                        std::int64_t trials,
                                        rng::SeedSpec seed);

// L(P X, t sqrt(N)) for a coordinate-free projection P (P P^t = I_N) against
// the product bound (C p)^N; all t values share one sample set so the curve
// is monotone by construction.
struct ProjectionBallRow {
  double t = 0.0;
  ConcentrationEstimate lhs;
};

struct ProjectionBallReport {
  std::vector<ProjectionBallRow> rows;
  bool monotone = false;
};

ProjectionBallReport check_projection_small_ball(const EntryDistribution& dist,
                                                 const Matrix& p,
                                                 const std::vector<double>& t_grid,
                                                 std::int64_t trials,
                                                 rng::SeedSpec seed);

// P(|A xi - y| <= |A|_HS / 2) for subgaussian entries; implied_c is the
// constant read off from -log(estimate) * K^4 |A|^2 / |A|_HS^2.
struct HansonWrightReport {
  double radius = 0.0;
  double hs = 0.0;
  double op = 0.0;
  double subg_k = 0.0;
  ConcentrationEstimate lhs;
  double implied_c = 0.0;
};

HansonWrightReport check_hanson_wright_ball(const Matrix& a,
                                            const EntryDistribution& dist,
                                            std::int64_t trials,
                                            rng::SeedSpec seed);

// Shared helper: i.i.d. entry vector for trial t, reproducible per seed.
Vector entry_vector(const EntryDistribution& dist, Index n, rng::SeedSpec seed,
                    std::uint64_t trial);

}  // namespace sfl
