#include "sfl/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sfl/stats.hpp"

namespace sfl {
namespace {

ConcentrationEstimate finish(double epsilon, std::int64_t hits,
                             std::int64_t trials, std::string search) {
  ConcentrationEstimate out;
  out.epsilon = epsilon;
  out.hits = hits;
  out.trials = trials;
  out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  stats::Interval ci = stats::wilson(hits, trials);
  out.ci_lo = ci.lo;
  out.ci_hi = ci.hi;
  out.center_search = std::move(search);
  return out;
}

}  // namespace

ConcentrationEstimate levy_concentration(std::vector<double> values,
                                         double epsilon) {
  if (values.empty()) {
    throw std::invalid_argument("levy_concentration: empty sample");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("levy_concentration: epsilon must be >= 0");
  }
  std::sort(values.begin(), values.end());
  const auto n = static_cast<std::int64_t>(values.size());
  // best window [v, v + 2 eps] has its left edge at a sample
  std::int64_t best = 0;
  std::size_t right = 0;
  for (std::size_t left = 0; left < values.size(); ++left) {
    if (right < left) right = left;
    while (right + 1 < values.size() &&
           values[right + 1] <= values[left] + 2.0 * epsilon) {
      ++right;
    }
    best = std::max(best, static_cast<std::int64_t>(right - left + 1));
  }
  return finish(epsilon, best, n, "exact_1d");
}

ConcentrationEstimate levy_concentration(const std::vector<Vector>& samples,
                                         double epsilon, Index max_centers) {
  if (samples.empty()) {
    throw std::invalid_argument("levy_concentration: empty sample");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("levy_concentration: epsilon must be >= 0");
  }
  const auto n = static_cast<std::int64_t>(samples.size());
  const auto stride = std::max<std::int64_t>(
      1, n / std::max<Index>(max_centers, 1));
  std::int64_t best = 0;
  for (std::int64_t c = 0; c < n; c += stride) {
    const Vector& center = samples[static_cast<std::size_t>(c)];
    std::int64_t count = 0;
    for (const Vector& s : samples) {
      if ((s - center).norm() <= epsilon) ++count;
    }
    best = std::max(best, count);
  }
  return finish(epsilon, best, n, "sampled_centers");
}

Vector entry_vector(const EntryDistribution& dist, Index n, rng::SeedSpec seed,
                    std::uint64_t trial) {
  return sample_vector(n, dist, rng::substream(seed, trial));
}

SmallBallCltReport check_small_ball_clt(const Vector& a,
                                        const EntryDistribution& dist,
                                        const std::vector<double>& epsilons,
                                        std::int64_t trials,
                                        rng::SeedSpec seed) {
  if (a.size() == 0 || a.norm() == 0.0) {
    throw std::invalid_argument("check_small_ball_clt: need a nonzero weight vector");
  }
  if (trials < 1) {
    throw std::invalid_argument("check_small_ball_clt: trials must be >= 1");
  }
  std::vector<double> sums(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    Vector xi = entry_vector(dist, a.size(), seed, static_cast<std::uint64_t>(t));
    sums[static_cast<std::size_t>(t)] = a.dot(xi);
  }

  SmallBallCltReport rep;
  double l2 = a.norm();
  double l3 = std::pow(a.array().abs().pow(3).sum(), 1.0 / 3.0);
  rep.l3_ratio_cubed = std::pow(l3 / l2, 3.0);
  rep.b_constant = dist.third_moment_bound();
  for (double eps : epsilons) {
    SmallBallCltRow row;
    row.epsilon = eps;
    row.lhs = levy_concentration(sums, eps);
    row.gauss_term = std::sqrt(2.0 / M_PI) * eps / l2;
    row.berry_term = rep.b_constant * rep.l3_ratio_cubed;
    row.fitted_c = row.berry_term > 0.0
                       ? std::max(0.0, (row.lhs.estimate - row.gauss_term) /
                                           row.berry_term)
                       : 0.0;
    rep.fitted_c_tilde = std::max(rep.fitted_c_tilde, row.fitted_c);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ProjectionBallReport check_projection_small_ball(const EntryDistribution& dist,
                                                 const Matrix& p,
                                                 const std::vector<double>& t_grid,
                                                 std::int64_t trials,
                                                 rng::SeedSpec seed) {
  const Index n_rows = p.rows(), m_cols = p.cols();
  if (n_rows < 1 || m_cols < n_rows) {
    throw std::invalid_argument("check_projection_small_ball: P must be N x M, N <= M");
  }
  Matrix gram = p * p.transpose();
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("check_projection_small_ball: P P^t != I");
  }
  if (trials < 1) {
    throw std::invalid_argument("check_projection_small_ball: trials must be >= 1");
  }
  std::vector<Vector> proj(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    Vector xi = entry_vector(dist, m_cols, seed, static_cast<std::uint64_t>(t));
    proj[static_cast<std::size_t>(t)] = p * xi;
  }
  ProjectionBallReport rep;
  rep.monotone = true;
  double prev = -1.0;
  double scale = std::sqrt(static_cast<double>(n_rows));
  for (double t : t_grid) {
    if (t < 0.0) {
      throw std::invalid_argument("check_projection_small_ball: t must be >= 0");
    }
    ProjectionBallRow row;
    row.t = t;
    row.lhs = levy_concentration(proj, t * scale);
    if (row.lhs.estimate < prev) rep.monotone = false;
    prev = row.lhs.estimate;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

HansonWrightReport check_hanson_wright_ball(const Matrix& a,
                                            const EntryDistribution& dist,
                                            std::int64_t trials,
                                            rng::SeedSpec seed) {
  if (!dist.is_subgaussian()) {
    throw std::invalid_argument(
        "check_hanson_wright_ball: entry law must be subgaussian");
  }
  if (trials < 1) {
    throw std::invalid_argument("check_hanson_wright_ball: trials must be >= 1");
  }
  HansonWrightReport rep;
  rep.hs = hs_norm(a);
  rep.op = operator_norm(a);
  rep.subg_k = dist.subgaussian_moment();
  rep.radius = 0.5 * rep.hs;
  if (rep.hs == 0.0) {
    throw std::invalid_argument("check_hanson_wright_ball: A must be nonzero");
  }
  std::vector<Vector> images(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    Vector xi = entry_vector(dist, a.cols(), seed, static_cast<std::uint64_t>(t));
    images[static_cast<std::size_t>(t)] = a * xi;
  }
  rep.lhs = levy_concentration(images, rep.radius);
  double floor_p = 0.5 / static_cast<double>(trials);
  double p = std::max(rep.lhs.estimate, floor_p);
  rep.implied_c = -std::log(p / 2.0) * std::pow(rep.subg_k, 4.0) * rep.op *
                  rep.op / (rep.hs * rep.hs);
  return rep;
}

}  // namespace sfl
