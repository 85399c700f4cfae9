#include "sfl/reduction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfl/stats.hpp"

namespace sfl {
namespace {

const double kLognormalShift = std::sqrt(M_E);
const double kLognormalScale = std::sqrt(M_E * M_E - M_E);

TruncatedMoments full_moments() { return TruncatedMoments{0.0, 1.0}; }

TruncatedMoments gaussian_truncated(double level) {
  double m2 = std::erf(level / std::sqrt(2.0)) -
              2.0 * level * stats::normal_pdf(level);
  return TruncatedMoments{0.0, m2};
}

TruncatedMoments uniform_truncated(double level) {
  if (level >= std::sqrt(3.0)) return full_moments();
  // density 1/(2 sqrt 3) on [-sqrt3, sqrt3]
  double m2 = level * level * level / (3.0 * std::sqrt(3.0));
  return TruncatedMoments{0.0, m2};
}

TruncatedMoments two_point_truncated(double p, double level) {
  TwoPointAtoms a = two_point_atoms(p);
  double m1 = 0.0, m2 = 0.0;
  if (std::abs(a.hi) <= level) {
    m1 += p * a.hi;
    m2 += p * a.hi * a.hi;
  }
  if (std::abs(a.lo) <= level) {
    m1 += (1.0 - p) * a.lo;
    m2 += (1.0 - p) * a.lo * a.lo;
  }
  return TruncatedMoments{m1, m2 - m1 * m1};
}

TruncatedMoments exponential_truncated(double level) {
  // X = E - 1 with E ~ Exp(1); keep E in [lo, hi].
  double lo = std::max(0.0, 1.0 - level);
  double hi = 1.0 + level;
  auto f = [](double t) { return -t * std::exp(-t); };  // int (t-1) e^-t
  auto g = [](double t) {
    return -(t * t + 1.0) * std::exp(-t);  // int (t-1)^2 e^-t
  };
  double m1 = f(hi) - f(lo);
  double m2 = g(hi) - g(lo);
  return TruncatedMoments{m1, m2 - m1 * m1};
}

TruncatedMoments lognormal_truncated(double level) {
  // X = (e^Z - mu)/c; |X| <= level keeps e^Z in [mu - c*level, mu + c*level].
  double mu = kLognormalShift, c = kLognormalScale;
  double ylo = mu - c * level;
  double yhi = mu + c * level;
  double zlo = ylo > 0.0 ? std::log(ylo)
                          : -std::numeric_limits<double>::infinity();
  double zhi = std::log(yhi);
  auto phi = [](double z) { return stats::normal_cdf(z); };
  double mass = phi(zhi) - phi(zlo);
  double e1 = std::exp(0.5) * (phi(zhi - 1.0) - phi(zlo - 1.0));
  double e2 = std::exp(2.0) * (phi(zhi - 2.0) - phi(zlo - 2.0));
  double m1 = (e1 - mu * mass) / c;
  double m2 = (e2 - 2.0 * mu * e1 + mu * mu * mass) / (c * c);
  return TruncatedMoments{m1, m2 - m1 * m1};
}

}  // namespace

double TruncationParams::level(int N) const {
  return 0.5 * std::pow(static_cast<double>(N), omega);
}

void TruncationParams::validate() const {
  if (!(omega > 0.0 && omega < 0.5)) {
    throw std::invalid_argument("truncation: omega must lie in (0, 1/2)");
  }
  if (!(gamma_target > 0.0)) {
    throw std::invalid_argument("truncation: gamma_target must be positive");
  }
}

TruncatedMoments truncated_moments(const EntryDistribution& dist,
                                   double level) {
  if (!(level > 0.0)) {
    throw std::invalid_argument("truncated_moments: level must be positive");
  }
  TruncatedMoments tm;
  switch (dist.kind) {
    case EntryKind::Rademacher:
      tm = level >= 1.0 ? full_moments() : TruncatedMoments{0.0, 0.0};
      break;
    case EntryKind::Gaussian:
      tm = gaussian_truncated(level);
      break;
    case EntryKind::UniformScaled:
      tm = uniform_truncated(level);
      break;
    case EntryKind::CenteredExponential:
      tm = exponential_truncated(level);
      break;
    case EntryKind::TwoPointSkewed:
      tm = two_point_truncated(dist.skew_p, level);
      break;
    case EntryKind::LognormalStandardized:
      tm = lognormal_truncated(level);
      break;
  }
  if (!(tm.variance > 0.0)) {
    throw NumericalError("truncated_moments: variance degenerated at level " +
                         std::to_string(level) + " for " + dist.name());
  }
  return tm;
}

ReducedModel reduce(const Matrix& x, const FactorizedT& f, const Matrix& b,
                    const EntryDistribution& dist, const TruncationParams& tp) {
  return reduce(x, f, b,
                std::vector<EntryDistribution>(
                    static_cast<std::size_t>(x.cols()), dist),
                tp);
}

ReducedModel reduce(const Matrix& x, const FactorizedT& f, const Matrix& b,
                    const std::vector<EntryDistribution>& columns,
                    const TruncationParams& tp) {
  tp.validate();
  const Index M = x.rows(), n = x.cols();
  const Index N = f.u.rows();
  if (f.v1.cols() != M || b.rows() != N || b.cols() != n ||
      static_cast<Index>(columns.size()) != n) {
    throw std::invalid_argument("reduce: inconsistent shapes");
  }
  require_finite(x, "reduce");
  const double level = tp.level(static_cast<int>(N));

  ReducedModel rm;
  rm.y_bound = std::pow(static_cast<double>(N), tp.omega);
  rm.d1 = Vector(n);
  rm.y = Matrix(M, n);

  // V1 * E[Xt] has constant columns mean_j * (V1 * ones).
  Vector v1_rowsum = f.v1 * Vector::Ones(M);
  Vector dinv_scale = f.d.cwiseInverse();
  rm.a = Matrix(N, n);

  for (Index j = 0; j < n; ++j) {
    TruncatedMoments tm =
        truncated_moments(columns[static_cast<std::size_t>(j)], level);
    double sd = std::sqrt(tm.variance);
    rm.d1(j) = sd;
    for (Index i = 0; i < M; ++i) {
      double v = x(i, j);
      if (std::abs(v) > level) {
        v = 0.0;
        ++rm.truncation_hit_count;
      }
      rm.y(i, j) = (v - tm.mean) / sd;
    }
    rm.a.col(j) =
        (dinv_scale.asDiagonal() * (f.u.transpose() * b.col(j)) -
         tm.mean * v1_rowsum) /
        sd;
  }
  return rm;
}

Matrix reassemble(const FactorizedT& f, const ReducedModel& rm) {
  return f.u * f.d.asDiagonal() *
         ((f.v1 * rm.y - rm.a) * rm.d1.asDiagonal());
}

ReducedContractReport verify_reduced_contract(const ReducedModel& rm) {
  ReducedContractReport rep;
  rep.truncation_hit_count = rm.truncation_hit_count;
  rep.omega_event_held = rm.truncation_hit_count == 0;
  rep.y_bound = rm.y_bound;
  rep.max_abs_y = rm.y.cwiseAbs().maxCoeff();
  rep.y_bound_ok = rep.max_abs_y <= rm.y_bound + 1e-12;
  if (!rep.y_bound_ok) {
    rep.violations.push_back("max |y| = " + std::to_string(rep.max_abs_y) +
                             " exceeds N^omega = " +
                             std::to_string(rep.y_bound));
  }

  const Index M = rm.y.rows(), n = rm.y.cols();
  rep.column_variance.reserve(static_cast<std::size_t>(n));
  rep.column_tolerance.reserve(static_cast<std::size_t>(n));
  rep.variances_ok = true;
  for (Index j = 0; j < n; ++j) {
    double m1 = rm.y.col(j).mean();
    double m2 = rm.y.col(j).squaredNorm() / static_cast<double>(M);
    double var = m2 - m1 * m1;
    double m4 = rm.y.col(j).array().pow(4).mean();
    // CLT band for a variance estimate, from the sample's own 4th moment.
    double tol =
        4.0 * std::sqrt(std::max(m4 - var * var, 0.5) /
                        static_cast<double>(M)) +
        1e-9;
    rep.column_variance.push_back(var);
    rep.column_tolerance.push_back(tol);
    if (std::abs(var - 1.0) > tol) {
      rep.variances_ok = false;
      rep.violations.push_back(
          "column " + std::to_string(j) + " empirical variance " +
          std::to_string(var) + " outside 1 +- " + std::to_string(tol));
    }
  }
  return rep;
}

}  // namespace sfl
