#include "sfl/ensembles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrtLog2 = std::sqrt(std::log(2.0));
const double kLognormalShift = std::sqrt(M_E);              // E e^Z
const double kLognormalScale = std::sqrt(M_E * M_E - M_E);  // sd of e^Z

void require_two_point_p(double p) {
  if (!(p >= 0.05 && p <= 0.95)) {
    throw std::invalid_argument(
        "two_point_skewed: p must lie in [0.05, 0.95]");
  }
}

}  // namespace

TwoPointAtoms two_point_atoms(double p) {
  require_two_point_p(p);
  return TwoPointAtoms{std::sqrt((1.0 - p) / p), -std::sqrt(p / (1.0 - p))};
}

std::string EntryDistribution::name() const {
  switch (kind) {
    case EntryKind::Rademacher:
      return "rademacher";
    case EntryKind::Gaussian:
      return "gaussian";
    case EntryKind::UniformScaled:
      return "uniform_scaled";
    case EntryKind::CenteredExponential:
      return "centered_exponential";
    case EntryKind::TwoPointSkewed:
      return "two_point_skewed";
    case EntryKind::LognormalStandardized:
      return "lognormal_standardized";
  }
  throw std::logic_error("EntryDistribution: bad kind");
}

EntryDistribution EntryDistribution::from_name(const std::string& name,
                                               double p) {
  EntryDistribution d;
  if (name == "rademacher") {
    d.kind = EntryKind::Rademacher;
  } else if (name == "gaussian") {
    d.kind = EntryKind::Gaussian;
  } else if (name == "uniform_scaled") {
    d.kind = EntryKind::UniformScaled;
  } else if (name == "centered_exponential") {
    d.kind = EntryKind::CenteredExponential;
  } else if (name == "two_point_skewed") {
    return two_point(p);
  } else if (name == "lognormal_standardized") {
    d.kind = EntryKind::LognormalStandardized;
  } else {
    throw std::invalid_argument("unknown entry distribution '" + name + "'");
  }
  return d;
}

EntryDistribution EntryDistribution::two_point(double p) {
  require_two_point_p(p);
  EntryDistribution d;
  d.kind = EntryKind::TwoPointSkewed;
  d.skew_p = p;
  return d;
}

bool EntryDistribution::is_subgaussian() const {
  return kind != EntryKind::CenteredExponential &&
         kind != EntryKind::LognormalStandardized;
}

double EntryDistribution::subgaussian_moment() const {
  switch (kind) {
    case EntryKind::Rademacher:
      return 1.0 / kSqrtLog2;
    case EntryKind::Gaussian:
      // erfc(t/sqrt 2) <= exp(-t^2/2), so K^2 = 2 satisfies the tail bound
      return std::sqrt(2.0);
    case EntryKind::UniformScaled:
      return std::sqrt(3.0) / kSqrtLog2;
    case EntryKind::TwoPointSkewed:
      return support_bound() / kSqrtLog2;
    case EntryKind::CenteredExponential:
    case EntryKind::LognormalStandardized:
      return kInf;
  }
  throw std::logic_error("EntryDistribution: bad kind");
}

double EntryDistribution::third_moment_bound() const {
  switch (kind) {
    case EntryKind::Rademacher:
      return 1.0;
    case EntryKind::Gaussian:
      return 2.0 * std::sqrt(2.0 / M_PI);
    case EntryKind::UniformScaled:
      return 3.0 * std::sqrt(3.0) / 4.0;
    case EntryKind::CenteredExponential:
      return 12.0 / M_E - 2.0;
    case EntryKind::TwoPointSkewed: {
      double p = skew_p;
      return std::pow(1.0 - p, 1.5) / std::sqrt(p) +
             std::pow(p, 1.5) / std::sqrt(1.0 - p);
    }
    case EntryKind::LognormalStandardized:
      // Lyapunov: E|X|^3 <= (E X^4)^(3/4)
      return std::pow(fourth_moment(), 0.75);
  }
  throw std::logic_error("EntryDistribution: bad kind");
}

double EntryDistribution::fourth_moment() const {
  switch (kind) {
    case EntryKind::Rademacher:
      return 1.0;
    case EntryKind::Gaussian:
      return 3.0;
    case EntryKind::UniformScaled:
      return 1.8;
    case EntryKind::CenteredExponential:
      return 9.0;
    case EntryKind::TwoPointSkewed: {
      double p = skew_p;
      double q = 1.0 - p;
      return q * q / p + p * p / q;
    }
    case EntryKind::LognormalStandardized: {
      double e = M_E;
      double num = std::pow(e, 6) - 4.0 * std::pow(e, 3) + 6.0 * e - 3.0;
      return num / ((e - 1.0) * (e - 1.0));
    }
  }
  throw std::logic_error("EntryDistribution: bad kind");
}

double EntryDistribution::support_bound() const {
  switch (kind) {
    case EntryKind::Rademacher:
      return 1.0;
    case EntryKind::Gaussian:
    case EntryKind::CenteredExponential:
    case EntryKind::LognormalStandardized:
      return kInf;
    case EntryKind::UniformScaled:
      return std::sqrt(3.0);
    case EntryKind::TwoPointSkewed: {
      TwoPointAtoms a = two_point_atoms(skew_p);
      return std::max(a.hi, -a.lo);
    }
  }
  throw std::logic_error("EntryDistribution: bad kind");
}

double sample_entry(const EntryDistribution& dist, rng::SeedSpec seed,
                    std::uint64_t index) {
  rng::Philox gen(seed, index);
  switch (dist.kind) {
    case EntryKind::Rademacher:
      return gen.next_unit() < 0.5 ? 1.0 : -1.0;
    case EntryKind::Gaussian:
      return gen.next_gaussian();
    case EntryKind::UniformScaled:
      return (2.0 * gen.next_unit() - 1.0) * std::sqrt(3.0);
    case EntryKind::CenteredExponential:
      return -std::log(gen.next_unit_open()) - 1.0;
    case EntryKind::TwoPointSkewed: {
      TwoPointAtoms a = two_point_atoms(dist.skew_p);
      return gen.next_unit() < dist.skew_p ? a.hi : a.lo;
    }
    case EntryKind::LognormalStandardized:
      return (std::exp(gen.next_gaussian()) - kLognormalShift) /
             kLognormalScale;
  }
  throw std::logic_error("sample_entry: bad kind");
}

Matrix sample_matrix(Index rows, Index cols, const EntryDistribution& dist,
                     rng::SeedSpec seed) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("sample_matrix: dimensions must be positive");
  }
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    std::uint64_t base = static_cast<std::uint64_t>(j) *
                         static_cast<std::uint64_t>(rows);
    for (Index i = 0; i < rows; ++i) {
      out(i, j) = sample_entry(dist, seed, base + static_cast<std::uint64_t>(i));
    }
  }
  return out;
}

Matrix sample_matrix(Index rows, const std::vector<EntryDistribution>& columns,
                     rng::SeedSpec seed) {
  if (rows <= 0 || columns.empty()) {
    throw std::invalid_argument("sample_matrix: dimensions must be positive");
  }
  Matrix out(rows, static_cast<Index>(columns.size()));
  for (Index j = 0; j < out.cols(); ++j) {
    std::uint64_t base = static_cast<std::uint64_t>(j) *
                         static_cast<std::uint64_t>(rows);
    for (Index i = 0; i < rows; ++i) {
      out(i, j) = sample_entry(columns[static_cast<std::size_t>(j)], seed,
                               base + static_cast<std::uint64_t>(i));
    }
  }
  return out;
}

Vector sample_vector(Index n, const EntryDistribution& dist,
                     rng::SeedSpec seed) {
  return sample_matrix(n, 1, dist, seed).col(0);
}

Vector sample_gaussian_vector(Index n, rng::SeedSpec seed) {
  if (n <= 0) {
    throw std::invalid_argument("sample_gaussian_vector: n must be positive");
  }
  rng::Philox gen(seed, 0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gen.next_gaussian();
  return v;
}

Vector sample_unit_sphere(Index n, rng::SeedSpec seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    rng::Philox gen(seed, attempt);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = gen.next_gaussian();
    double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
  }
}

Matrix sample_orthogonal(Index dim, rng::SeedSpec seed) {
  if (dim <= 0) {
    throw std::invalid_argument("sample_orthogonal: dim must be positive");
  }
  rng::Philox gen(seed, 0);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) g(i, j) = gen.next_gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector rdiag = qr.matrixQR().diagonal();
  for (Index j = 0; j < dim; ++j) {
    if (rdiag(j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace sfl
