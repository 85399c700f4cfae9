// Independent reference computations used to cross-check library results.
// Everything here is deliberately written from scratch (quadrature, series,
// enumeration, std::mt19937 sampling) rather than calling back into the
// library, so a bug cannot cancel itself out.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ---- adaptive Simpson quadrature ----

inline double simpson_step(double a, double b, double fa, double fm,
                           double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_step(a, m, fa, flm, fm);
  double right = simpson_step(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson_step(a, b, fa, fm, fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// ---- incomplete gamma, chi-square and normal CDFs ----

// Regularized lower incomplete gamma P(s, x), series for x < s+1 and
// continued fraction otherwise (standard Lentz iteration).
inline double lower_gamma_reg(double s, double x) {
  if (x <= 0.0) return 0.0;
  double lg = std::lgamma(s);
  if (x < s + 1.0) {
    double sum = 1.0 / s, term = sum;
    for (int k = 1; k < 500; ++k) {
      term *= x / (s + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - lg);
  }
  double tiny = 1e-300;
  double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int k = 1; k < 500; ++k) {
    double an = -static_cast<double>(k) * (static_cast<double>(k) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  double q = std::exp(-x + s * std::log(x) - lg) * h;
  return 1.0 - q;
}

inline double chi_square_cdf(double dof, double x) {
  return lower_gamma_reg(0.5 * dof, 0.5 * x);
}

inline double normal_cdf(double x) {
  double half_tail = 0.5 * lower_gamma_reg(0.5, 0.5 * x * x);
  return x >= 0.0 ? 0.5 + half_tail : 0.5 - half_tail;
}

// ---- exact combinatorics ----

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

inline double binomial_cdf(int n, double p, int k_max) {
  double acc = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    acc += binom(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return acc;
}

// ---- brute-force distance to sparse vectors ----

// Minimum over every k-subset support of the norm of the off-support part.
inline double brute_dist_to_sparse(const Eigen::VectorXd& x, int k) {
  int n = static_cast<int>(x.size());
  if (k >= n) return 0.0;
  if (n > 20) throw std::invalid_argument("brute_dist_to_sparse: n too large");
  double total = x.squaredNorm();
  double best = total;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double kept = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) kept += x(i) * x(i);
    }
    best = std::min(best, total - kept);
  }
  return std::sqrt(std::max(best, 0.0));
}

// ---- closed-form 2x2 singular values ----

inline std::pair<double, double> svd_2x2(double a, double b, double c,
                                         double d) {
  // eigenvalues of Z^T Z via trace/determinant
  double t = a * a + b * b + c * c + d * d;
  double det = a * d - b * c;
  double disc = std::sqrt(std::max(t * t - 4.0 * det * det, 0.0));
  double hi = std::sqrt(0.5 * (t + disc));
  double lo = std::sqrt(std::max(0.5 * (t - disc), 0.0));
  return {hi, lo};
}

// ---- randomized smallest singular value upper bound ----

// min |A x| over random unit starts refined by projected gradient descent on
// the sphere; a true upper bound for s_min that tightens with iterations.
inline double min_norm_on_sphere(const Eigen::MatrixXd& a, int starts,
                                 int iters, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd gram = a.transpose() * a;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x(a.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss(gen);
    x.normalize();
    double step = 1.0 / std::max(1.0, gram.norm());
    for (int it = 0; it < iters; ++it) {
      Eigen::VectorXd grad = gram * x;
      Eigen::VectorXd next = x - step * grad;
      double nn = next.norm();
      if (nn < 1e-14) break;
      next /= nn;
      if ((a * next).norm() <= (a * x).norm()) {
        x = next;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, (a * x).norm());
  }
  return best;
}

// ---- exhaustive Rademacher sums ----

// All 2^n values of sum a_k xi_k, each with probability 2^-n.
inline std::vector<double> rademacher_sums(const Eigen::VectorXd& a) {
  int n = static_cast<int>(a.size());
  if (n > 24) throw std::invalid_argument("rademacher_sums: n too large");
  std::vector<double> out;
  out.reserve(1u << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += (mask & (1u << i)) ? a(i) : -a(i);
    }
    out.push_back(s);
  }
  return out;
}

// sup_v P(S in [v-eps, v+eps]) for a finite equal-mass sample set: slide a
// closed window of width 2 eps anchored at each atom.
inline double max_window_mass(std::vector<double> values, double eps) {
  std::sort(values.begin(), values.end());
  std::size_t best = 0, j = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (j < i) j = i;
    while (j + 1 < values.size() && values[j + 1] <= values[i] + 2.0 * eps) {
      ++j;
    }
    best = std::max(best, j - i + 1);
  }
  return static_cast<double>(best) / static_cast<double>(values.size());
}

// ---- Wilson interval recomputed from the formula ----

inline std::pair<double, double> wilson(std::int64_t hits, std::int64_t trials,
                                        double z = 1.959963984540054) {
  double n = static_cast<double>(trials);
  double p = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---- independent uniform sphere sampler ----

inline Eigen::VectorXd sphere_point(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(n);
  double nn = 0.0;
  do {
    for (int i = 0; i < n; ++i) x(i) = gauss(gen);
    nn = x.norm();
  } while (nn < 1e-12);
  return x / nn;
}

}  // namespace oracle
