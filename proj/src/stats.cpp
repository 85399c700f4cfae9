#include "sfl/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sfl::stats {

Interval wilson(std::int64_t hits, std::int64_t trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson: trials must be >= 1");
  if (hits < 0 || hits > trials) {
    throw std::invalid_argument("wilson: hits out of range");
  }
  double n = static_cast<double>(trials);
  double p = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{center - half, center + half};
  if (out.lo < 0.0) out.lo = 0.0;
  if (out.hi > 1.0) out.hi = 1.0;
  return out;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_stddev: need n >= 2");
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

Interval mean_ci(const std::vector<double>& xs, double z) {
  double m = mean(xs);
  double half = z * sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
  return Interval{m - half, m + half};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

LogLogFit fit_log_log(const std::vector<double>& x,
                      const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("fit_log_log: length mismatch");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0.0 || x[i] <= 0.0) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  LogLogFit fit;
  fit.points_used = n;
  if (n < 2) return fit;
  double dn = static_cast<double>(n);
  double denom = dn * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  return fit;
}

}  // namespace sfl::stats
