#pragma once

#include <cstdint>
#include <vector>

namespace sfl::stats {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion; well behaved at 0 and n.
Interval wilson(std::int64_t hits, std::int64_t trials, double z = kZ95);

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);
// Normal-approximation CI for the mean of xs.
Interval mean_ci(const std::vector<double>& xs, double z = kZ95);

double normal_cdf(double x);
double normal_pdf(double x);

// Least-squares slope of log(y) against log(x); pairs with y <= 0 are skipped.
// Returns {slope, intercept}.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};
LogLogFit fit_log_log(const std::vector<double>& x,
                      const std::vector<double>& y);

}  // namespace sfl::stats
