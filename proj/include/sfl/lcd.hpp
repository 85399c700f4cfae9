#pragma once

#include <cstdint>
#include <vector>

#include "sfl/linalg.hpp"
#include "sfl/rng.hpp"

namespace sfl {

struct LcdParams {
  double alpha = 1.0;
  double gamma = 0.1;
  // Search ceiling for the dilation; 0 means "use 10 * sqrt(M)".
  double theta_max = 0.0;
  double grid_tolerance = 1e-6;

  void validate() const;
  double ceiling(Index m) const;
};

struct LcdResult {
  bool exceeds_ceiling = false;
  // Smallest admissible dilation (vector case) or smallest admissible
  // ||theta|| over the subspace; meaningful when !exceeds_ceiling.
  double value = 0.0;
  double witness_theta = 0.0;
  Vector witness_point;                    // theta * a, or theta in E
  std::vector<long long> witness_lattice;  // nearest integer point
  bool certified = false;
  std::int64_t mc_samples = 0;
  std::int64_t mc_exceed_count = 0;
};

double dist_to_lattice(const Vector& v);

// g(theta) = dist(theta a, Z^M) - min(gamma |theta a|, alpha); the dilation
// sought is inf{theta > 0 : g(theta) < 0}.
double lcd_gap(const Vector& a, double theta, const LcdParams& params);

// Lipschitz-certified scan plus bisection: successive steps of length
// g(theta)/L with L = |a|(1+gamma) cannot skip a sign change, so the first
// admissible theta is located to within grid_tolerance.
LcdResult lcd_vector(const Vector& a, const LcdParams& params);

enum class LcdMode { Certified, MonteCarlo };

// Subspace version: inf{|theta| : theta in E, dist(theta, Z^M) < threshold}.
// Certified mode (dim <= 2) runs branch-and-bound over basis coordinates with
// the same Lipschitz certificate; Monte Carlo mode scans sampled directions.
LcdResult lcd_subspace(const Subspace& e, const LcdParams& params, LcdMode mode,
                       std::int64_t samples = 0, rng::SeedSpec seed = {});

// Index k of the dyadic band [base 2^k, base 2^(k+1)) containing value.
int dyadic_level(double value, double base);

}  // namespace sfl
