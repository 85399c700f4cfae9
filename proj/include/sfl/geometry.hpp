#pragma once

#include <cstdint>
#include <vector>

#include "sfl/linalg.hpp"
#include "sfl/rng.hpp"

namespace sfl {

struct SparsityParams {
  double delta = 0.1;
  double rho = 0.3;

  // Sparse vectors carry at most floor(delta * n) coordinates; the floor-zero
  // case keeps one coordinate so the notion never degenerates.
  Index support_size(Index n) const;
  void validate() const;
};

// Euclidean distance from a unit vector to the set of support_size-sparse
// vectors: the norm of everything outside the largest coordinates
// (ties broken toward the lowest index).
double dist_to_sparse(const Vector& x, const SparsityParams& sp);

enum class Compressibility { Compressible, Incompressible };

// Boundary dist == rho counts as compressible.
Compressibility classify(const Vector& x, const SparsityParams& sp);

// Coordinates with rho/sqrt(2n) <= |x_k| <= 1/sqrt(delta n).  Requires an
// incompressible input and enforces the guaranteed floor
// |sigma| >= rho^2 delta n / 2.
std::vector<Index> spread_set(const Vector& x, const SparsityParams& sp);

// The block size m = min{d, floor(rho^2 delta n / 2)} used when splitting
// coordinates into a window J of size m.
Index spread_block_size(Index d, Index n, const SparsityParams& sp);

// Totally spread window: after restriction to J and normalization all
// coordinates lie in [k1/sqrt(m), k2/sqrt(m)].
struct SpreadWindow {
  Index m = 0;
  double k1 = 0.0;
  double k2 = 0.0;

  static SpreadWindow make(Index m, const SparsityParams& sp);
};

// y must be supported on exactly the m window coordinates (passed restricted).
bool totally_spread_membership(const Vector& y_restricted,
                               const SpreadWindow& w);

// Full event for one subset J: P_J x normalized is totally spread and
// rho * sqrt(m / 2n) <= |P_J x| <= sqrt(m / delta n).
bool spread_event(const Vector& x, const std::vector<Index>& j_set,
                  const SparsityParams& sp, const SpreadWindow& w);

struct RateEstimate {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Probability over uniform m-subsets J that spread_event holds.
RateEstimate random_subset_event_rate(const Vector& x, const SparsityParams& sp,
                                      Index m, std::int64_t trials,
                                      rng::SeedSpec seed);

std::vector<Index> sample_subset(Index n, Index m, rng::Philox& gen);

enum class NetMode { GreedyRandom, Lattice };

struct EpsilonNet {
  std::vector<Vector> points;
  double epsilon = 0.0;
  double cardinality_bound = 0.0;
  std::int64_t covering_probes = 0;
  std::int64_t covering_repairs = 0;
};

// Epsilon-net on the unit sphere of R^n, n <= 8.  Greedy mode keeps an
// epsilon-separated set (packing gives the cardinality bound for free) and
// repairs any covering gap found by uniform probing; lattice mode builds the
// n <= 2 deterministic constructions.
EpsilonNet build_net(Index n, double epsilon, NetMode mode, rng::SeedSpec seed,
                     std::int64_t covering_probes = 100000);

double net_cardinality_bound(Index n, double epsilon);

}  // namespace sfl
