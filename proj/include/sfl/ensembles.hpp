#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/linalg.hpp"
#include "sfl/rng.hpp"

namespace sfl {

enum class EntryKind {
  Rademacher,
  Gaussian,
  UniformScaled,
  CenteredExponential,
  TwoPointSkewed,
  LognormalStandardized,
};

// A centered unit-variance entry law together with its declared moment
// constants.  Bounds are analytic values, never fitted from samples.
struct EntryDistribution {
  EntryKind kind = EntryKind::Gaussian;
  double skew_p = 0.5;  // only TwoPointSkewed reads this

  std::string name() const;
  static EntryDistribution from_name(const std::string& name, double p = 0.5);
  static EntryDistribution two_point(double p);

  bool is_subgaussian() const;
  // psi_2-style subgaussian constant; +inf for the heavy-tailed kinds.
  double subgaussian_moment() const;
  // Upper bound on E|xi|^3 (exact for every bounded kind).
  double third_moment_bound() const;
  double fourth_moment() const;
  // sup |xi|; +inf when unbounded.
  double support_bound() const;

  friend bool operator==(const EntryDistribution&,
                         const EntryDistribution&) = default;
};

// Atoms of the two-point law: value `hi` with probability p, else `lo`.
struct TwoPointAtoms {
  double hi;
  double lo;
};
TwoPointAtoms two_point_atoms(double p);

// One draw, a pure function of (dist, seed, index).
double sample_entry(const EntryDistribution& dist, rng::SeedSpec seed,
                    std::uint64_t index);

// i.i.d. matrix; entry (i,j) equals sample_entry at linear index j*rows+i,
// so fills are reproducible regardless of traversal or thread count.
Matrix sample_matrix(Index rows, Index cols, const EntryDistribution& dist,
                     rng::SeedSpec seed);

// Independent entries with a per-column law.
Matrix sample_matrix(Index rows, const std::vector<EntryDistribution>& columns,
                     rng::SeedSpec seed);

Vector sample_vector(Index n, const EntryDistribution& dist,
                     rng::SeedSpec seed);

Vector sample_gaussian_vector(Index n, rng::SeedSpec seed);
Vector sample_unit_sphere(Index n, rng::SeedSpec seed);

// Haar-distributed orthogonal matrix: QR of a gaussian matrix with the
// triangular factor's diagonal made positive.
Matrix sample_orthogonal(Index dim, rng::SeedSpec seed);

}  // namespace sfl
