#include "sfl/lcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfl/ensembles.hpp"

namespace sfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<long long> round_lattice(const Vector& v) {
  std::vector<long long> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::llround(v(i));
  }
  return out;
}

// ---- branch-and-bound over subspace coordinates (dim 1 or 2) ----

// gcc's flow analysis cannot prove the heap's backing store initialized and
// warns on every inlined Cell access; the copies are guarded by empty() checks.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"

struct Cell {
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};
  int dim = 0;

  double min_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double c = 0.0;
      if (lo[i] > 0.0) c = lo[i];
      else if (hi[i] < 0.0) c = hi[i];
      s += c * c;
    }
    return std::sqrt(s);
  }
  double max_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double c = std::max(std::abs(lo[i]), std::abs(hi[i]));
      s += c * c;
    }
    return std::sqrt(s);
  }
  double radius() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double h = 0.5 * (hi[i] - lo[i]);
      s += h * h;
    }
    return std::sqrt(s);
  }
  void center(double* c) const {
    for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  }
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    return a.min_norm() > b.min_norm();
  }
};

}  // namespace

void LcdParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("lcd: alpha must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("lcd: gamma must lie in (0, 1)");
  }
  if (theta_max < 0.0) throw std::invalid_argument("lcd: theta_max must be >= 0");
  if (!(grid_tolerance > 0.0 && grid_tolerance <= 1e-2)) {
    throw std::invalid_argument("lcd: grid_tolerance must lie in (0, 1e-2]");
  }
}

double LcdParams::ceiling(Index m) const {
  return theta_max > 0.0 ? theta_max
                         : 10.0 * std::sqrt(static_cast<double>(m));
}

double dist_to_lattice(const Vector& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    double f = v(i) - std::nearbyint(v(i));
    s += f * f;
  }
  return std::sqrt(s);
}

double lcd_gap(const Vector& a, double theta, const LcdParams& params) {
  Vector w = theta * a;
  return dist_to_lattice(w) - std::min(params.gamma * w.norm(), params.alpha);
}

LcdResult lcd_vector(const Vector& a, const LcdParams& params) {
  params.validate();
  const double nrm = a.norm();
  if (!(nrm > 0.0) || !a.allFinite()) {
    throw std::invalid_argument("lcd_vector: need a finite nonzero vector");
  }
  const double ceiling = params.ceiling(a.size());
  const double lips = nrm * (1.0 + params.gamma);
  const double h_min = params.grid_tolerance / std::max(1.0, nrm);

  LcdResult out;
  double theta_prev = 0.0;
  double theta = h_min;
  double bracket_hi = -1.0;
  const std::int64_t max_iters = 200000000;
  for (std::int64_t it = 0;; ++it) {
    if (it >= max_iters) {
      throw NumericalError("lcd_vector: scan failed to terminate");
    }
    double g = lcd_gap(a, theta, params);
    if (g < 0.0) {
      bracket_hi = theta;
      break;
    }
    theta_prev = theta;
    if (theta >= ceiling) break;
    double step = std::max(h_min, 0.999 * g / lips);
    theta = std::min(theta + step, ceiling);
  }
  if (bracket_hi < 0.0) {
    out.exceeds_ceiling = true;
    out.certified = true;
    return out;
  }

  double lo = theta_prev, hi = bracket_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-3 * h_min; ++it) {
    double mid = 0.5 * (lo + hi);
    if (lcd_gap(a, mid, params) < 0.0) hi = mid;
    else lo = mid;
  }
  out.value = hi;
  out.witness_theta = hi;
  out.witness_point = hi * a;
  out.witness_lattice = round_lattice(out.witness_point);
  out.certified = true;
  return out;
}

namespace {

LcdResult lcd_subspace_certified(const Subspace& e, const LcdParams& params) {
  const Matrix& q = e.basis();
  const int k = static_cast<int>(e.dim());
  const double r_ceiling = params.ceiling(e.ambient());
  const double lips = 1.0 + params.gamma;
  const double tol = params.grid_tolerance;

  auto gap = [&](const double* c) {
    Vector theta = q.col(0) * c[0];
    if (k == 2) theta += q.col(1) * c[1];
    double norm2 = c[0] * c[0] + (k == 2 ? c[1] * c[1] : 0.0);
    return dist_to_lattice(theta) -
           std::min(params.gamma * std::sqrt(norm2), params.alpha);
  };

  // min-heap on the cell's distance-to-origin lower bound
  std::vector<Cell> heap;
  CellOrder deeper;
  auto push = [&](const Cell& cell) {
    heap.push_back(cell);
    std::push_heap(heap.begin(), heap.end(), deeper);
  };
  if (k == 1) {
    // theta and -theta reach the same lattice distances
    Cell root{};
    root.dim = 1;
    root.lo[0] = 0.45;
    root.hi[0] = r_ceiling;
    push(root);
  } else {
    Cell root{};
    root.dim = 2;
    root.lo[0] = -r_ceiling;
    root.hi[0] = r_ceiling;
    root.lo[1] = 0.0;
    root.hi[1] = r_ceiling;
    push(root);
  }

  double best = kInf;
  double best_c[2] = {0.0, 0.0};
  double ambiguous_min = kInf;
  const double r_accept = 0.25 * tol;
  const double r_floor = 1e-3 * tol;

  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), deeper);
    Cell cell = heap.back();
    heap.pop_back();
    double lb = cell.min_norm();
    if (lb >= std::min(best, r_ceiling)) continue;
    // no admissible point has norm < 1/2: there dist = |theta| > gamma*|theta|
    if (cell.max_norm() < 0.5) continue;
    double c[2];
    cell.center(c);
    double r = cell.radius();
    double g = gap(c);
    if (g >= lips * r) continue;
    if (g < 0.0 && r <= r_accept) {
      double nrm = std::sqrt(c[0] * c[0] + c[1] * c[1]);
      if (nrm < best) {
        best = nrm;
        best_c[0] = c[0];
        best_c[1] = c[1];
      }
      continue;
    }
    if (g >= 0.0 && r <= r_floor) {
      ambiguous_min = std::min(ambiguous_min, lb);
      continue;
    }
    // split along the wider side(s)
    if (k == 1) {
      double mid = 0.5 * (cell.lo[0] + cell.hi[0]);
      Cell a = cell, b = cell;
      a.hi[0] = mid;
      b.lo[0] = mid;
      push(a);
      push(b);
    } else {
      double mid0 = 0.5 * (cell.lo[0] + cell.hi[0]);
      double mid1 = 0.5 * (cell.lo[1] + cell.hi[1]);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          Cell sub = cell;
          (i == 0 ? sub.hi[0] : sub.lo[0]) = mid0;
          (j == 0 ? sub.hi[1] : sub.lo[1]) = mid1;
          push(sub);
        }
      }
    }
  }

  LcdResult out;
  if (best > r_ceiling) {
    out.exceeds_ceiling = true;
    out.certified = ambiguous_min == kInf;
    return out;
  }
  out.value = best;
  out.witness_theta = best;
  out.witness_point = q.col(0) * best_c[0];
  if (k == 2) out.witness_point += q.col(1) * best_c[1];
  out.witness_lattice = round_lattice(out.witness_point);
  out.certified = ambiguous_min >= best - tol;
  return out;
}

#pragma GCC diagnostic pop

LcdResult lcd_subspace_mc(const Subspace& e, const LcdParams& params,
                          std::int64_t samples, rng::SeedSpec seed) {
  if (samples < 1) {
    throw std::invalid_argument("lcd_subspace: Monte Carlo mode needs samples >= 1");
  }
  const Matrix& q = e.basis();
  LcdResult out;
  out.mc_samples = samples;
  out.value = kInf;
  for (std::int64_t s = 0; s < samples; ++s) {
    Vector dir =
        sample_unit_sphere(e.dim(), rng::substream(seed, static_cast<std::uint64_t>(s)));
    Vector a = q * dir;
    LcdResult r = lcd_vector(a, params);
    if (r.exceeds_ceiling) {
      ++out.mc_exceed_count;
      continue;
    }
    if (r.value < out.value) {
      out.value = r.value;
      out.witness_theta = r.value;
      out.witness_point = r.witness_point;
      out.witness_lattice = r.witness_lattice;
    }
  }
  if (out.value == kInf) {
    out.exceeds_ceiling = true;
    out.value = 0.0;
  }
  out.certified = false;
  return out;
}

}  // namespace

LcdResult lcd_subspace(const Subspace& e, const LcdParams& params, LcdMode mode,
                       std::int64_t samples, rng::SeedSpec seed) {
  params.validate();
  if (e.dim() < 1) {
    throw std::invalid_argument("lcd_subspace: subspace must have dim >= 1");
  }
  if (mode == LcdMode::Certified) {
    if (e.dim() > 2) {
      throw std::invalid_argument(
          "lcd_subspace: certified mode covers dim <= 2; use Monte Carlo");
    }
    return lcd_subspace_certified(e, params);
  }
  return lcd_subspace_mc(e, params, samples, seed);
}

int dyadic_level(double value, double base) {
  if (!(value > 0.0) || !(base > 0.0)) {
    throw std::invalid_argument("dyadic_level: value and base must be > 0");
  }
  return static_cast<int>(std::floor(std::log2(value / base)));
}

}  // namespace sfl
