#include "sfl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sfl/stats.hpp"

namespace sfl {
namespace {

void require_unit(const Vector& x, const char* what) {
  if (x.size() == 0) throw std::invalid_argument(std::string(what) + ": empty");
  if (std::abs(x.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument(std::string(what) + ": input must be a unit vector");
  }
}

std::uint64_t bounded_u64(std::uint64_t range, rng::Philox& gen) {
  // rejection sampling keeps the draw exactly uniform
  std::uint64_t x, r;
  do {
    x = gen.next_u64();
    r = x % range;
  } while (x - r > std::uint64_t(-1) - range + 1);
  return r;
}

Vector sphere_point(Index n, rng::Philox& gen) {
  Vector v(n);
  double nrm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) v(i) = gen.next_gaussian();
    nrm = v.norm();
  } while (nrm <= 1e-12);
  return v / nrm;
}

}  // namespace

Index SparsityParams::support_size(Index n) const {
  auto k = static_cast<Index>(std::floor(delta * static_cast<double>(n) + 1e-12));
  return std::max<Index>(k, 1);
}

void SparsityParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("sparsity: delta, rho must lie in (0, 1)");
  }
}

double dist_to_sparse(const Vector& x, const SparsityParams& sp) {
  sp.validate();
  require_unit(x, "dist_to_sparse");
  const Index n = x.size();
  const Index k = sp.support_size(n);
  if (k >= n) return 0.0;
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    double fa = std::abs(x(a)), fb = std::abs(x(b));
    if (fa != fb) return fa > fb;
    return a < b;
  });
  double tail = 0.0;
  for (Index r = k; r < n; ++r) {
    double v = x(idx[static_cast<std::size_t>(r)]);
    tail += v * v;
  }
  return std::sqrt(tail);
}

Compressibility classify(const Vector& x, const SparsityParams& sp) {
  return dist_to_sparse(x, sp) <= sp.rho ? Compressibility::Compressible
                                         : Compressibility::Incompressible;
}

std::vector<Index> spread_set(const Vector& x, const SparsityParams& sp) {
  if (classify(x, sp) != Compressibility::Incompressible) {
    throw std::invalid_argument("spread_set: input is compressible");
  }
  const Index n = x.size();
  const double dn = static_cast<double>(n);
  const double lo = sp.rho / std::sqrt(2.0 * dn);
  const double hi = 1.0 / std::sqrt(sp.delta * dn);
  std::vector<Index> sigma;
  for (Index i = 0; i < n; ++i) {
    double a = std::abs(x(i));
    if (a >= lo && a <= hi) sigma.push_back(i);
  }
  double floor_bound = 0.5 * sp.rho * sp.rho * sp.delta * dn;
  if (static_cast<double>(sigma.size()) < floor_bound) {
    throw NumericalError(
        "spread_set: incompressible vector with spread set below the "
        "guaranteed floor");
  }
  return sigma;
}

Index spread_block_size(Index d, Index n, const SparsityParams& sp) {
  sp.validate();
  auto floor_part = static_cast<Index>(std::floor(
      0.5 * sp.rho * sp.rho * sp.delta * static_cast<double>(n) + 1e-12));
  return std::min(d, floor_part);
}

SpreadWindow SpreadWindow::make(Index m, const SparsityParams& sp) {
  sp.validate();
  if (m < 1) throw std::invalid_argument("SpreadWindow: m must be >= 1");
  SpreadWindow w;
  w.m = m;
  w.k1 = sp.rho * std::sqrt(sp.delta / 2.0);
  w.k2 = 1.0 / w.k1;
  return w;
}

bool totally_spread_membership(const Vector& y_restricted,
                               const SpreadWindow& w) {
  if (y_restricted.size() != w.m) {
    throw std::invalid_argument("totally_spread_membership: size != m");
  }
  require_unit(y_restricted, "totally_spread_membership");
  const double lo = w.k1 / std::sqrt(static_cast<double>(w.m));
  const double hi = w.k2 / std::sqrt(static_cast<double>(w.m));
  for (Index i = 0; i < w.m; ++i) {
    double a = std::abs(y_restricted(i));
    if (a < lo || a > hi) return false;
  }
  return true;
}

bool spread_event(const Vector& x, const std::vector<Index>& j_set,
                  const SparsityParams& sp, const SpreadWindow& w) {
  if (static_cast<Index>(j_set.size()) != w.m) {
    throw std::invalid_argument("spread_event: |J| != m");
  }
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(w.m);
  Vector px(w.m);
  for (Index i = 0; i < w.m; ++i) px(i) = x(j_set[static_cast<std::size_t>(i)]);
  double nrm = px.norm();
  double lo = sp.rho * std::sqrt(m / (2.0 * n));
  double hi = std::sqrt(m / (sp.delta * n));
  if (nrm < lo || nrm > hi) return false;
  return totally_spread_membership(px / nrm, w);
}

RateEstimate random_subset_event_rate(const Vector& x, const SparsityParams& sp,
                                      Index m, std::int64_t trials,
                                      rng::SeedSpec seed) {
  if (classify(x, sp) != Compressibility::Incompressible) {
    throw std::invalid_argument("random_subset_event_rate: x is compressible");
  }
  if (m < 1 || m > x.size()) {
    throw std::invalid_argument("random_subset_event_rate: bad m");
  }
  if (trials < 1) {
    throw std::invalid_argument("random_subset_event_rate: trials must be >= 1");
  }
  SpreadWindow w = SpreadWindow::make(m, sp);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    rng::Philox gen(rng::substream(seed, static_cast<std::uint64_t>(t)), 0);
    std::vector<Index> j = sample_subset(x.size(), m, gen);
    if (spread_event(x, j, sp, w)) ++hits;
  }
  RateEstimate out;
  out.hits = hits;
  out.trials = trials;
  out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  stats::Interval ci = stats::wilson(hits, trials);
  out.ci_lo = ci.lo;
  out.ci_hi = ci.hi;
  return out;
}

std::vector<Index> sample_subset(Index n, Index m, rng::Philox& gen) {
  if (m < 0 || m > n) throw std::invalid_argument("sample_subset: bad m");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    auto j = i + static_cast<Index>(bounded_u64(
                 static_cast<std::uint64_t>(n - i), gen));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(idx.begin(), idx.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

double net_cardinality_bound(Index n, double epsilon) {
  double base = 1.0 + 2.0 / epsilon;
  double vol = std::pow(base, static_cast<double>(n));
  double surf = 2.0 * static_cast<double>(n) *
                std::pow(base, static_cast<double>(n - 1));
  return std::min(vol, surf);
}

EpsilonNet build_net(Index n, double epsilon, NetMode mode, rng::SeedSpec seed,
                     std::int64_t covering_probes) {
  if (n < 1 || n > 8) {
    throw std::invalid_argument("build_net: certified construction needs 1 <= n <= 8");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("build_net: epsilon must lie in (0, 1]");
  }
  EpsilonNet net;
  net.epsilon = epsilon;
  net.cardinality_bound = net_cardinality_bound(n, epsilon);
  net.covering_probes = covering_probes;

  auto covered = [&](const Vector& p) {
    for (const Vector& q : net.points) {
      if ((p - q).norm() <= epsilon) return true;
    }
    return false;
  };
  auto separated = [&](const Vector& p) {
    for (const Vector& q : net.points) {
      if ((p - q).norm() < epsilon) return false;
    }
    return true;
  };

  if (mode == NetMode::Lattice) {
    if (n == 1) {
      net.points.push_back(Vector::Constant(1, 1.0));
      net.points.push_back(Vector::Constant(1, -1.0));
    } else if (n == 2) {
      auto m = static_cast<Index>(
          std::ceil(M_PI / (2.0 * std::asin(epsilon / 2.0))));
      for (Index k = 0; k < m; ++k) {
        double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m);
        Vector p(2);
        p << std::cos(a), std::sin(a);
        net.points.push_back(p);
      }
    } else {
      throw std::invalid_argument(
          "build_net: lattice mode only covers n <= 2; use greedy_random");
    }
  } else {
    rng::Philox gen(rng::substream(seed, 0), 0);
    int consecutive_rejects = 0;
    const int stall_limit = 20000;
    while (consecutive_rejects < stall_limit) {
      Vector p = sphere_point(n, gen);
      if (separated(p)) {
        net.points.push_back(std::move(p));
        consecutive_rejects = 0;
      } else {
        ++consecutive_rejects;
      }
    }
  }

  // Covering verification by uniform probing; a missed probe is itself
  // epsilon-separated from the net, so adding it repairs the gap without
  // breaking the packing bound.
  for (int round = 0; round < 6; ++round) {
    rng::Philox probe_gen(rng::substream(seed, 1 + static_cast<std::uint64_t>(round)), 0);
    std::int64_t misses = 0;
    for (std::int64_t q = 0; q < covering_probes; ++q) {
      Vector p = sphere_point(n, probe_gen);
      if (!covered(p)) {
        net.points.push_back(std::move(p));
        ++misses;
        ++net.covering_repairs;
      }
    }
    if (misses == 0) break;
    if (round == 5) {
      throw NumericalError("build_net: covering verification kept failing");
    }
  }

  if (static_cast<double>(net.points.size()) > net.cardinality_bound + 0.5) {
    throw NumericalError("build_net: separated set exceeded the packing bound");
  }
  return net;
}

}  // namespace sfl
