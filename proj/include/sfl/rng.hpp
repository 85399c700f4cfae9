#pragma once

#include <array>
#include <cstdint>

namespace sfl::rng {

// Identifies one logical random stream.  Every sampling routine takes a
// SeedSpec, so a draw is a pure function of (master_seed, stream_id, index)
// and results never depend on evaluation order or worker count.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Derives a child stream for a given role (trial number, matrix slot, ...).
SeedSpec substream(SeedSpec parent, std::uint64_t role);

std::uint64_t mix64(std::uint64_t x);

// Counter-based generator (Philox-style 4x64, 10 rounds).  The key is
// (master_seed, const) and the 256-bit counter starts at
// (stream_id, index, 0, const), so distinct (seed, index) pairs can never
// collide at the state level.  Cheap to construct; used per logical draw site.
class Philox {
 public:
  Philox(SeedSpec seed, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform on [0,1) with 53 random bits.
  double next_unit();
  // Uniform on (0,1]; safe to pass to log().
  double next_unit_open();
  // Standard normal via Box-Muller; second value of each pair is cached.
  double next_gaussian();

 private:
  void refill();

  std::uint64_t k0_, k1_;
  std::uint64_t c0_, c1_, c2_, c3_;
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;
  double gauss_cache_ = 0.0;
  bool has_gauss_cache_ = false;
};

}  // namespace sfl::rng
