#include "sfl/rng.hpp"

#include <cmath>

namespace sfl::rng {
namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
constexpr std::uint64_t kKeyConst = 0x243F6A8885A308D3ULL;
constexpr std::uint64_t kCtrConst = 0x452821E638D01377ULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeedSpec substream(SeedSpec parent, std::uint64_t role) {
  return SeedSpec{parent.master_seed,
                  mix64(parent.stream_id + kWeyl0 * (role + 1))};
}

Philox::Philox(SeedSpec seed, std::uint64_t index)
    : k0_(seed.master_seed),
      k1_(kKeyConst),
      c0_(seed.stream_id),
      c1_(index),
      c2_(0),
      c3_(kCtrConst) {}

void Philox::refill() {
  std::uint64_t x0 = c0_, x1 = c1_, x2 = c2_, x3 = c3_;
  std::uint64_t k0 = k0_, k1 = k1_;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, x0, hi0, lo0);
    mulhilo(kPhiloxM1, x2, hi1, lo1);
    x0 = hi1 ^ x1 ^ k0;
    x1 = lo1;
    x2 = hi0 ^ x3 ^ k1;
    x3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  block_ = {x0, x1, x2, x3};
  pos_ = 0;
  ++c2_;
}

std::uint64_t Philox::next_u64() {
  if (pos_ >= 4) refill();
  return block_[static_cast<std::size_t>(pos_++)];
}

double Philox::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox::next_unit_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Philox::next_gaussian() {
  if (has_gauss_cache_) {
    has_gauss_cache_ = false;
    return gauss_cache_;
  }
  double u1 = next_unit_open();
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  gauss_cache_ = r * std::sin(a);
  has_gauss_cache_ = true;
  return r * std::cos(a);
}

}  // namespace sfl::rng
