#include "interlace/rng.hpp"

#include <cmath>

#include "interlace/errors.hpp"

namespace interlace {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(splitmix64(master_seed_ ^ splitmix64(stream_index_ + 0x632be59bd9b4e019ULL)),
                   index);
}

void RngStream::refill() {
  buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                     static_cast<std::uint32_t>(stream_index_),
                     static_cast<std::uint32_t>(stream_index_ >> 32)},
                    {static_cast<std::uint32_t>(master_seed_),
                     static_cast<std::uint32_t>(master_seed_ >> 32)});
  ++block_;
  pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (pos_ == 4) refill();
  return buf_[static_cast<std::size_t>(pos_++)];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n <= 1) return 0;
  // 64x64 -> 128 multiply-shift.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint16_t RngStream::next_u16() {
  if (has_half_) {
    has_half_ = false;
    return static_cast<std::uint16_t>(half_ >> 16);
  }
  half_ = next_u32();
  has_half_ = true;
  return static_cast<std::uint16_t>(half_);
}

int RngStream::small_below(int n) {
  const auto un = static_cast<std::uint32_t>(n);
  std::uint32_t m = static_cast<std::uint32_t>(next_u16()) * un;
  auto low = static_cast<std::uint16_t>(m);
  if (low < un) {
    const std::uint32_t threshold = (65536u - un) % un;
    while (low < threshold) {
      m = static_cast<std::uint32_t>(next_u16()) * un;
      low = static_cast<std::uint16_t>(m);
    }
  }
  return static_cast<int>(m >> 16);
}

std::uint64_t poisson(double lambda, RngStream& rng) {
  require(lambda >= 0 && std::isfinite(lambda), "Poisson mean must be finite and nonnegative");
  if (lambda == 0) return 0;
  if (lambda < 10) {
    const double u = rng.uniform01();
    double p = std::exp(-lambda), s = p;
    std::uint64_t k = 0;
    while (u >= s && p > 0) {
      ++k;
      p *= lambda / static_cast<double>(k);
      s += p;
    }
    return k;
  }
  const double slam = std::sqrt(lambda), loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace interlace
