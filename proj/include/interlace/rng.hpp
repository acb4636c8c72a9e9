#pragma once

#include <array>
#include <cstdint>

namespace interlace {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based random stream. The key is the master seed; the high half of
// the counter is the stream index, so streams never overlap and any stream
// can be recreated from (master_seed, stream_index) alone.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  // Independent sub-stream, e.g. one per trajectory of a sample.
  RngStream child(std::uint64_t index) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Exactly uniform on {0, ..., n-1} (Lemire's multiply-shift with rejection).
  std::uint64_t uniform_below(std::uint64_t n);
  // Exactly uniform on {0, ..., n-1} for n <= 2^16, consuming 16 bits at a time.
  int small_below(int n);

  // Stream position, for diagnostics.
  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();
  std::uint16_t next_u16();

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  std::uint32_t half_ = 0;
  bool has_half_ = false;
};

// Poisson(lambda) draw: sequential inversion below lambda = 10, Hormann's
// PTRS transformed rejection above.
std::uint64_t poisson(double lambda, RngStream& rng);

}  // namespace interlace
