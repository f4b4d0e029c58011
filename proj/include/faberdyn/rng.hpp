#pragma once

#include <array>
#include <cstdint>

namespace faberdyn {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Stream of uniform doubles for one trajectory.
///
/// Stream splitting: the 64-bit seed is the Philox key, and the counter is
/// (block index lo, block index hi, stream lo, stream hi). Stream s therefore
/// never overlaps stream s' for any number of draws below 2^64 blocks, and the
/// k-th draw of a stream is independent of how other streams were consumed.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  std::uint64_t next_u64();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t blocks_used() const { return block_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace faberdyn
