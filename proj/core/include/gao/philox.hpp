#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).

#include <array>
#include <cstdint>

namespace gao {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Standard normals for one path: counter (block, path lo, path hi, 0) under
/// key (seed lo, seed hi). Each block of four words yields four normals by
/// Box-Muller, so the i-th draw of a path never depends on other paths.
class PathNormals {
 public:
  PathNormals(std::uint64_t seed, std::uint64_t path) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

  double next() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint32_t block_ = 0;
  std::array<double, 4> buf_{};
  int pos_ = 4;
};

}  // namespace gao
