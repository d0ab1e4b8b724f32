#pragma once

// Bit-level arithmetic on Walsh indices, integer intervals and the dyadic
// blocks delta_k = [2^{k-1}, 2^k).

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace lpw {

/// Index of a Walsh function in Paley order.
using WalshIndex = std::uint32_t;
/// Generation of a dyadic block, cell or sigma-algebra.
using Level = unsigned;

inline constexpr unsigned kIndexBits = 32;

constexpr unsigned digit(WalshIndex n, unsigned k) noexcept { return (n >> k) & 1u; }

/// Digitwise addition mod 2 of two indices. Commutative and self-inverse.
constexpr WalshIndex dyadic_plus(WalshIndex n1, WalshIndex n2) noexcept { return n1 ^ n2; }

/// The unique k with n in delta_k.
constexpr Level block_level(WalshIndex n) noexcept {
  return static_cast<Level>(std::bit_width(n));
}

/// Half-open interval [lo, hi) of nonnegative integers, lo < hi.
class IntInterval {
 public:
  IntInterval(WalshIndex lo, WalshIndex hi);

  /// Builds [lo, hi] as the half-open [lo, hi + 1).
  static IntInterval closed(WalshIndex lo, WalshIndex hi_inclusive);

  WalshIndex lo() const noexcept { return lo_; }
  WalshIndex hi() const noexcept { return hi_; }
  std::uint64_t size() const noexcept { return std::uint64_t{hi_} - lo_; }
  bool contains(WalshIndex n) const noexcept { return lo_ <= n && n < hi_; }
  bool overlaps(const IntInterval& other) const noexcept {
    return lo_ < other.hi_ && other.lo_ < hi_;
  }
  std::vector<WalshIndex> elements() const;

  friend bool operator==(const IntInterval&, const IntInterval&) = default;

 private:
  WalshIndex lo_;
  WalshIndex hi_;
};

/// delta_k: {0} for k = 0, [2^{k-1}, 2^k) otherwise.
class DyadicBlock {
 public:
  explicit DyadicBlock(Level k);

  Level level() const noexcept { return k_; }
  IntInterval interval() const noexcept { return interval_; }
  bool contains(WalshIndex n) const noexcept { return block_level(n) == k_; }
  std::vector<WalshIndex> elements() const { return interval_.elements(); }

 private:
  Level k_;
  IntInterval interval_;
};

IntInterval delta_block(Level k);

/// {a + s : s in set} under the dyadic sum. A bijection for fixed a.
std::vector<WalshIndex> translate_set(WalshIndex a, std::span<const WalshIndex> set);

}  // namespace lpw
