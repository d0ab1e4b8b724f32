#include "lpw/dyadic_core.hpp"

#include <string>

#include "lpw/error.hpp"

namespace lpw {

IntInterval::IntInterval(WalshIndex lo, WalshIndex hi) : lo_(lo), hi_(hi) {
  if (lo >= hi) {
    throw Error(Errc::empty_interval,
                "[" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}

IntInterval IntInterval::closed(WalshIndex lo, WalshIndex hi_inclusive) {
  if (hi_inclusive == ~WalshIndex{0}) {
    throw Error(Errc::resolution_too_coarse, "closed interval exceeds index width");
  }
  return IntInterval(lo, hi_inclusive + 1);
}

std::vector<WalshIndex> IntInterval::elements() const {
  std::vector<WalshIndex> out;
  out.reserve(size());
  for (WalshIndex n = lo_; n < hi_; ++n) out.push_back(n);
  return out;
}

DyadicBlock::DyadicBlock(Level k) : k_(k), interval_(delta_block(k)) {}

IntInterval delta_block(Level k) {
  if (k >= kIndexBits) {
    throw Error(Errc::level_out_of_range, "block level " + std::to_string(k));
  }
  if (k == 0) return IntInterval(0, 1);
  return IntInterval(WalshIndex{1} << (k - 1), WalshIndex{1} << (k - 1) << 1);
}

std::vector<WalshIndex> translate_set(WalshIndex a, std::span<const WalshIndex> set) {
  std::vector<WalshIndex> out;
  out.reserve(set.size());
  for (WalshIndex s : set) out.push_back(dyadic_plus(a, s));
  return out;
}

}  // namespace lpw
