#pragma once

// Decomposition of an integer interval [a, b) into the anchor {a}, left pieces
// J_j with a + J_j = delta_j and right pieces ~J_i with b + ~J_i = delta_i,
// where + is the dyadic sum.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpw/dyadic_core.hpp"

namespace lpw {

struct Piece {
  Level level;
  IntInterval interval;

  friend bool operator==(const Piece&, const Piece&) = default;
};

struct Decomposition {
  WalshIndex anchor = 0;
  WalshIndex upper = 1;
  std::vector<Piece> left;
  std::vector<Piece> right;

  IntInterval interval() const { return IntInterval(anchor, upper); }
  std::vector<Level> left_levels() const;
  std::vector<Level> right_levels() const;
};

/// Splits [0, b) along the 1-digits of b, highest digit first.
std::vector<Piece> decompose_upper(WalshIndex b);

Decomposition decompose(WalshIndex a, WalshIndex b);
inline Decomposition decompose(const IntInterval& interval) {
  return decompose(interval.lo(), interval.hi());
}

struct DecompositionCheck {
  std::string name;
  bool passed = true;
};

struct VerificationReport {
  bool passed = true;
  std::vector<DecompositionCheck> checks;
  std::string failure;
  std::optional<WalshIndex> witness;
};

/// Brute-force check of coverage, disjointness, both dyadic-sum relations
/// and contiguity of the anchor together with the left pieces.
VerificationReport verify_decomposition(const Decomposition& d, WalshIndex a, WalshIndex b);

/// Decomposes every interval of a pairwise disjoint family and checks that
/// the left pieces are disjoint across the whole family.
std::vector<Decomposition> family_decompose(std::span<const IntInterval> family);

}  // namespace lpw
