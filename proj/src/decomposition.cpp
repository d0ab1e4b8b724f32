#include "lpw/decomposition.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "lpw/error.hpp"

namespace lpw {
namespace {

std::vector<Level> levels_of(const std::vector<Piece>& pieces) {
  std::vector<Level> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) out.push_back(p.level);
  return out;
}

std::string describe(const IntInterval& i) {
  return "[" + std::to_string(i.lo()) + ", " + std::to_string(i.hi()) + ")";
}

}  // namespace

std::vector<Level> Decomposition::left_levels() const { return levels_of(left); }
std::vector<Level> Decomposition::right_levels() const { return levels_of(right); }

std::vector<Piece> decompose_upper(WalshIndex b) {
  if (b == 0) throw Error(Errc::empty_interval, "[0, 0)");
  std::vector<Piece> pieces;
  WalshIndex prefix = 0;
  for (unsigned k = kIndexBits; k-- > 0;) {
    if (!digit(b, k)) continue;
    const WalshIndex next = prefix + (WalshIndex{1} << k);
    pieces.push_back({k + 1, IntInterval(prefix, next)});
    prefix = next;
  }
  return pieces;
}

Decomposition decompose(WalshIndex a, WalshIndex b) {
  if (a >= b) {
    throw Error(Errc::empty_interval, "[" + std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  const auto upper = decompose_upper(b);
  const auto host = std::find_if(upper.begin(), upper.end(),
                                 [a](const Piece& p) { return p.interval.contains(a); });

  Decomposition d;
  d.anchor = a;
  d.upper = b;
  d.right.assign(host + 1, upper.end());

  // a agrees with b above k_m and has digit 0 at k_m; the gap (a, end of host)
  // is covered by a + delta_{kappa+1} for each 0-digit kappa of a below k_m.
  const unsigned top_digit = host->level - 1;
  for (unsigned kappa = 0; kappa < top_digit; ++kappa) {
    if (digit(a, kappa)) continue;
    const WalshIndex base = ((a >> (kappa + 1)) << (kappa + 1)) | (WalshIndex{1} << kappa);
    d.left.push_back({kappa + 1, IntInterval(base, base + (WalshIndex{1} << kappa))});
  }
  return d;
}

VerificationReport verify_decomposition(const Decomposition& d, WalshIndex a, WalshIndex b) {
  VerificationReport report;
  auto fail = [&report](std::size_t check, std::string what, std::optional<WalshIndex> witness) {
    report.checks[check].passed = false;
    if (report.passed) {
      report.passed = false;
      report.failure = std::move(what);
      report.witness = witness;
    }
  };
  report.checks = {{"anchor"}, {"left_relation"}, {"right_relation"},
                   {"disjoint"}, {"coverage"}, {"anchor_segment"}};

  if (d.anchor != a) fail(0, "anchor differs from a", a);
  if (a >= b) {
    if (!d.left.empty() || !d.right.empty()) fail(4, "pieces for an empty interval", std::nullopt);
    return report;
  }

  auto check_relation = [&](const std::vector<Piece>& pieces, WalshIndex base, std::size_t check,
                            const char* side) {
    for (const auto& p : pieces) {
      for (WalshIndex x = p.interval.lo(); x < p.interval.hi(); ++x) {
        if (block_level(dyadic_plus(base, x)) != p.level) {
          fail(check, std::string(side) + " piece " + describe(p.interval) +
                          " leaves block " + std::to_string(p.level), x);
          return;
        }
      }
      // Elementwise membership plus equal size gives set equality.
      const std::uint64_t block_size = p.level == 0 ? 1 : std::uint64_t{1} << (p.level - 1);
      if (p.interval.size() != block_size) {
        fail(check, std::string(side) + " piece " + describe(p.interval) + " has wrong size",
             std::nullopt);
        return;
      }
    }
  };
  check_relation(d.left, a, 1, "left");
  check_relation(d.right, b, 2, "right");

  std::vector<unsigned char> hits(b - a, 0);
  auto mark = [&](const IntInterval& iv) {
    for (WalshIndex x = iv.lo(); x < iv.hi(); ++x) {
      if (x < a || x >= b) {
        fail(4, "element outside [a, b)", x);
        continue;
      }
      if (hits[x - a]++ == 1) fail(3, "element covered twice", x);
    }
  };
  mark(IntInterval(d.anchor, d.anchor + 1));
  for (const auto& p : d.left) mark(p.interval);
  for (const auto& p : d.right) mark(p.interval);
  for (WalshIndex x = a; x < b; ++x) {
    if (hits[x - a] == 0) {
      fail(4, "element not covered", x);
      break;
    }
  }

  std::vector<IntInterval> segment;
  for (const auto& p : d.left) segment.push_back(p.interval);
  std::sort(segment.begin(), segment.end(),
            [](const IntInterval& x, const IntInterval& y) { return x.lo() < y.lo(); });
  WalshIndex end = d.anchor + 1;
  for (const auto& iv : segment) {
    if (iv.lo() != end) {
      fail(5, "anchor and left pieces are not contiguous", end);
      break;
    }
    end = iv.hi();
  }
  return report;
}

std::vector<Decomposition> family_decompose(std::span<const IntInterval> family) {
  std::vector<IntInterval> sorted(family.begin(), family.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const IntInterval& x, const IntInterval& y) { return x.lo() < y.lo(); });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].overlaps(sorted[i])) {
      throw Error(Errc::invalid_family,
                  describe(sorted[i - 1]) + " overlaps " + describe(sorted[i]));
    }
  }

  std::vector<Decomposition> out;
  out.reserve(family.size());
  std::vector<IntInterval> left_pieces;
  for (const auto& iv : family) {
    out.push_back(decompose(iv));
    const auto report = verify_decomposition(out.back(), iv.lo(), iv.hi());
    if (!report.passed) {
      throw std::logic_error("decomposition of " + describe(iv) + " failed: " + report.failure);
    }
    for (const auto& p : out.back().left) left_pieces.push_back(p.interval);
  }

  // a_s + delta_j = J_js must be pairwise disjoint over all (s, j).
  std::sort(left_pieces.begin(), left_pieces.end(),
            [](const IntInterval& x, const IntInterval& y) { return x.lo() < y.lo(); });
  for (std::size_t i = 1; i < left_pieces.size(); ++i) {
    if (left_pieces[i - 1].overlaps(left_pieces[i])) {
      throw std::logic_error("left pieces " + describe(left_pieces[i - 1]) + " and " +
                             describe(left_pieces[i]) + " intersect");
    }
  }
  return out;
}

}  // namespace lpw
