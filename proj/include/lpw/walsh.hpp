#pragma once

// Discrete Walsh analysis on [0,1] at dyadic resolution N. A DyadicFunction
// holds the values on the 2^N cells [j 2^-N, (j+1) 2^-N); a Spectrum holds the
// Paley-ordered Walsh coefficients (f, w_n). Both are exact representations of
// functions whose spectrum lies below 2^N.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpw/dyadic_core.hpp"

namespace lpw {

inline constexpr unsigned kMaxResolution = 24;

class DyadicFunction {
 public:
  DyadicFunction() : DyadicFunction(0u) {}
  /// The zero function at resolution N.
  explicit DyadicFunction(unsigned resolution);
  DyadicFunction(unsigned resolution, std::vector<double> values);

  static DyadicFunction constant(unsigned resolution, double c);

  unsigned resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t cell) const noexcept { return values_[cell]; }

  double integral() const noexcept;

 private:
  unsigned resolution_;
  std::vector<double> values_;
};

DyadicFunction operator+(const DyadicFunction& f, const DyadicFunction& g);
DyadicFunction operator-(const DyadicFunction& f, const DyadicFunction& g);
/// Pointwise product.
DyadicFunction operator*(const DyadicFunction& f, const DyadicFunction& g);
DyadicFunction operator*(double c, const DyadicFunction& f);

/// Integral of f*g over [0,1].
double inner(const DyadicFunction& f, const DyadicFunction& g);
double lp_norm(const DyadicFunction& f, double p);
double max_abs_diff(const DyadicFunction& f, const DyadicFunction& g);
void require_same_resolution(const DyadicFunction& f, const DyadicFunction& g);

class Spectrum {
 public:
  explicit Spectrum(unsigned resolution);
  Spectrum(unsigned resolution, std::vector<double> coeffs);

  /// The spectrum with a single coefficient 1 at n.
  static Spectrum unit(unsigned resolution, WalshIndex n);

  unsigned resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](WalshIndex n) const noexcept { return coeffs_[n]; }

 private:
  unsigned resolution_;
  std::vector<double> coeffs_;
};

/// The dyadic interval [position 2^-level, (position+1) 2^-level).
struct DyadicCell {
  Level level = 0;
  std::uint32_t position = 0;

  DyadicCell() = default;
  DyadicCell(Level level, std::uint32_t position);

  /// First grid cell of resolution N inside this cell.
  std::size_t first(unsigned resolution) const noexcept {
    return std::size_t{position} << (resolution - level);
  }
  std::size_t count(unsigned resolution) const noexcept {
    return std::size_t{1} << (resolution - level);
  }
  double measure() const noexcept;
  bool contains_cell(unsigned resolution, std::size_t cell) const noexcept {
    return (cell >> (resolution - level)) == position;
  }

  friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
};

/// Reverses the low `bits` bits of j.
std::uint32_t bit_reverse(std::uint32_t j, unsigned bits) noexcept;

/// In-place Walsh-Hadamard butterfly in natural (Hadamard) order, unnormalized.
/// The length must be a power of two.
void fwht_inplace(std::span<double> data);

/// +1 or -1: the value of w_n on grid cell `cell` at resolution N.
inline int walsh_sign(WalshIndex n, unsigned resolution, std::uint32_t cell) noexcept {
  return (std::popcount(n & bit_reverse(cell, resolution)) & 1) ? -1 : 1;
}

/// w_n sampled on the 2^N cells. Requires n < 2^N.
DyadicFunction walsh_eval(WalshIndex n, unsigned resolution);

Spectrum analyze(const DyadicFunction& f);
DyadicFunction synthesize(const Spectrum& s);

/// P_A f: keep the coefficients with index in A.
DyadicFunction project(std::span<const WalshIndex> indices, const DyadicFunction& f);
DyadicFunction project(const IntInterval& interval, const DyadicFunction& f);
DyadicFunction project(const IntInterval& interval, const Spectrum& spectrum);

/// E_k f: cell averages over generation k.
DyadicFunction expectation(Level k, const DyadicFunction& f);
/// Delta_k f = E_k f - E_{k-1} f, Delta_0 f = E_0 f.
DyadicFunction mart_diff(Level k, const DyadicFunction& f);

/// averages[k][i] is the mean of f over the i-th cell of generation k, k = 0..N.
std::vector<std::vector<double>> level_averages(const DyadicFunction& f);

/// w_a * f.
DyadicFunction multiply_walsh(WalshIndex a, const DyadicFunction& f);

/// f restricted to I and rescaled to [0,1]; resolution drops by the level of I.
DyadicFunction restrict_rescale(const DyadicFunction& f, const DyadicCell& cell);

/// The same function sampled on a finer grid.
DyadicFunction refine(const DyadicFunction& f, unsigned resolution);

}  // namespace lpw
