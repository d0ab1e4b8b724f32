#pragma once

// Dyadic operators on scalar and l2-valued functions. Block sums of
// martingale differences feed G; the maximal functions measure its output.

#include <span>
#include <vector>

#include "lpw/decomposition.hpp"
#include "lpw/walsh.hpp"

namespace lpw {

/// An l2-valued function: finitely many scalar components on a common grid.
class SeqFunction {
 public:
  explicit SeqFunction(unsigned resolution) : resolution_(resolution) {}
  SeqFunction(unsigned resolution, std::vector<DyadicFunction> components);

  unsigned resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  const DyadicFunction& operator[](std::size_t s) const { return components_[s]; }
  std::span<const DyadicFunction> components() const noexcept { return components_; }

  void push_back(DyadicFunction component);

 private:
  unsigned resolution_;
  std::vector<DyadicFunction> components_;
};

/// sum over j in `levels` of Delta_j(w_a f). Duplicate levels count once.
DyadicFunction block_sum(const DyadicFunction& f, WalshIndex a, std::span<const Level> levels);

/// Gf: component s is block_sum(f, a_s, Theta_s) over the left pieces of decomposition s.
SeqFunction apply_g(const DyadicFunction& f, std::span<const Decomposition> decomps);

/// Heap-ordered tree of dyadic cells: node (m, i) lives at 2^m - 1 + i.
inline std::size_t tree_node(Level m, std::size_t position) noexcept {
  return (std::size_t{1} << m) - 1 + position;
}

/// For every dyadic cell I of level 0..N, the mean over I of ||g - g_I||^2,
/// summed over components, in tree_node order.
std::vector<double> cell_oscillation(const SeqFunction& g);

/// g^#(x) = sup over dyadic I containing x of (avg_I ||g - g_I||^2)^(1/2).
DyadicFunction sharp_maximal(const SeqFunction& g);

/// Dyadic Hardy-Littlewood maximal function of |f|.
DyadicFunction maximal(const DyadicFunction& f);

/// M_2 f = (M |f|^2)^(1/2).
DyadicFunction maximal2(const DyadicFunction& f);

/// (sum_n sum_{j=1..N} |Delta_j g_n|^2)^(1/2). The E_0 term is excluded.
DyadicFunction square_function(const SeqFunction& g);

}  // namespace lpw
