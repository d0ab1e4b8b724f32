#include "lpw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "lpw/error.hpp"

namespace lpw {

SeqFunction::SeqFunction(unsigned resolution, std::vector<DyadicFunction> components)
    : resolution_(resolution), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.resolution() != resolution_) {
      throw Error(Errc::resolution_mismatch, "component at resolution " +
                                                 std::to_string(c.resolution()));
    }
  }
}

void SeqFunction::push_back(DyadicFunction component) {
  if (component.resolution() != resolution_) {
    throw Error(Errc::resolution_mismatch,
                "component at resolution " + std::to_string(component.resolution()));
  }
  components_.push_back(std::move(component));
}

DyadicFunction block_sum(const DyadicFunction& f, WalshIndex a, std::span<const Level> levels) {
  const unsigned N = f.resolution();
  std::vector<bool> wanted(N + 1, false);
  for (Level j : levels) {
    if (j > N) {
      throw Error(Errc::level_out_of_range,
                  "level " + std::to_string(j) + " above resolution " + std::to_string(N));
    }
    wanted[j] = true;
  }
  const auto avg = level_averages(multiply_walsh(a, f));

  std::vector<double> out(f.size(), 0.0);
  for (Level j = 0; j <= N; ++j) {
    if (!wanted[j]) continue;
    const unsigned shift = N - j;
    for (std::size_t x = 0; x < out.size(); ++x) {
      double d = avg[j][x >> shift];
      if (j > 0) d -= avg[j - 1][x >> (shift + 1)];
      out[x] += d;
    }
  }
  return DyadicFunction(N, std::move(out));
}

SeqFunction apply_g(const DyadicFunction& f, std::span<const Decomposition> decomps) {
  SeqFunction g(f.resolution());
  for (const auto& d : decomps) {
    const auto levels = d.left_levels();
    g.push_back(block_sum(f, d.anchor, levels));
  }
  return g;
}

// Chan-style merge: the squared deviation of a parent is the sum over its
// halves plus n/4 times the squared difference of the half means.
std::vector<double> cell_oscillation(const SeqFunction& g) {
  const unsigned N = g.resolution();
  const std::size_t nodes = (std::size_t{2} << N) - 1;
  std::vector<double> between(nodes, 0.0);
  std::vector<double> means;
  for (const auto& component : g.components()) {
    means.assign(component.values().begin(), component.values().end());
    for (unsigned m = N; m-- > 0;) {
      const double leaves = std::ldexp(1.0, static_cast<int>(N - m));
      const std::size_t cells = std::size_t{1} << m;
      for (std::size_t i = 0; i < cells; ++i) {
        const double diff = means[2 * i] - means[2 * i + 1];
        between[tree_node(m, i)] += 0.25 * leaves * diff * diff;
        means[i] = 0.5 * (means[2 * i] + means[2 * i + 1]);
      }
    }
  }

  std::vector<double> sq(nodes, 0.0);
  for (unsigned m = N; m-- > 0;) {
    const std::size_t cells = std::size_t{1} << m;
    for (std::size_t i = 0; i < cells; ++i) {
      sq[tree_node(m, i)] =
          between[tree_node(m, i)] + sq[tree_node(m + 1, 2 * i)] + sq[tree_node(m + 1, 2 * i + 1)];
    }
  }
  for (unsigned m = 0; m <= N; ++m) {
    const double leaves = std::ldexp(1.0, static_cast<int>(N - m));
    const std::size_t cells = std::size_t{1} << m;
    for (std::size_t i = 0; i < cells; ++i) sq[tree_node(m, i)] /= leaves;
  }
  return sq;
}

namespace {

// Top-down running maximum of per-node values; returns the value at each leaf.
std::vector<double> sup_over_ancestors(unsigned N, const std::vector<double>& node_values) {
  std::vector<double> best(node_values);
  for (unsigned m = 1; m <= N; ++m) {
    const std::size_t cells = std::size_t{1} << m;
    for (std::size_t i = 0; i < cells; ++i) {
      best[tree_node(m, i)] = std::max(best[tree_node(m, i)], best[tree_node(m - 1, i / 2)]);
    }
  }
  const auto first_leaf = best.begin() + static_cast<std::ptrdiff_t>(tree_node(N, 0));
  return std::vector<double>(first_leaf, best.end());
}

std::vector<double> node_averages(const DyadicFunction& f) {
  const unsigned N = f.resolution();
  std::vector<double> nodes((std::size_t{2} << N) - 1);
  const auto avg = level_averages(f);
  for (unsigned m = 0; m <= N; ++m) {
    std::copy(avg[m].begin(), avg[m].end(),
              nodes.begin() + static_cast<std::ptrdiff_t>(tree_node(m, 0)));
  }
  return nodes;
}

}  // namespace

DyadicFunction sharp_maximal(const SeqFunction& g) {
  auto leaves = sup_over_ancestors(g.resolution(), cell_oscillation(g));
  for (double& v : leaves) v = std::sqrt(std::max(v, 0.0));
  return DyadicFunction(g.resolution(), std::move(leaves));
}

DyadicFunction maximal(const DyadicFunction& f) {
  std::vector<double> abs_values(f.values().begin(), f.values().end());
  for (double& v : abs_values) v = std::abs(v);
  const DyadicFunction abs_f(f.resolution(), std::move(abs_values));
  return DyadicFunction(f.resolution(), sup_over_ancestors(f.resolution(), node_averages(abs_f)));
}

DyadicFunction maximal2(const DyadicFunction& f) {
  const DyadicFunction m = maximal(f * f);
  std::vector<double> out(m.values().begin(), m.values().end());
  for (double& v : out) v = std::sqrt(v);
  return DyadicFunction(f.resolution(), std::move(out));
}

DyadicFunction square_function(const SeqFunction& g) {
  const unsigned N = g.resolution();
  std::vector<double> sum(std::size_t{1} << N, 0.0);
  for (const auto& component : g.components()) {
    const auto avg = level_averages(component);
    for (Level j = 1; j <= N; ++j) {
      const unsigned shift = N - j;
      for (std::size_t x = 0; x < sum.size(); ++x) {
        const double d = avg[j][x >> shift] - avg[j - 1][x >> (shift + 1)];
        sum[x] += d * d;
      }
    }
  }
  for (double& v : sum) v = std::sqrt(v);
  return DyadicFunction(N, std::move(sum));
}

}  // namespace lpw
