#include "lpw/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "lpw/error.hpp"
#include "lpw/operators.hpp"

namespace lpw {
namespace {

void require_p(double p) {
  if (!(p >= 1.0)) throw Error(Errc::bad_exponent, "p = " + std::to_string(p));
}

void require_finite_p(double p) {
  require_p(p);
  if (std::isinf(p)) throw Error(Errc::bad_exponent, "Rad norms need a finite exponent");
}

// E ||sum_s sigma_s x_s||^p over the chosen sign distribution, on component-major
// coefficients of S components of dimension d.
class RadAverager {
 public:
  RadAverager(std::size_t S, std::size_t d, double q, double p, const RadMode& mode)
      : S_(S), d_(d), q_(q), p_(p), mode_(mode), sum_(d) {
    require_finite_p(p);
    require_lattice_exponent(q);
    if (mode.kind == RadMode::Kind::exact) {
      if (S > kMaxExactSigns) {
        throw Error(Errc::bad_mode, std::to_string(S) + " components exceed exact enumeration");
      }
      return;
    }
    if (mode.samples == 0) throw Error(Errc::bad_mode, "Monte Carlo needs at least one sample");
    // One shared set of sign draws for every cell; raw engine bits keep it portable.
    std::mt19937_64 engine(mode.seed);
    signs_.resize(mode.samples * S);
    std::uint64_t word = 0;
    unsigned left = 0;
    for (auto& s : signs_) {
      if (left == 0) {
        word = engine();
        left = 64;
      }
      s = (word & 1u) ? -1 : 1;
      word >>= 1;
      --left;
    }
  }

  double mean_power(std::span<const double> coeffs) {
    if (S_ == 0) return 0.0;
    return mode_.kind == RadMode::Kind::exact ? exact(coeffs) : sampled(coeffs);
  }

 private:
  double power(std::span<const double> v) const { return std::pow(lattice_norm(v, q_), p_); }

  // The sign distribution is symmetric, so sigma_0 = +1 is fixed and the
  // remaining S - 1 signs are walked in Gray-code order.
  double exact(std::span<const double> coeffs) {
    std::fill(sum_.begin(), sum_.end(), 0.0);
    for (std::size_t s = 0; s < S_; ++s) {
      for (std::size_t c = 0; c < d_; ++c) sum_[c] += coeffs[s * d_ + c];
    }
    flipped_.assign(S_, false);
    double acc = power(sum_);
    const std::uint64_t count = std::uint64_t{1} << (S_ - 1);
    for (std::uint64_t i = 1; i < count; ++i) {
      const std::size_t s = static_cast<std::size_t>(std::countr_zero(i)) + 1;
      const double factor = flipped_[s] ? 2.0 : -2.0;
      flipped_[s] = !flipped_[s];
      for (std::size_t c = 0; c < d_; ++c) sum_[c] += factor * coeffs[s * d_ + c];
      acc += power(sum_);
    }
    return acc / static_cast<double>(count);
  }

  double sampled(std::span<const double> coeffs) {
    double acc = 0.0;
    for (std::size_t m = 0; m < mode_.samples; ++m) {
      std::fill(sum_.begin(), sum_.end(), 0.0);
      const int* sigma = &signs_[m * S_];
      for (std::size_t s = 0; s < S_; ++s) {
        for (std::size_t c = 0; c < d_; ++c) sum_[c] += sigma[s] * coeffs[s * d_ + c];
      }
      acc += power(sum_);
    }
    return acc / static_cast<double>(mode_.samples);
  }

  std::size_t S_;
  std::size_t d_;
  double q_;
  double p_;
  RadMode mode_;
  std::vector<double> sum_;
  std::vector<bool> flipped_;
  std::vector<int> signs_;
};

void require_same_shape(std::span<const LatticeFunction> fs) {
  for (std::size_t s = 1; s < fs.size(); ++s) require_compatible(fs[0], fs[s]);
}

LatticeFunction stopped_average(const LatticeFunction& g, std::span<const DyadicCell> cells) {
  std::vector<double> out(g.values().begin(), g.values().end());
  const std::size_t d = g.dim();
  for (const auto& q : cells) {
    const std::size_t first = q.first(g.resolution());
    const std::size_t count = q.count(g.resolution());
    for (std::size_t c = 0; c < d; ++c) {
      double sum = 0.0;
      for (std::size_t j = first; j < first + count; ++j) sum += g.values()[j * d + c];
      const double mean = sum / static_cast<double>(count);
      for (std::size_t j = first; j < first + count; ++j) out[j * d + c] = mean;
    }
  }
  return LatticeFunction(g.resolution(), d, g.q(), std::move(out));
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || std::isinf(lambda)) {
    throw Error(Errc::bad_threshold, "lambda = " + std::to_string(lambda));
  }
}

}  // namespace

double lattice_norm(std::span<const double> coords, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : coords) m = std::max(m, std::abs(v));
    return m;
  }
  if (q == 1.0) {
    double s = 0.0;
    for (double v : coords) s += std::abs(v);
    return s;
  }
  if (q == 2.0) {
    double s = 0.0;
    for (double v : coords) s += v * v;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double v : coords) s += std::pow(std::abs(v), q);
  return std::pow(s, 1.0 / q);
}

void require_lattice_exponent(double q) {
  if (!(q >= 1.0)) throw Error(Errc::bad_exponent, "lattice exponent q = " + std::to_string(q));
}

LatticePoint::LatticePoint(std::vector<double> coords, double q) : coords_(std::move(coords)), q_(q) {
  require_lattice_exponent(q);
}

LatticeFunction::LatticeFunction(unsigned resolution, std::size_t dim, double q)
    : LatticeFunction(resolution, dim, q,
                      std::vector<double>((std::size_t{1} << resolution) * dim, 0.0)) {}

LatticeFunction::LatticeFunction(unsigned resolution, std::size_t dim, double q,
                                 std::vector<double> values)
    : resolution_(resolution), dim_(dim), q_(q), values_(std::move(values)) {
  require_lattice_exponent(q);
  if (resolution > kMaxResolution) {
    throw Error(Errc::resolution_too_coarse, "resolution " + std::to_string(resolution));
  }
  if (dim == 0) throw Error(Errc::dimension_mismatch, "lattice dimension must be positive");
  if (values_.size() != (std::size_t{1} << resolution) * dim) {
    throw Error(Errc::resolution_mismatch, "value count does not match 2^N * d");
  }
}

LatticeFunction LatticeFunction::from_coordinates(std::span<const DyadicFunction> coords, double q) {
  if (coords.empty()) throw Error(Errc::dimension_mismatch, "no coordinates");
  const unsigned N = coords[0].resolution();
  const std::size_t d = coords.size();
  std::vector<double> values(coords[0].size() * d);
  for (std::size_t c = 0; c < d; ++c) {
    require_same_resolution(coords[0], coords[c]);
    for (std::size_t j = 0; j < coords[c].size(); ++j) values[j * d + c] = coords[c][j];
  }
  return LatticeFunction(N, d, q, std::move(values));
}

DyadicFunction LatticeFunction::coordinate(std::size_t c) const {
  if (c >= dim_) throw Error(Errc::dimension_mismatch, "coordinate " + std::to_string(c));
  std::vector<double> out(cells());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = values_[j * dim_ + c];
  return DyadicFunction(resolution_, std::move(out));
}

std::vector<DyadicFunction> LatticeFunction::coordinates() const {
  std::vector<DyadicFunction> out;
  out.reserve(dim_);
  for (std::size_t c = 0; c < dim_; ++c) out.push_back(coordinate(c));
  return out;
}

DyadicFunction LatticeFunction::pointwise_norm() const {
  std::vector<double> out(cells());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lattice_norm(cell(j), q_);
  return DyadicFunction(resolution_, std::move(out));
}

void require_compatible(const LatticeFunction& f, const LatticeFunction& g) {
  if (f.resolution() != g.resolution()) {
    throw Error(Errc::resolution_mismatch, std::to_string(f.resolution()) + " vs " +
                                               std::to_string(g.resolution()));
  }
  if (f.dim() != g.dim() || f.q() != g.q()) {
    throw Error(Errc::dimension_mismatch, "lattices differ in dimension or exponent");
  }
}

LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g) {
  require_compatible(f, g);
  std::vector<double> out(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += g.values()[i];
  return LatticeFunction(f.resolution(), f.dim(), f.q(), std::move(out));
}

LatticeFunction operator-(const LatticeFunction& f, const LatticeFunction& g) {
  require_compatible(f, g);
  std::vector<double> out(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= g.values()[i];
  return LatticeFunction(f.resolution(), f.dim(), f.q(), std::move(out));
}

double lp_x_norm(const LatticeFunction& f, double p) {
  return lp_norm(f.pointwise_norm(), p);
}

double x_l2_norm(std::span<const LatticePoint> xs) {
  if (xs.empty()) return 0.0;
  const std::size_t d = xs[0].dim();
  std::vector<double> sq(d, 0.0);
  for (const auto& x : xs) {
    if (x.dim() != d || x.q() != xs[0].q()) {
      throw Error(Errc::dimension_mismatch, "X(l2) elements live in different lattices");
    }
    for (std::size_t c = 0; c < d; ++c) sq[c] += x.coords()[c] * x.coords()[c];
  }
  for (double& v : sq) v = std::sqrt(v);
  return lattice_norm(sq, xs[0].q());
}

RadElement::RadElement(std::span<const LatticePoint> components)
    : dim_(components.empty() ? 1 : components[0].dim()),
      q_(components.empty() ? 2.0 : components[0].q()) {
  for (const auto& x : components) {
    if (x.q() != q_) throw Error(Errc::dimension_mismatch, "components in different lattices");
    push_back(x.coords());
  }
}

void RadElement::push_back(std::span<const double> coords) {
  if (coords.size() != dim_) {
    throw Error(Errc::dimension_mismatch, "component of dimension " + std::to_string(coords.size()));
  }
  coeffs_.insert(coeffs_.end(), coords.begin(), coords.end());
}

RadMode RadMode::parse(const std::string& text, std::uint64_t seed) {
  if (text == "exact") return exact();
  if (text.rfind("mc:", 0) == 0) {
    std::size_t used = 0;
    long long m = 0;
    try {
      m = std::stoll(text.substr(3), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 3 || m <= 0) {
      throw Error(Errc::bad_mode, "cannot parse sample count in '" + text + "'");
    }
    return montecarlo(static_cast<std::size_t>(m), seed);
  }
  throw Error(Errc::bad_mode, "unknown Rad mode '" + text + "'");
}

std::string RadMode::to_string() const {
  return kind == Kind::exact ? "exact" : "mc:" + std::to_string(samples);
}

double rad_norm(const RadElement& e, double p, const RadMode& mode) {
  RadAverager avg(e.size(), e.dim(), e.q(), p, mode);
  return std::pow(avg.mean_power(e.coeffs()), 1.0 / p);
}

double lp_radx_norm(std::span<const LatticeFunction> components, double p, const RadMode& mode) {
  require_finite_p(p);
  if (components.empty()) return 0.0;
  require_same_shape(components);
  const auto& first = components[0];
  const std::size_t S = components.size();
  const std::size_t d = first.dim();
  RadAverager avg(S, d, first.q(), p, mode);
  std::vector<double> buffer(S * d);
  double total = 0.0;
  for (std::size_t j = 0; j < first.cells(); ++j) {
    for (std::size_t s = 0; s < S; ++s) {
      const auto v = components[s].cell(j);
      std::copy(v.begin(), v.end(), buffer.begin() + static_cast<std::ptrdiff_t>(s * d));
    }
    total += avg.mean_power(buffer);
  }
  return std::pow(total / static_cast<double>(first.cells()), 1.0 / p);
}

std::vector<Level> t_levels(const Decomposition& d) {
  auto levels = d.left_levels();
  levels.insert(levels.begin(), 0);
  return levels;
}

std::vector<LatticeFunction> apply_t(const LatticeFunction& f,
                                     std::span<const Decomposition> decomps) {
  const auto coords = f.coordinates();
  std::vector<LatticeFunction> out;
  out.reserve(decomps.size());
  std::vector<DyadicFunction> parts(coords.size());
  for (const auto& d : decomps) {
    const auto levels = t_levels(d);
    for (std::size_t c = 0; c < coords.size(); ++c) parts[c] = block_sum(coords[c], d.anchor, levels);
    out.push_back(LatticeFunction::from_coordinates(parts, f.q()));
  }
  return out;
}

LatticeFunction apply_t_star(std::span<const LatticeFunction> gs,
                             std::span<const Decomposition> decomps) {
  if (gs.size() != decomps.size() || gs.empty()) {
    throw Error(Errc::dimension_mismatch, std::to_string(gs.size()) + " components for " +
                                              std::to_string(decomps.size()) + " intervals");
  }
  require_same_shape(gs);
  const unsigned N = gs[0].resolution();
  std::vector<DyadicFunction> acc(gs[0].dim(), DyadicFunction(N));
  for (std::size_t s = 0; s < gs.size(); ++s) {
    const auto levels = t_levels(decomps[s]);
    for (std::size_t c = 0; c < acc.size(); ++c) {
      acc[c] = acc[c] + multiply_walsh(decomps[s].anchor, block_sum(gs[s].coordinate(c), 0, levels));
    }
  }
  return LatticeFunction::from_coordinates(acc, gs[0].q());
}

std::vector<DyadicCell> stopping_cells(const DyadicFunction& norms, double lambda) {
  require_lambda(lambda);
  const unsigned N = norms.resolution();
  const auto avg = level_averages(norms);
  std::vector<DyadicCell> cells;
  // Depth-first, left child first, so cells come out in spatial order.
  std::vector<DyadicCell> stack{DyadicCell(0, 0)};
  while (!stack.empty()) {
    const DyadicCell cell = stack.back();
    stack.pop_back();
    if (avg[cell.level][cell.position] > lambda) {
      cells.push_back(cell);
    } else if (cell.level < N) {
      stack.emplace_back(cell.level + 1, 2 * cell.position + 1);
      stack.emplace_back(cell.level + 1, 2 * cell.position);
    }
  }
  return cells;
}

std::vector<char> exceptional_set(std::span<const DyadicCell> cells, unsigned resolution, Level n) {
  std::vector<char> mask(std::size_t{1} << resolution, 0);
  for (const auto& q : cells) {
    if (q.level + 1 > n) continue;
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(q.first(resolution)), q.count(resolution), 1);
  }
  return mask;
}

double union_measure(std::span<const DyadicCell> cells) {
  double m = 0.0;
  for (const auto& q : cells) m += q.measure();
  return m;
}

CZResult cz_decompose(const LatticeFunction& g, double lambda) {
  require_lambda(lambda);
  auto cells = stopping_cells(g.pointwise_norm(), lambda);
  LatticeFunction good = stopped_average(g, cells);
  LatticeFunction bad = g - good;
  return {std::move(good), std::move(bad), std::move(cells), lambda};
}

DyadicFunction rad_pointwise_norm(std::span<const LatticeFunction> gs, double p,
                                  const RadMode& mode) {
  if (gs.empty()) throw Error(Errc::dimension_mismatch, "no components");
  require_same_shape(gs);
  const std::size_t S = gs.size();
  const std::size_t d = gs[0].dim();
  RadAverager avg(S, d, gs[0].q(), p, mode);
  std::vector<double> buffer(S * d);
  std::vector<double> norms(gs[0].cells());
  for (std::size_t j = 0; j < norms.size(); ++j) {
    for (std::size_t s = 0; s < S; ++s) {
      const auto v = gs[s].cell(j);
      std::copy(v.begin(), v.end(), buffer.begin() + static_cast<std::ptrdiff_t>(s * d));
    }
    norms[j] = std::pow(avg.mean_power(buffer), 1.0 / p);
  }
  return DyadicFunction(gs[0].resolution(), std::move(norms));
}

CZRadResult cz_decompose_rad(std::span<const LatticeFunction> gs, double lambda, double p,
                             const RadMode& mode) {
  require_lambda(lambda);
  CZRadResult r{{}, {}, stopping_cells(rad_pointwise_norm(gs, p, mode), lambda), lambda};
  for (const auto& g : gs) {
    r.good.push_back(stopped_average(g, r.cells));
    r.bad.push_back(g - r.good.back());
  }
  return r;
}

CZReport check_cz(const LatticeFunction& g, const CZResult& r) {
  require_compatible(g, r.good);
  require_compatible(g, r.bad);
  CZReport report;
  auto add = [&report](std::string name, double value, double bound) {
    const bool ok = value <= bound;
    report.checks.push_back({std::move(name), value, bound, ok});
    report.passed = report.passed && ok;
  };
  const unsigned N = g.resolution();
  const double g_l1 = lp_x_norm(g, 1.0);
  report.root_stopped = r.cells.size() == 1 && r.cells[0].level == 0;

  // b is formed as g - h, so b + h reproduces g up to one rounding of each sum.
  double recon = 0.0;
  for (std::size_t i = 0; i < g.values().size(); ++i) {
    const double gi = g.values()[i];
    const double hi = r.good.values()[i];
    const double err = std::abs(gi - (r.bad.values()[i] + hi));
    const double scale = std::max({1.0, std::abs(gi), std::abs(hi)});
    recon = std::max(recon, err / scale);
  }
  add("reconstruction", recon, 4.0 * std::numeric_limits<double>::epsilon());

  const double h_sup = lp_x_norm(r.good, std::numeric_limits<double>::infinity());
  add("good_sup", h_sup, report.root_stopped ? g_l1 * (1.0 + 1e-12) : 2.0 * r.lambda);
  add("good_l1", lp_x_norm(r.good, 1.0), g_l1 * (1.0 + 1e-12));

  const auto bad_coords = r.bad.coordinates();
  double mean = 0.0;
  for (const auto& b : bad_coords) mean = std::max(mean, std::abs(b.integral()));
  add("bad_mean", mean, 1e-10);

  double leak = 0.0;
  for (Level n = 1; n <= N; ++n) {
    const auto mask = exceptional_set(r.cells, N, n);
    for (const auto& b : bad_coords) {
      const DyadicFunction diff = mart_diff(n, b);
      for (std::size_t j = 0; j < mask.size(); ++j) {
        if (!mask[j]) leak = std::max(leak, std::abs(diff[j]));
      }
    }
  }
  add("bad_localized", leak, 1e-10);
  add("exceptional_measure", union_measure(r.cells), g_l1 / r.lambda);
  return report;
}

}  // namespace lpw
