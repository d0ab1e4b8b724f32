#include "lpw/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lpw/error.hpp"

namespace lpw {
namespace {

void check_resolution(unsigned resolution) {
  if (resolution > kMaxResolution) {
    throw Error(Errc::resolution_too_coarse,
                "resolution " + std::to_string(resolution) + " exceeds supported maximum");
  }
}

void check_level(Level k, unsigned resolution) {
  if (k > resolution) {
    throw Error(Errc::level_out_of_range,
                "level " + std::to_string(k) + " above resolution " + std::to_string(resolution));
  }
}

void check_index(WalshIndex n, unsigned resolution) {
  if (resolution < kIndexBits && (n >> resolution) != 0) {
    throw Error(Errc::resolution_too_coarse,
                "w_" + std::to_string(n) + " is not constant on cells of generation " +
                    std::to_string(resolution));
  }
}

template <typename Op>
DyadicFunction pointwise(const DyadicFunction& f, const DyadicFunction& g, Op op) {
  require_same_resolution(f, g);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(f[i], g[i]);
  return DyadicFunction(f.resolution(), std::move(out));
}

}  // namespace

DyadicFunction::DyadicFunction(unsigned resolution) : resolution_(resolution) {
  check_resolution(resolution);
  values_.assign(std::size_t{1} << resolution, 0.0);
}

DyadicFunction::DyadicFunction(unsigned resolution, std::vector<double> values)
    : resolution_(resolution), values_(std::move(values)) {
  check_resolution(resolution);
  if (values_.size() != (std::size_t{1} << resolution)) {
    throw Error(Errc::resolution_mismatch,
                std::to_string(values_.size()) + " values for resolution " +
                    std::to_string(resolution));
  }
}

DyadicFunction DyadicFunction::constant(unsigned resolution, double c) {
  check_resolution(resolution);
  return DyadicFunction(resolution, std::vector<double>(std::size_t{1} << resolution, c));
}

double DyadicFunction::integral() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return std::ldexp(sum, -static_cast<int>(resolution_));
}

DyadicFunction operator+(const DyadicFunction& f, const DyadicFunction& g) {
  return pointwise(f, g, [](double x, double y) { return x + y; });
}

DyadicFunction operator-(const DyadicFunction& f, const DyadicFunction& g) {
  return pointwise(f, g, [](double x, double y) { return x - y; });
}

DyadicFunction operator*(const DyadicFunction& f, const DyadicFunction& g) {
  return pointwise(f, g, [](double x, double y) { return x * y; });
}

DyadicFunction operator*(double c, const DyadicFunction& f) {
  std::vector<double> out(f.values().begin(), f.values().end());
  for (double& v : out) v *= c;
  return DyadicFunction(f.resolution(), std::move(out));
}

double inner(const DyadicFunction& f, const DyadicFunction& g) {
  require_same_resolution(f, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return std::ldexp(sum, -static_cast<int>(f.resolution()));
}

double lp_norm(const DyadicFunction& f, double p) {
  if (!(p >= 1.0)) throw Error(Errc::bad_exponent, "p = " + std::to_string(p));
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(std::ldexp(sum, -static_cast<int>(f.resolution())), 1.0 / p);
}

double max_abs_diff(const DyadicFunction& f, const DyadicFunction& g) {
  require_same_resolution(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

void require_same_resolution(const DyadicFunction& f, const DyadicFunction& g) {
  if (f.resolution() != g.resolution()) {
    throw Error(Errc::resolution_mismatch, std::to_string(f.resolution()) + " vs " +
                                               std::to_string(g.resolution()));
  }
}

Spectrum::Spectrum(unsigned resolution) : resolution_(resolution) {
  check_resolution(resolution);
  coeffs_.assign(std::size_t{1} << resolution, 0.0);
}

Spectrum::Spectrum(unsigned resolution, std::vector<double> coeffs)
    : resolution_(resolution), coeffs_(std::move(coeffs)) {
  check_resolution(resolution);
  if (coeffs_.size() != (std::size_t{1} << resolution)) {
    throw Error(Errc::resolution_mismatch, "spectrum length does not match resolution");
  }
}

Spectrum Spectrum::unit(unsigned resolution, WalshIndex n) {
  check_index(n, resolution);
  Spectrum s(resolution);
  s.coeffs_[n] = 1.0;
  return s;
}

DyadicCell::DyadicCell(Level level, std::uint32_t position) : level(level), position(position) {
  if (level >= kIndexBits || (position >> level) != 0) {
    throw Error(Errc::level_out_of_range, "cell (" + std::to_string(level) + ", " +
                                              std::to_string(position) + ")");
  }
}

double DyadicCell::measure() const noexcept { return std::ldexp(1.0, -static_cast<int>(level)); }

std::uint32_t bit_reverse(std::uint32_t j, unsigned bits) noexcept {
  std::uint32_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (j & 1u);
    j >>= 1;
  }
  return r;
}

void fwht_inplace(std::span<double> data) {
  const std::size_t n = data.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = data[j];
        const double y = data[j + h];
        data[j] = x + y;
        data[j + h] = x - y;
      }
    }
  }
}

DyadicFunction walsh_eval(WalshIndex n, unsigned resolution) {
  check_resolution(resolution);
  check_index(n, resolution);
  std::vector<double> values(std::size_t{1} << resolution);
  for (std::uint32_t j = 0; j < values.size(); ++j) {
    values[j] = walsh_sign(n, resolution, j);
  }
  return DyadicFunction(resolution, std::move(values));
}

// Paley coefficient n is the Hadamard coefficient of the bit-reversed input at n.
Spectrum analyze(const DyadicFunction& f) {
  const unsigned N = f.resolution();
  std::vector<double> work(f.size());
  for (std::uint32_t j = 0; j < work.size(); ++j) work[bit_reverse(j, N)] = f[j];
  fwht_inplace(work);
  const double scale = std::ldexp(1.0, -static_cast<int>(N));
  for (double& c : work) c *= scale;
  return Spectrum(N, std::move(work));
}

DyadicFunction synthesize(const Spectrum& s) {
  const unsigned N = s.resolution();
  std::vector<double> work(s.coeffs().begin(), s.coeffs().end());
  fwht_inplace(work);
  std::vector<double> values(work.size());
  for (std::uint32_t j = 0; j < values.size(); ++j) values[j] = work[bit_reverse(j, N)];
  return DyadicFunction(N, std::move(values));
}

DyadicFunction project(std::span<const WalshIndex> indices, const DyadicFunction& f) {
  for (WalshIndex n : indices) check_index(n, f.resolution());
  const Spectrum s = analyze(f);
  std::vector<double> masked(s.size(), 0.0);
  for (WalshIndex n : indices) masked[n] = s[n];
  return synthesize(Spectrum(f.resolution(), std::move(masked)));
}

DyadicFunction project(const IntInterval& interval, const DyadicFunction& f) {
  return project(interval, analyze(f));
}

DyadicFunction project(const IntInterval& interval, const Spectrum& spectrum) {
  const unsigned N = spectrum.resolution();
  if (interval.hi() - 1 >= spectrum.size()) {
    throw Error(Errc::resolution_too_coarse, "interval reaches beyond 2^N");
  }
  std::vector<double> masked(spectrum.size(), 0.0);
  for (WalshIndex n = interval.lo(); n < interval.hi(); ++n) masked[n] = spectrum[n];
  return synthesize(Spectrum(N, std::move(masked)));
}

DyadicFunction expectation(Level k, const DyadicFunction& f) {
  check_level(k, f.resolution());
  const std::size_t block = std::size_t{1} << (f.resolution() - k);
  std::vector<double> out(f.size());
  for (std::size_t start = 0; start < f.size(); start += block) {
    double sum = 0.0;
    for (std::size_t i = start; i < start + block; ++i) sum += f[i];
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(start), block,
                sum / static_cast<double>(block));
  }
  return DyadicFunction(f.resolution(), std::move(out));
}

DyadicFunction mart_diff(Level k, const DyadicFunction& f) {
  check_level(k, f.resolution());
  if (k == 0) return expectation(0, f);
  return expectation(k, f) - expectation(k - 1, f);
}

std::vector<std::vector<double>> level_averages(const DyadicFunction& f) {
  const unsigned N = f.resolution();
  std::vector<std::vector<double>> avg(N + 1);
  avg[N].assign(f.values().begin(), f.values().end());
  for (unsigned k = N; k-- > 0;) {
    const auto& finer = avg[k + 1];
    avg[k].resize(finer.size() / 2);
    for (std::size_t i = 0; i < avg[k].size(); ++i) {
      avg[k][i] = 0.5 * (finer[2 * i] + finer[2 * i + 1]);
    }
  }
  return avg;
}

DyadicFunction multiply_walsh(WalshIndex a, const DyadicFunction& f) {
  check_index(a, f.resolution());
  std::vector<double> out(f.values().begin(), f.values().end());
  for (std::uint32_t j = 0; j < out.size(); ++j) {
    if (walsh_sign(a, f.resolution(), j) < 0) out[j] = -out[j];
  }
  return DyadicFunction(f.resolution(), std::move(out));
}

DyadicFunction restrict_rescale(const DyadicFunction& f, const DyadicCell& cell) {
  check_level(cell.level, f.resolution());
  const auto first = f.values().begin() + static_cast<std::ptrdiff_t>(cell.first(f.resolution()));
  std::vector<double> out(first, first + static_cast<std::ptrdiff_t>(cell.count(f.resolution())));
  return DyadicFunction(f.resolution() - cell.level, std::move(out));
}

DyadicFunction refine(const DyadicFunction& f, unsigned resolution) {
  check_level(f.resolution(), resolution);
  check_resolution(resolution);
  const std::size_t factor = std::size_t{1} << (resolution - f.resolution());
  std::vector<double> out(f.size() * factor);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i / factor];
  return DyadicFunction(resolution, std::move(out));
}

}  // namespace lpw
