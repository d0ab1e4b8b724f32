// verify-identities: worst-case residuals of the exact identities behind the
// scalar argument, over seeded random instances.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "lpw/error.hpp"
#include "lpw/experiments.hpp"
#include "lpw/operators.hpp"
#include "lpw/decomposition.hpp"
#include "lpw/parallel.hpp"

namespace lpw {
namespace {

constexpr double kTol = 1e-10;
constexpr unsigned kNaiveTransformLimit = 10;
constexpr unsigned kTruncationLimit = 8;

// (f, w_n) by direct summation.
double naive_coefficient(const DyadicFunction& f, WalshIndex n) {
  double sum = 0.0;
  for (std::uint32_t j = 0; j < f.size(); ++j) sum += f[j] * walsh_sign(n, f.resolution(), j);
  return std::ldexp(sum, -static_cast<int>(f.resolution()));
}

DyadicFunction union_projection(const std::vector<Piece>& pieces, const DyadicFunction& f) {
  std::vector<WalshIndex> indices;
  for (const auto& p : pieces) {
    for (WalshIndex n = p.interval.lo(); n < p.interval.hi(); ++n) indices.push_back(n);
  }
  return project(indices, f);
}

using Residuals = std::map<std::string, double>;

void record(Residuals& r, const std::string& name, double value) {
  auto [it, inserted] = r.emplace(name, value);
  if (!inserted) it->second = std::max(it->second, value);
}

Residuals one_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const unsigned N = cfg.resolution;
  const std::size_t cells = std::size_t{1} << N;
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<WalshIndex> index(0, static_cast<WalshIndex>(cells - 1));
  Residuals res;

  const auto f = random_function(derive_seed(seed, 0), N, FunctionPolicy::parse("gaussian"));

  const WalshIndex n1 = index(engine);
  const WalshIndex n2 = index(engine);
  record(res, "walsh_multiplicativity",
         max_abs_diff(walsh_eval(n1, N) * walsh_eval(n2, N), walsh_eval(dyadic_plus(n1, n2), N)));

  const Spectrum spectrum = analyze(f);
  if (N <= kNaiveTransformLimit) {
    double worst = 0.0;
    for (WalshIndex n = 0; n < cells; ++n) {
      worst = std::max(worst, std::abs(spectrum[n] - naive_coefficient(f, n)));
    }
    record(res, "transform_vs_naive", worst);
  }
  record(res, "round_trip", max_abs_diff(synthesize(spectrum), f));
  double energy = 0.0;
  for (double c : spectrum.coeffs()) energy += c * c;
  record(res, "plancherel", std::abs(energy - inner(f, f)));

  DyadicFunction telescoped(N);
  double block_forms = 0.0;
  double constancy = 0.0;
  for (Level k = 0; k <= N; ++k) {
    const auto dk = mart_diff(k, f);
    telescoped = telescoped + dk;
    const auto block = delta_block(k).elements();
    block_forms = std::max(block_forms, max_abs_diff(dk, project(block, f)));
    const std::size_t width = std::size_t{1} << (N - k);
    for (std::size_t start = 0; start < cells; start += width) {
      for (std::size_t x = start; x < start + width; ++x) {
        constancy = std::max(constancy, std::abs(dk[x] - dk[start]));
      }
    }
  }
  record(res, "telescoping", max_abs_diff(telescoped, f));
  record(res, "mart_diff_spectral", block_forms);
  record(res, "constancy", constancy);

  if (N >= 1) {
    // Locality and rescaling on a random cell of level m < N.
    std::uniform_int_distribution<Level> level(0, N - 1);
    const Level m = level(engine);
    std::uniform_int_distribution<std::uint32_t> pos(0, (1u << m) - 1);
    const DyadicCell cell(m, pos(engine));
    const WalshIndex a = index(engine);

    std::vector<double> perturbed(f.values().begin(), f.values().end());
    std::normal_distribution<double> normal;
    for (std::size_t x = 0; x < cells; ++x) {
      if (!cell.contains_cell(N, x)) perturbed[x] += normal(engine);
    }
    const DyadicFunction g(N, std::move(perturbed));

    const auto wf = multiply_walsh(a, f);
    const auto local = restrict_rescale(f, cell);
    const WalshIndex low = a & ((WalshIndex{1} << m) - 1);
    const double sign = walsh_sign(low, m, cell.position);
    const auto w_local = multiply_walsh(a >> m, local);
    double locality = 0.0;
    double rescaling = 0.0;
    for (Level j = m + 1; j <= N; ++j) {
      locality = std::max(locality, max_abs_diff(restrict_rescale(mart_diff(j, f), cell),
                                                  restrict_rescale(mart_diff(j, g), cell)));
      rescaling = std::max(rescaling, max_abs_diff(restrict_rescale(mart_diff(j, wf), cell),
                                                   sign * mart_diff(j - m, w_local)));
    }
    record(res, "locality", locality);
    record(res, "rescaling", rescaling);
  }

  // Family-level identities.
  const auto family = random_interval_family(derive_seed(seed, 1), N, cfg.count, cfg.family);
  const auto decomps = family_decompose(family);
  double left_identity = 0.0;
  double right_identity = 0.0;
  double bessel = -inner(f, f);
  for (const auto& d : decomps) {
    left_identity = std::max(
        left_identity, max_abs_diff(union_projection(d.left, f),
                                    multiply_walsh(d.anchor, block_sum(f, d.anchor, d.left_levels()))));
    // b may equal 2^N, where w_b needs one more generation.
    const unsigned M = (d.upper >> N) != 0 ? N + 1 : N;
    const auto fine = refine(f, M);
    right_identity = std::max(
        right_identity,
        max_abs_diff(union_projection(d.right, fine),
                     multiply_walsh(d.upper, block_sum(fine, d.upper, d.right_levels()))));
    const auto piece = project(d.interval(), spectrum);
    bessel += inner(piece, piece);
  }
  record(res, "projection_identity_left", left_identity);
  record(res, "projection_identity_right", right_identity);
  record(res, "orthogonality_p2", std::max(bessel, 0.0));

  const SeqFunction gf = apply_g(f, decomps);
  const auto sharp = sharp_maximal(gf);
  const auto m2 = maximal2(f);
  double key = 0.0;
  for (std::size_t x = 0; x < cells; ++x) key = std::max(key, sharp[x] - m2[x]);
  record(res, "key_estimate", key);
  double mean = 0.0;
  for (const auto& c : gf.components()) mean = std::max(mean, std::abs(c.integral()));
  record(res, "g_mean_zero", mean);

  if (N <= kTruncationLimit) {
    // The mean of sum_{j in Theta} Delta_j(w_a f) over I only sees j with 2^j <= |I|^-1.
    double truncation = 0.0;
    for (const auto& d : decomps) {
      const auto wf = multiply_walsh(d.anchor, f);
      std::vector<DyadicFunction> parts;
      for (Level j : d.left_levels()) parts.push_back(mart_diff(j, wf));
      for (Level m = 0; m <= N; ++m) {
        for (std::uint32_t i = 0; i < (1u << m); ++i) {
          const DyadicCell cell(m, i);
          double full = 0.0;
          double truncated = 0.0;
          const auto levels = d.left_levels();
          for (std::size_t t = 0; t < levels.size(); ++t) {
            const double avg = restrict_rescale(parts[t], cell).integral();
            full += avg;
            if (levels[t] <= m) truncated += avg;
          }
          truncation = std::max(truncation, std::abs(full - truncated));
        }
      }
    }
    record(res, "truncation", truncation);
  }
  return res;
}

}  // namespace

Report run_verify_identities(const ExperimentConfig& cfg) {
  Report report{cfg, {}, {}, {}, Json::object()};
  std::vector<Residuals> per_trial(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    per_trial[t] = one_trial(cfg, derive_seed(cfg.seed, t));
  });

  std::map<std::string, AssertedBound> merged;
  for (const auto& res : per_trial) {
    for (const auto& [name, value] : res) {
      auto& b = merged.try_emplace(name, AssertedBound{name, 0.0, kTol, 0}).first->second;
      if (name == "walsh_multiplicativity") b.bound = 0.0;
      b.worst = std::max(b.worst, value);
      if (!(value <= b.bound)) ++b.failures;
    }
  }
  Json residuals = Json::object();
  for (auto& [name, b] : merged) {
    residuals[name] = b.worst;
    report.asserted.push_back(std::move(b));
  }
  report.payload = {{"worst_residuals", residuals}};
  return report;
}

}  // namespace lpw
