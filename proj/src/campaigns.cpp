// Randomized campaigns: one function per CLI subcommand.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "lpw/error.hpp"
#include "lpw/experiments.hpp"
#include "lpw/operators.hpp"
#include "lpw/decomposition.hpp"
#include "lpw/parallel.hpp"

namespace lpw {
namespace {

constexpr double kIdentityTol = 1e-10;

template <typename TrialFn>
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, TrialFn&& fn) {
  std::vector<TrialRecord> out(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    TrialRecord r;
    r.index = t;
    r.seed = derive_seed(cfg.seed, t);
    fn(r);
    out[t] = std::move(r);
  });
  return out;
}

template <typename Getter>
AssertedBound tally(std::string name, const std::vector<TrialRecord>& trials, double bound,
                    Getter get) {
  AssertedBound b{std::move(name), 0.0, bound, 0};
  for (const auto& t : trials) {
    const double v = get(t);
    if (!(v <= bound)) ++b.failures;
    b.worst = std::max(b.worst, v);
  }
  return b;
}

AssertedBound finiteness(const std::vector<TrialRecord>& trials) {
  AssertedBound b{"finite_ratio", 0.0, std::numeric_limits<double>::max(), 0};
  for (const auto& t : trials) {
    if (!std::isfinite(t.ratio)) ++b.failures;
    b.worst = std::max(b.worst, t.ratio);
  }
  return b;
}

Json family_json(const std::vector<IntInterval>& family) {
  Json out = Json::array();
  for (const auto& iv : family) out.push_back({iv.lo(), iv.hi()});
  return out;
}

void require_lpr_regime(const ExperimentConfig& cfg) {
  if (!(cfg.p >= 1.0)) throw Error(Errc::bad_exponent, "p = " + std::to_string(cfg.p));
  if (cfg.p < 2.0 && !cfg.report_only) {
    throw Error(Errc::bad_regime, "the inequality needs p >= 2; pass report-only to measure anyway");
  }
}

DyadicFunction sqrt_of(std::vector<double> sq, unsigned resolution) {
  for (double& v : sq) v = std::sqrt(v);
  return DyadicFunction(resolution, std::move(sq));
}

RadMode trial_rad(const ExperimentConfig& cfg, const TrialRecord& r) {
  if (cfg.rad.kind == RadMode::Kind::exact) return cfg.rad;
  return RadMode::montecarlo(cfg.rad.samples, derive_seed(r.seed, 7));
}

std::vector<Decomposition> trial_family(const ExperimentConfig& cfg, const TrialRecord& r,
                                        std::vector<IntInterval>* intervals = nullptr) {
  auto family = random_interval_family(derive_seed(r.seed, 1), cfg.resolution, cfg.count, cfg.family);
  auto decomps = family_decompose(family);
  if (intervals) *intervals = std::move(family);
  return decomps;
}

}  // namespace

Report run_scalar_lpr(const ExperimentConfig& cfg) {
  require_lpr_regime(cfg);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    const auto f = random_function(derive_seed(r.seed, 0), N, policy);
    const auto family = random_interval_family(derive_seed(r.seed, 1), N, cfg.count, cfg.family);
    const Spectrum spectrum = analyze(f);
    std::vector<double> sq(f.size(), 0.0);
    for (const auto& iv : family) {
      const auto piece = project(iv, spectrum);
      for (std::size_t x = 0; x < sq.size(); ++x) sq[x] += piece[x] * piece[x];
    }
    r.lhs = lp_norm(sqrt_of(std::move(sq), N), cfg.p);
    r.rhs = lp_norm(f, cfg.p);
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.extra = {{"policy", policy.to_string()}, {"family", family_json(family)}};
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(finiteness(report.trials));
  if (cfg.p == 2.0) {
    report.asserted.push_back(tally("orthogonality_p2", report.trials, 1.0 + kIdentityTol,
                                    [](const TrialRecord& t) { return t.ratio; }));
  }
  return report;
}

Report run_vector_lpr(const ExperimentConfig& cfg) {
  require_lpr_regime(cfg);
  require_lattice_exponent(cfg.q);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    const auto f = random_lattice_function(derive_seed(r.seed, 0), N, cfg.dim, cfg.q, policy);
    const auto family = random_interval_family(derive_seed(r.seed, 1), N, cfg.count, cfg.family);
    std::vector<Spectrum> spectra;
    for (const auto& c : f.coordinates()) spectra.push_back(analyze(c));

    std::vector<LatticeFunction> pieces;
    std::vector<double> sq(f.cells(), 0.0);
    for (const auto& iv : family) {
      std::vector<DyadicFunction> coords;
      for (const auto& s : spectra) coords.push_back(project(iv, s));
      if (cfg.dim == 1) {
        for (std::size_t x = 0; x < sq.size(); ++x) sq[x] += coords[0][x] * coords[0][x];
      }
      pieces.push_back(LatticeFunction::from_coordinates(coords, cfg.q));
    }
    r.lhs = lp_radx_norm(pieces, cfg.p, trial_rad(cfg, r));
    r.rhs = lp_x_norm(f, cfg.p);
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.extra = {{"policy", policy.to_string()}, {"family", family_json(family)}};
    if (cfg.dim == 1) {
      const double scalar_lhs = lp_norm(sqrt_of(std::move(sq), N), cfg.p);
      r.extra["scalar_lhs"] = scalar_lhs;
      r.extra["khintchine_ratio"] = scalar_lhs > 0.0 ? r.lhs / scalar_lhs : 1.0;
    }
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(finiteness(report.trials));
  if (cfg.p == 2.0 && cfg.q == 2.0 && cfg.rad.kind == RadMode::Kind::exact) {
    report.asserted.push_back(tally("hilbert_p2_q2", report.trials, 1.0 + kIdentityTol,
                                    [](const TrialRecord& t) { return t.ratio; }));
  }
  return report;
}

Report run_pointwise(const ExperimentConfig& cfg) {
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    const auto f = random_function(derive_seed(r.seed, 0), N, policy);
    std::vector<IntInterval> family;
    const auto decomps = trial_family(cfg, r, &family);
    const SeqFunction g = apply_g(f, decomps);
    const DyadicFunction sharp = sharp_maximal(g);
    const DyadicFunction m2 = maximal2(f);

    double ratio = 0.0;
    std::size_t arg = 0;
    for (std::size_t x = 0; x < sharp.size(); ++x) {
      const double v = m2[x] > 0.0 ? sharp[x] / m2[x] : (sharp[x] > kIdentityTol ? INFINITY : 0.0);
      if (v > ratio) {
        ratio = v;
        arg = x;
      }
    }
    double mean = 0.0;
    for (const auto& c : g.components()) mean = std::max(mean, std::abs(c.integral()));
    r.lhs = sharp[arg];
    r.rhs = m2[arg];
    r.ratio = ratio;
    r.extra = {{"policy", policy.to_string()}, {"family", family_json(family)}, {"max_abs_mean", mean}};
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(tally("key_estimate", report.trials, 1.0 + kIdentityTol,
                                  [](const TrialRecord& t) { return t.ratio; }));
  report.asserted.push_back(tally("g_mean_zero", report.trials, kIdentityTol, [](const TrialRecord& t) {
    return t.extra["max_abs_mean"].get<double>();
  }));
  return report;
}

Report run_lemma_square(const ExperimentConfig& cfg) {
  if (!(cfg.p > 1.0)) throw Error(Errc::bad_exponent, "the square-function bound needs p > 1");
  require_lattice_exponent(cfg.q);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  const std::size_t d = cfg.dim;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    // h_n, mean-zero coordinatewise.
    std::vector<std::vector<DyadicFunction>> by_coord(d);
    for (std::size_t n = 0; n < cfg.count; ++n) {
      const auto h = random_lattice_function(derive_seed(r.seed, 10 + n), N, d, cfg.q, policy);
      for (std::size_t c = 0; c < d; ++c) {
        const auto hc = h.coordinate(c);
        by_coord[c].push_back(hc - DyadicFunction::constant(N, hc.integral()));
      }
    }
    const std::size_t cells = std::size_t{1} << N;
    std::vector<double> sh(cells * d);
    std::vector<double> l2(cells * d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      const auto s = square_function(SeqFunction(N, by_coord[c]));
      for (std::size_t x = 0; x < cells; ++x) {
        sh[x * d + c] = s[x];
        for (const auto& hn : by_coord[c]) l2[x * d + c] += hn[x] * hn[x];
      }
    }
    for (double& v : l2) v = std::sqrt(v);
    r.lhs = lp_x_norm(LatticeFunction(N, d, cfg.q, std::move(sh)), cfg.p);
    r.rhs = lp_x_norm(LatticeFunction(N, d, cfg.q, std::move(l2)), cfg.p);
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.extra = {{"policy", policy.to_string()}};
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(finiteness(report.trials));
  if (d == 1 && cfg.p == 2.0) {
    report.asserted.push_back(tally("square_l2", report.trials, 1.0 + kIdentityTol,
                                    [](const TrialRecord& t) { return t.ratio; }));
  }
  return report;
}

Report run_weak11(const ExperimentConfig& cfg) {
  require_lattice_exponent(cfg.q);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    std::vector<IntInterval> family;
    const auto decomps = trial_family(cfg, r, &family);
    std::vector<LatticeFunction> gs;
    for (std::size_t s = 0; s < decomps.size(); ++s) {
      gs.push_back(random_lattice_function(derive_seed(r.seed, 10 + s), N, cfg.dim, cfg.q, policy));
    }
    const RadMode rad = trial_rad(cfg, r);
    const double g_l1 = rad_pointwise_norm(gs, 2.0, rad).integral();
    const DyadicFunction norms = apply_t_star(gs, decomps).pointwise_norm();

    std::vector<double> sorted(norms.values().begin(), norms.values().end());
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (median <= 0.0) median = sorted.back();

    double best = 0.0;
    double best_lambda = 0.0;
    double best_lhs = 0.0;
    double leak = 0.0;
    if (median > 0.0 && g_l1 > 0.0) {
      for (int e = -6; e <= 6; ++e) {
        const double lambda = std::ldexp(median, e);
        std::size_t above = 0;
        for (double v : norms.values()) above += v > lambda ? 1 : 0;
        const double lhs = lambda * static_cast<double>(above) / static_cast<double>(norms.size());
        if (lhs / g_l1 > best) {
          best = lhs / g_l1;
          best_lambda = lambda;
          best_lhs = lhs;
        }

        const auto cz = cz_decompose_rad(gs, lambda, 2.0, rad);
        const LatticeFunction tb = apply_t_star(cz.bad, decomps);
        // e_n grows with n, so e_N is the union of all exceptional sets.
        const auto inside = exceptional_set(cz.cells, N, N);
        for (std::size_t x = 0; x < inside.size(); ++x) {
          if (inside[x]) continue;
          for (double v : tb.cell(x)) leak = std::max(leak, std::abs(v));
        }
      }
    }
    r.lhs = best_lhs;
    r.rhs = g_l1;
    r.ratio = best;
    r.extra = {{"policy", policy.to_string()},
               {"family", family_json(family)},
               {"lambda", best_lambda},
               {"median", median},
               {"support_leak", leak}};
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(finiteness(report.trials));
  report.asserted.push_back(tally("support_containment", report.trials, kIdentityTol,
                                  [](const TrialRecord& t) { return t.extra["support_leak"].get<double>(); }));
  return report;
}

Report run_adjointness(const ExperimentConfig& cfg) {
  if (cfg.rad.kind != RadMode::Kind::exact) {
    throw Error(Errc::bad_mode, "adjointness needs exact sign enumeration");
  }
  if (cfg.count > kMaxExactSigns) throw Error(Errc::bad_mode, "too many intervals to enumerate signs");
  require_lattice_exponent(cfg.q);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  const std::size_t d = cfg.dim;
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    std::vector<IntInterval> family;
    const auto decomps = trial_family(cfg, r, &family);
    const auto f = random_lattice_function(derive_seed(r.seed, 0), N, d, cfg.q, policy);
    std::vector<LatticeFunction> gs;
    for (std::size_t s = 0; s < decomps.size(); ++s) {
      gs.push_back(random_lattice_function(derive_seed(r.seed, 10 + s), N, d, cfg.q,
                                           cfg.function.for_trial(r.index + s + 1)));
    }
    const auto tf = apply_t(f, decomps);
    const auto tsg = apply_t_star(gs, decomps);

    // E_sigma int <sum sigma_s (Tf)_s, sum sigma_s g_s>, all 2^S sign vectors.
    const std::size_t S = gs.size();
    const std::size_t width = f.values().size();
    std::vector<double> left(width);
    std::vector<double> right(width);
    double direct = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << S); ++mask) {
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (std::size_t s = 0; s < S; ++s) {
        const double sign = (mask >> s) & 1u ? -1.0 : 1.0;
        for (std::size_t i = 0; i < width; ++i) {
          left[i] += sign * tf[s].values()[i];
          right[i] += sign * gs[s].values()[i];
        }
      }
      double pairing = 0.0;
      for (std::size_t i = 0; i < width; ++i) pairing += left[i] * right[i];
      direct += pairing;
    }
    direct = std::ldexp(direct / static_cast<double>(std::uint64_t{1} << S), -static_cast<int>(N));

    double dual = 0.0;
    for (std::size_t i = 0; i < width; ++i) dual += f.values()[i] * tsg.values()[i];
    dual = std::ldexp(dual, -static_cast<int>(N));

    r.lhs = direct;
    r.rhs = dual;
    r.ratio = std::abs(direct - dual) / (1.0 + std::abs(dual));
    r.extra = {{"policy", policy.to_string()}, {"family", family_json(family)}};
  });
  report.summary = RatioSummary::of(report.trials);
  report.asserted.push_back(tally("adjointness", report.trials, kIdentityTol,
                                  [](const TrialRecord& t) { return t.ratio; }));
  return report;
}

Report run_decompose(const ExperimentConfig& cfg) {
  Report report{cfg, {}, {}, {}, Json::object()};
  const Decomposition d = decompose(cfg.a, cfg.b);
  const VerificationReport v = verify_decomposition(d, cfg.a, cfg.b);
  auto pieces = [](const std::vector<Piece>& ps) {
    Json out = Json::array();
    for (const auto& p : ps) {
      out.push_back({{"level", p.level}, {"lo", p.interval.lo()}, {"hi", p.interval.hi()}});
    }
    return out;
  };
  Json checks = Json::object();
  for (const auto& c : v.checks) checks[c.name] = c.passed;
  report.payload = {{"anchor", d.anchor}, {"upper", d.upper}, {"left", pieces(d.left)},
                    {"right", pieces(d.right)}, {"checks", checks}, {"verified", v.passed}};
  if (!v.passed) {
    report.payload["failure"] = v.failure;
    if (v.witness) report.payload["witness"] = *v.witness;
  }
  report.asserted.push_back({"oracle", v.passed ? 0.0 : 1.0, 0.0, v.passed ? 0u : 1u});
  return report;
}

Report run_czd(const ExperimentConfig& cfg) {
  require_lattice_exponent(cfg.q);
  Report report{cfg, {}, {}, {}, Json::object()};
  const unsigned N = cfg.resolution;
  std::vector<CZReport> checks(cfg.trials);
  std::vector<std::vector<DyadicCell>> cells(cfg.trials);
  report.trials = run_trials(cfg, [&](TrialRecord& r) {
    const auto policy = cfg.function.for_trial(r.index);
    const auto g = random_lattice_function(derive_seed(r.seed, 0), N, cfg.dim, cfg.q, policy);
    const auto cz = cz_decompose(g, cfg.lambda);
    checks[r.index] = check_cz(g, cz);
    cells[r.index] = cz.cells;
    r.lhs = union_measure(cz.cells);
    r.rhs = lp_x_norm(g, 1.0) / cfg.lambda;
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.extra = {{"policy", policy.to_string()},
               {"stopping_cells", cz.cells.size()},
               {"root_stopped", checks[r.index].root_stopped}};
  });
  report.summary = RatioSummary::of(report.trials);

  // Bounds vary per trial, so each check is tallied by its margin value - bound.
  for (std::size_t k = 0; !checks.empty() && k < checks[0].checks.size(); ++k) {
    AssertedBound b{checks[0].checks[k].name, -std::numeric_limits<double>::max(), 0.0, 0};
    for (const auto& c : checks) {
      b.worst = std::max(b.worst, c.checks[k].value - c.checks[k].bound);
      if (!c.checks[k].passed) ++b.failures;
    }
    report.asserted.push_back(std::move(b));
  }
  if (cfg.trials == 1) {
    Json list = Json::array();
    for (const auto& q : cells[0]) list.push_back({{"level", q.level}, {"position", q.position}});
    Json detail = Json::array();
    for (const auto& c : checks[0].checks) {
      detail.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    }
    report.payload = {{"cells", list}, {"root_stopped", checks[0].root_stopped}, {"checks", detail}};
  }
  return report;
}

}  // namespace lpw
