#include "lpw/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "lpw/error.hpp"

namespace lpw {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FunctionPolicy FunctionPolicy::parse(const std::string& text) {
  if (text == "gaussian") return {Kind::gaussian_cells, 1};
  if (text == "rademacher") return {Kind::rademacher_cells, 1};
  if (text == "spike") return {Kind::spike, 1};
  if (text == "mixed") return {Kind::mixed, 1};
  if (text.rfind("sparse:", 0) == 0) {
    try {
      std::size_t used = 0;
      const long k = std::stol(text.substr(7), &used);
      if (k >= 1 && used == text.size() - 7) return {Kind::sparse_spectrum, static_cast<unsigned>(k)};
    } catch (const std::exception&) {
    }
  }
  throw Error(Errc::unknown_policy, "function policy '" + text + "'");
}

std::string FunctionPolicy::to_string() const {
  switch (kind) {
    case Kind::gaussian_cells: return "gaussian";
    case Kind::rademacher_cells: return "rademacher";
    case Kind::sparse_spectrum: return "sparse:" + std::to_string(sparsity);
    case Kind::spike: return "spike";
    case Kind::mixed: return "mixed";
  }
  return "mixed";
}

FunctionPolicy FunctionPolicy::for_trial(std::size_t t) const {
  if (kind != Kind::mixed) return *this;
  static constexpr FunctionPolicy kRotation[] = {
      {Kind::gaussian_cells, 1}, {Kind::rademacher_cells, 1}, {Kind::sparse_spectrum, 1},
      {Kind::sparse_spectrum, 3}, {Kind::spike, 1},
  };
  return kRotation[t % std::size(kRotation)];
}

FamilyPolicy parse_family_policy(const std::string& text) {
  if (text == "dyadic") return FamilyPolicy::dyadic;
  if (text == "misaligned") return FamilyPolicy::misaligned;
  if (text == "singletons") return FamilyPolicy::singletons;
  if (text == "random") return FamilyPolicy::random;
  if (text == "mixed") return FamilyPolicy::mixed;
  throw Error(Errc::unknown_policy, "family policy '" + text + "'");
}

std::string to_string(FamilyPolicy policy) {
  switch (policy) {
    case FamilyPolicy::dyadic: return "dyadic";
    case FamilyPolicy::misaligned: return "misaligned";
    case FamilyPolicy::singletons: return "singletons";
    case FamilyPolicy::random: return "random";
    case FamilyPolicy::mixed: return "mixed";
  }
  return "random";
}

namespace {

// k distinct elements of pool, in increasing order.
std::vector<WalshIndex> choose_sorted(std::vector<WalshIndex> pool, std::size_t k,
                                      std::mt19937_64& engine) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(engine)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<IntInterval> pair_up(const std::vector<WalshIndex>& endpoints) {
  std::vector<IntInterval> out;
  for (std::size_t i = 0; i + 1 < endpoints.size(); i += 2) {
    out.emplace_back(endpoints[i], endpoints[i + 1]);
  }
  return out;
}

void check_family_resolution(unsigned resolution) {
  if (resolution > kMaxResolution) {
    throw Error(Errc::resolution_too_coarse, "resolution " + std::to_string(resolution));
  }
}

}  // namespace

DyadicFunction random_function(std::uint64_t seed, unsigned resolution, FunctionPolicy policy) {
  if (policy.kind == FunctionPolicy::Kind::mixed) policy = policy.for_trial(seed);
  std::mt19937_64 engine(seed);
  const std::size_t cells = std::size_t{1} << resolution;
  std::vector<double> values(cells, 0.0);
  switch (policy.kind) {
    case FunctionPolicy::Kind::gaussian_cells: {
      std::normal_distribution<double> normal;
      for (double& v : values) v = normal(engine);
      break;
    }
    case FunctionPolicy::Kind::rademacher_cells:
      for (double& v : values) v = (engine() & 1u) ? -1.0 : 1.0;
      break;
    case FunctionPolicy::Kind::sparse_spectrum: {
      if (policy.sparsity > cells) {
        throw Error(Errc::infeasible_family, "sparsity exceeds 2^N");
      }
      std::vector<WalshIndex> all(cells);
      std::iota(all.begin(), all.end(), 0u);
      const auto chosen = choose_sorted(std::move(all), policy.sparsity, engine);
      std::vector<double> coeffs(cells, 0.0);
      for (WalshIndex n : chosen) coeffs[n] = (engine() & 1u) ? -1.0 : 1.0;
      return synthesize(Spectrum(resolution, std::move(coeffs)));
    }
    case FunctionPolicy::Kind::spike: {
      std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
      const std::size_t cell = pick(engine);
      values[cell] = ((engine() & 1u) ? -1.0 : 1.0) * static_cast<double>(cells);
      break;
    }
    case FunctionPolicy::Kind::mixed:
      break;
  }
  return DyadicFunction(resolution, std::move(values));
}

LatticeFunction random_lattice_function(std::uint64_t seed, unsigned resolution, std::size_t dim,
                                        double q, FunctionPolicy policy) {
  if (policy.kind == FunctionPolicy::Kind::mixed) policy = policy.for_trial(seed);
  if (policy.kind == FunctionPolicy::Kind::spike) {
    // One cell carrying a Gaussian vector of unit-order L1 mass.
    std::mt19937_64 engine(seed);
    const std::size_t cells = std::size_t{1} << resolution;
    std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
    std::normal_distribution<double> normal;
    std::vector<double> values(cells * dim, 0.0);
    const std::size_t cell = pick(engine);
    for (std::size_t c = 0; c < dim; ++c) values[cell * dim + c] = normal(engine) * static_cast<double>(cells);
    return LatticeFunction(resolution, dim, q, std::move(values));
  }
  std::vector<DyadicFunction> coords;
  coords.reserve(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    coords.push_back(random_function(derive_seed(seed, c), resolution, policy));
  }
  return LatticeFunction::from_coordinates(coords, q);
}

std::vector<IntInterval> random_interval_family(std::uint64_t seed, unsigned resolution,
                                                std::size_t count, FamilyPolicy policy) {
  check_family_resolution(resolution);
  std::mt19937_64 engine(seed);
  if (policy == FamilyPolicy::mixed) {
    static constexpr FamilyPolicy kRotation[] = {FamilyPolicy::random, FamilyPolicy::dyadic,
                                                 FamilyPolicy::misaligned, FamilyPolicy::singletons};
    policy = kRotation[engine() % std::size(kRotation)];
  }
  const std::uint64_t range = std::uint64_t{1} << resolution;
  if (count == 0) throw Error(Errc::infeasible_family, "a family needs at least one interval");

  switch (policy) {
    case FamilyPolicy::singletons: {
      if (count > range) throw Error(Errc::infeasible_family, "more singletons than points");
      std::vector<WalshIndex> pool(range);
      std::iota(pool.begin(), pool.end(), 0u);
      std::vector<IntInterval> out;
      for (WalshIndex n : choose_sorted(std::move(pool), count, engine)) out.emplace_back(n, n + 1);
      return out;
    }
    case FamilyPolicy::random: {
      if (2 * count > range + 1) throw Error(Errc::infeasible_family, "not enough endpoints");
      std::vector<WalshIndex> pool(range + 1);
      std::iota(pool.begin(), pool.end(), 0u);
      return pair_up(choose_sorted(std::move(pool), 2 * count, engine));
    }
    case FamilyPolicy::misaligned: {
      std::vector<WalshIndex> pool;
      const int needed = static_cast<int>((resolution + 1) / 2);
      for (std::uint64_t x = 0; x <= range; ++x) {
        if (std::popcount(x) >= needed) pool.push_back(static_cast<WalshIndex>(x));
      }
      if (pool.size() < 2 * count) {
        throw Error(Errc::infeasible_family, "not enough endpoints with many binary digits");
      }
      return pair_up(choose_sorted(std::move(pool), 2 * count, engine));
    }
    case FamilyPolicy::dyadic: {
      if (count > range) throw Error(Errc::infeasible_family, "more dyadic pieces than points");
      // Random dyadic partition with at least `count` pieces, then a random subset.
      std::vector<std::pair<WalshIndex, unsigned>> pieces{{0u, resolution}};
      while (pieces.size() < count) {
        std::vector<std::size_t> splittable;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
          if (pieces[i].second > 0) splittable.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> pick(0, splittable.size() - 1);
        const std::size_t i = splittable[pick(engine)];
        const auto [lo, k] = pieces[i];
        pieces[i] = {lo, k - 1};
        pieces.emplace_back(lo + (WalshIndex{1} << (k - 1)), k - 1);
      }
      std::vector<WalshIndex> ids(pieces.size());
      std::iota(ids.begin(), ids.end(), 0u);
      std::vector<IntInterval> out;
      for (WalshIndex i : choose_sorted(std::move(ids), count, engine)) {
        const auto [lo, k] = pieces[i];
        out.emplace_back(lo, static_cast<WalshIndex>(lo + (std::uint64_t{1} << k)));
      }
      std::sort(out.begin(), out.end(),
                [](const IntInterval& x, const IntInterval& y) { return x.lo() < y.lo(); });
      return out;
    }
    case FamilyPolicy::mixed:
      break;
  }
  throw Error(Errc::unknown_policy, "family policy");
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["resolution"] = resolution;
  j["trials"] = trials;
  j["seed"] = seed;
  j["p"] = p;
  j["q"] = std::isinf(q) ? Json("inf") : Json(q);
  j["dim"] = dim;
  j["count"] = count;
  j["family"] = to_string(family);
  j["policy"] = function.to_string();
  j["rad"] = rad.to_string();
  if (rad.kind == RadMode::Kind::montecarlo) j["rad_seed"] = rad.seed;
  j["lambda"] = lambda;
  j["a"] = a;
  j["b"] = b;
  j["report_only"] = report_only;
  return j;
}

RatioSummary RatioSummary::of(const std::vector<TrialRecord>& trials) {
  RatioSummary s;
  if (trials.empty()) return s;
  std::vector<double> ratios;
  ratios.reserve(trials.size());
  double running = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    ratios.push_back(t.ratio);
    s.finite = s.finite && std::isfinite(t.ratio);
    if (t.ratio > running) {
      running = t.ratio;
      s.running_max_last_change = t.index;
    }
  }
  s.max = running;
  s.mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
  std::sort(ratios.begin(), ratios.end());
  s.min = ratios.front();
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(ratios.size())));
  s.p99 = ratios[std::max<std::size_t>(rank, 1) - 1];
  s.stable = s.running_max_last_change < (trials.size() + 9) / 10;
  return s;
}

bool Report::passed() const {
  return std::all_of(asserted.begin(), asserted.end(),
                     [](const AssertedBound& b) { return b.passed(); });
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json Report::summary_json() const {
  Json j;
  j["command"] = config.command;
  j["config"] = config.to_json();
  if (summary) {
    j["summary"] = {{"trials", trials.size()},
                    {"max", number_or_null(summary->max)},
                    {"mean", number_or_null(summary->mean)},
                    {"p99", number_or_null(summary->p99)},
                    {"min", number_or_null(summary->min)},
                    {"running_max_last_change", summary->running_max_last_change},
                    {"stable", summary->stable},
                    {"finite", summary->finite}};
  }
  Json bounds = Json::array();
  for (const auto& b : asserted) {
    bounds.push_back({{"name", b.name},
                      {"worst", number_or_null(b.worst)},
                      {"bound", b.bound},
                      {"failures", b.failures},
                      {"passed", b.passed()}});
  }
  j["asserted"] = std::move(bounds);
  if (!payload.empty()) j["result"] = payload;
  j["passed"] = passed();
  j["timestamp"] = utc_timestamp();
  return j;
}

void write_report(const Report& report, const std::string& format, std::ostream& out) {
  if (format == "json") {
    for (const auto& t : report.trials) {
      Json line{{"trial", t.index},
                {"seed", t.seed},
                {"lhs", number_or_null(t.lhs)},
                {"rhs", number_or_null(t.rhs)},
                {"ratio", number_or_null(t.ratio)}};
      for (const auto& [key, value] : t.extra.items()) line[key] = value;
      out << line.dump() << '\n';
    }
    out << report.summary_json().dump() << '\n';
    return;
  }
  if (format == "csv") {
    const Json cfg = report.config.to_json();
    std::ostringstream header;
    std::ostringstream row;
    row << std::setprecision(17);
    bool first = true;
    auto column = [&](const std::string& name, const Json& value) {
      header << (first ? "" : ",") << name;
      row << (first ? "" : ",");
      if (value.is_string()) {
        row << value.get<std::string>();
      } else {
        row << value.dump();
      }
      first = false;
    };
    for (const auto& [key, value] : cfg.items()) column(key, value);
    if (report.summary) {
      const auto& s = *report.summary;
      column("n_trials", report.trials.size());
      column("max", number_or_null(s.max));
      column("mean", number_or_null(s.mean));
      column("p99", number_or_null(s.p99));
      column("min", number_or_null(s.min));
      column("running_max_last_change", s.running_max_last_change);
      column("stable", s.stable);
    }
    for (const auto& b : report.asserted) column("worst_" + b.name, number_or_null(b.worst));
    column("passed", report.passed());
    out << header.str() << '\n' << row.str() << '\n';
    return;
  }
  throw Error(Errc::bad_mode, "unknown report format '" + format + "'");
}

std::string strip_timestamps(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      out << line << '\n';
      continue;
    }
    if (j.is_object()) j.erase("timestamp");
    out << j.dump() << '\n';
  }
  return out.str();
}

Report run_command(const ExperimentConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "scalar") return run_scalar_lpr(cfg);
  if (c == "vector") return run_vector_lpr(cfg);
  if (c == "pointwise") return run_pointwise(cfg);
  if (c == "lemma") return run_lemma_square(cfg);
  if (c == "weak11") return run_weak11(cfg);
  if (c == "adjoint") return run_adjointness(cfg);
  if (c == "decompose") return run_decompose(cfg);
  if (c == "czd") return run_czd(cfg);
  if (c == "verify-identities") return run_verify_identities(cfg);
  throw Error(Errc::bad_mode, "unknown command '" + c + "'");
}

}  // namespace lpw
