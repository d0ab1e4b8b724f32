#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "lpw/error.hpp"
#include "lpw/experiments.hpp"
#include "lpw/walsh.hpp"

using namespace lpw;

namespace {

std::string render(const Report& r, const std::string& format) {
  std::ostringstream out;
  write_report(r, format, out);
  return out.str();
}

ExperimentConfig small(const std::string& command) {
  ExperimentConfig cfg;
  cfg.command = command;
  cfg.resolution = 5;
  cfg.trials = 12;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(DeriveSeed, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_TRUE(seen.insert(derive_seed(42, i)).second);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}

TEST(FunctionPolicy, ParseRoundTrip) {
  for (const char* text : {"gaussian", "rademacher", "sparse:3", "spike", "mixed"}) {
    EXPECT_EQ(FunctionPolicy::parse(text).to_string(), text);
  }
  for (const char* bad : {"sparse:", "sparse:0", "uniform"}) {
    try {
      FunctionPolicy::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::unknown_policy);
    }
  }
  const auto mixed = FunctionPolicy::parse("mixed");
  std::set<std::string> kinds;
  for (std::size_t t = 0; t < 10; ++t) kinds.insert(mixed.for_trial(t).to_string());
  EXPECT_GE(kinds.size(), 4u);
  EXPECT_EQ(FunctionPolicy::parse("spike").for_trial(3).to_string(), "spike");
}

TEST(RandomFunction, PoliciesBehave) {
  const unsigned N = 8;
  const auto one = random_function(5, N, FunctionPolicy::parse("sparse:1"));
  const auto s = analyze(one);
  int nonzero = 0;
  for (double c : s.coeffs()) {
    if (std::abs(c) > 1e-12) {
      ++nonzero;
      EXPECT_NEAR(std::abs(c), 1.0, 1e-12);
    }
  }
  EXPECT_EQ(nonzero, 1);

  const auto a = random_function(11, N, FunctionPolicy::parse("gaussian"));
  const auto b = random_function(11, N, FunctionPolicy::parse("gaussian"));
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  EXPECT_NEAR(inner(a, a), 1.0, 0.2);

  const auto r = random_function(12, N, FunctionPolicy::parse("rademacher"));
  for (double v : r.values()) EXPECT_EQ(std::abs(v), 1.0);

  const auto spike = random_function(13, N, FunctionPolicy::parse("spike"));
  int support = 0;
  for (double v : spike.values()) support += v != 0.0;
  EXPECT_EQ(support, 1);
  EXPECT_NEAR(std::abs(spike.integral()), 1.0, 1e-12);
}

TEST(RandomIntervalFamily, Policies) {
  const unsigned N = 8;
  const auto full = random_interval_family(1, N, 1, FamilyPolicy::dyadic);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], IntInterval(0, 1u << N));

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto policy : {FamilyPolicy::dyadic, FamilyPolicy::misaligned, FamilyPolicy::singletons,
                        FamilyPolicy::random, FamilyPolicy::mixed}) {
      const auto fam = random_interval_family(seed, N, 5, policy);
      EXPECT_EQ(fam.size(), 5u) << to_string(policy);
      for (std::size_t i = 0; i < fam.size(); ++i) {
        EXPECT_LE(fam[i].hi(), 1u << N);
        for (std::size_t j = i + 1; j < fam.size(); ++j) EXPECT_FALSE(fam[i].overlaps(fam[j]));
        if (policy == FamilyPolicy::singletons) {
          EXPECT_EQ(fam[i].size(), 1u);
        }
        if (policy == FamilyPolicy::misaligned) {
          EXPECT_GE(std::popcount(fam[i].lo()), 4);
          EXPECT_GE(std::popcount(fam[i].hi()), 4);
        }
        if (policy == FamilyPolicy::dyadic) {
          const auto size = fam[i].size();
          EXPECT_EQ(std::popcount(size), 1);
          EXPECT_EQ(fam[i].lo() % size, 0u);
        }
      }
    }
  }
  EXPECT_EQ(random_interval_family(9, N, 4, FamilyPolicy::random),
            random_interval_family(9, N, 4, FamilyPolicy::random));
  EXPECT_THROW(random_interval_family(1, 2, 5, FamilyPolicy::singletons), Error);
  EXPECT_THROW(parse_family_policy("aligned"), Error);
}

TEST(RatioSummary, TracksRunningMax) {
  std::vector<TrialRecord> trials;
  for (std::size_t i = 0; i < 100; ++i) {
    TrialRecord t;
    t.index = i;
    t.ratio = i == 4 ? 2.0 : 1.0 / static_cast<double>(i + 1);
    trials.push_back(t);
  }
  const auto s = RatioSummary::of(trials);
  EXPECT_EQ(s.max, 2.0);
  EXPECT_EQ(s.running_max_last_change, 4u);
  EXPECT_TRUE(s.stable);
  EXPECT_TRUE(s.finite);
  EXPECT_EQ(s.min, 0.01);

  trials[60].ratio = 3.0;
  EXPECT_FALSE(RatioSummary::of(trials).stable);
  trials[61].ratio = INFINITY;
  EXPECT_FALSE(RatioSummary::of(trials).finite);
}

TEST(Report, JsonLinesAndCsv) {
  auto cfg = small("scalar");
  const auto report = run_command(cfg);
  const auto json = render(report, "json");
  std::istringstream in(json);
  std::string line;
  std::size_t lines = 0;
  Json last;
  while (std::getline(in, line)) {
    last = Json::parse(line);
    ++lines;
  }
  EXPECT_EQ(lines, cfg.trials + 1);
  EXPECT_EQ(last["config"]["seed"], 3);
  EXPECT_EQ(last["config"]["resolution"], 5);
  EXPECT_TRUE(last.contains("timestamp"));
  EXPECT_TRUE(last["passed"].get<bool>());

  const auto csv = render(report, "csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_NE(csv.find("resolution"), std::string::npos);
  EXPECT_THROW(render(report, "xml"), Error);
}

TEST(Report, DeterministicAcrossRuns) {
  for (const char* command : {"scalar", "vector", "pointwise", "lemma", "weak11", "adjoint", "czd",
                              "verify-identities", "decompose"}) {
    auto cfg = small(command);
    cfg.dim = 2;
    cfg.count = 3;
    const auto a = strip_timestamps(render(run_command(cfg), "json"));
    const auto b = strip_timestamps(render(run_command(cfg), "json"));
    EXPECT_EQ(a, b) << command;
    EXPECT_EQ(a.find("timestamp"), std::string::npos);
  }
}

TEST(Campaigns, ScalarOrthogonalityAndRegime) {
  auto cfg = small("scalar");
  cfg.trials = 50;
  const auto r = run_scalar_lpr(cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.summary->max, 1.0 + 1e-10);

  cfg.p = 1.5;
  try {
    run_scalar_lpr(cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bad_regime);
  }
  cfg.report_only = true;
  EXPECT_NO_THROW(run_scalar_lpr(cfg));
}

TEST(Campaigns, SingletonsGivePlancherel) {
  auto cfg = small("scalar");
  cfg.family = FamilyPolicy::singletons;
  cfg.count = 32;
  cfg.function = FunctionPolicy::parse("gaussian");
  cfg.trials = 5;
  for (const auto& t : run_scalar_lpr(cfg).trials) EXPECT_NEAR(t.ratio, 1.0, 1e-12);
}

TEST(Campaigns, FullRangeFamilyGivesRatioOne) {
  auto cfg = small("vector");
  cfg.count = 1;
  cfg.family = FamilyPolicy::dyadic;
  cfg.dim = 3;
  cfg.q = 3.0;
  cfg.p = 4.0;
  for (const auto& t : run_vector_lpr(cfg).trials) EXPECT_NEAR(t.ratio, 1.0, 1e-12);
}

TEST(Campaigns, DecomposeReport) {
  auto cfg = small("decompose");
  cfg.a = 1;
  cfg.b = 6;
  const auto r = run_decompose(cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.payload["left"][0]["lo"], 2);
  EXPECT_EQ(r.payload["right"][0]["hi"], 6);
}

TEST(Campaigns, IdentitiesAllPass) {
  auto cfg = small("verify-identities");
  cfg.resolution = 6;
  cfg.trials = 5;
  const auto r = run_verify_identities(cfg);
  for (const auto& a : r.asserted) EXPECT_TRUE(a.passed()) << a.name << " worst " << a.worst;
}

TEST(Campaigns, UnknownCommand) {
  EXPECT_THROW(run_command(small("frobnicate")), Error);
}
