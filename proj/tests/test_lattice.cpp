#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lpw/error.hpp"
#include "lpw/experiments.hpp"
#include "lpw/lattice.hpp"
#include "lpw/decomposition.hpp"
#include "oracle.hpp"

using namespace lpw;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LatticeFunction gaussian_lattice(std::uint64_t seed, unsigned N, std::size_t d, double q) {
  return LatticeFunction(N, d, q, oracle::gaussian(seed, (std::size_t{1} << N) * d));
}

// E || sum_s eps_s x_s ||^p over all sign vectors, then the p-th root.
double brute_rad(const std::vector<std::vector<double>>& xs, double q, double p) {
  const std::size_t S = xs.size();
  const std::size_t d = xs[0].size();
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << S); ++mask) {
    std::vector<double> sum(d, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      const double eps = (mask >> s) & 1 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < d; ++c) sum[c] += eps * xs[s][c];
    }
    total += std::pow(lattice_norm(sum, q), p);
  }
  return std::pow(total / static_cast<double>(std::size_t{1} << S), 1.0 / p);
}

}  // namespace

TEST(LatticeNorm, Examples) {
  const std::vector<double> v{3.0, -4.0};
  EXPECT_DOUBLE_EQ(lattice_norm(v, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(lattice_norm(v, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(lattice_norm(v, kInf), 4.0);
  EXPECT_NEAR(lattice_norm(v, 3.0), std::cbrt(27.0 + 64.0), 1e-14);
  EXPECT_DOUBLE_EQ(LatticePoint({1.0, 0.0, -1.0}, 2.0).norm(), std::sqrt(2.0));
  EXPECT_THROW(require_lattice_exponent(0.5), Error);
}

TEST(LatticeFunction, LayoutAndValidation) {
  const auto f = gaussian_lattice(1, 3, 2, 2.0);
  const auto c1 = f.coordinate(1);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(c1[j], f.cell(j)[1]);
  const auto rebuilt = LatticeFunction::from_coordinates(f.coordinates(), 2.0);
  EXPECT_EQ(std::vector<double>(rebuilt.values().begin(), rebuilt.values().end()),
            std::vector<double>(f.values().begin(), f.values().end()));
  EXPECT_THROW(LatticeFunction(3, 2, 2.0, std::vector<double>(15)), Error);
  EXPECT_THROW(LatticeFunction(3, 0, 2.0), Error);
  EXPECT_THROW((void)(f + gaussian_lattice(1, 3, 3, 2.0)), Error);
  EXPECT_THROW((void)(f + gaussian_lattice(1, 4, 2, 2.0)), Error);
}

TEST(LpXNorm, ConstantScalarAndMonotone) {
  LatticeFunction c(4, 2, 2.0, [] {
    std::vector<double> v;
    for (int j = 0; j < 16; ++j) v.insert(v.end(), {3.0, 4.0});
    return v;
  }());
  EXPECT_NEAR(lp_x_norm(c, 3.0), 5.0, 1e-12);

  const auto s = gaussian_lattice(2, 6, 1, 3.0);
  EXPECT_NEAR(lp_x_norm(s, 3.0), lp_norm(s.coordinate(0), 3.0), 1e-12);

  const auto f = gaussian_lattice(3, 6, 3, 3.0);
  double prev = 0.0;
  for (double p : {1.0, 2.0, 3.0, 5.0}) {
    EXPECT_GE(lp_x_norm(f, p), prev - 1e-12);
    prev = lp_x_norm(f, p);
  }
  EXPECT_GE(lp_x_norm(f, kInf), prev - 1e-12);
}

TEST(XL2Norm, Examples) {
  std::vector<LatticePoint> one{LatticePoint({3.0, 4.0}, 2.0)};
  EXPECT_DOUBLE_EQ(x_l2_norm(one), 5.0);
  std::vector<LatticePoint> scalars{LatticePoint({1.0}, 2.0), LatticePoint({2.0}, 2.0),
                                    LatticePoint({-2.0}, 2.0)};
  EXPECT_DOUBLE_EQ(x_l2_norm(scalars), 3.0);
  std::vector<LatticePoint> disjoint{LatticePoint({3.0, 0.0}, 2.0), LatticePoint({0.0, 4.0}, 2.0)};
  EXPECT_DOUBLE_EQ(x_l2_norm(disjoint), 5.0);
}

TEST(RadNorm, Examples) {
  RadElement single(std::vector<LatticePoint>{LatticePoint({3.0, 4.0}, 2.0)});
  for (double p : {1.0, 2.0, 7.0}) EXPECT_NEAR(rad_norm(single, p, RadMode::exact()), 5.0, 1e-12);

  RadElement pair(std::vector<LatticePoint>{LatticePoint({3.0}, 2.0), LatticePoint({4.0}, 2.0)});
  EXPECT_NEAR(rad_norm(pair, 2.0, RadMode::exact()), 5.0, 1e-12);
}

TEST(RadNorm, ExactMatchesSignEnumerationAndSignFlips) {
  for (std::size_t S : {1u, 2u, 5u, 9u}) {
    const auto raw = oracle::gaussian(S, S * 3);
    std::vector<std::vector<double>> xs;
    RadElement e(3, 3.0);
    for (std::size_t s = 0; s < S; ++s) {
      xs.emplace_back(raw.begin() + 3 * s, raw.begin() + 3 * s + 3);
      e.push_back(xs.back());
    }
    for (double p : {1.0, 2.0, 4.0}) {
      const double expected = brute_rad(xs, 3.0, p);
      EXPECT_NEAR(rad_norm(e, p, RadMode::exact()), expected, 1e-12 * expected);
      RadElement flipped(3, 3.0);
      for (std::size_t s = 0; s < S; ++s) {
        auto x = xs[s];
        if (s % 2) {
          for (double& v : x) v = -v;
        }
        flipped.push_back(x);
      }
      EXPECT_NEAR(rad_norm(flipped, p, RadMode::exact()), expected, 1e-12 * expected);
    }
  }
}

TEST(RadNorm, MonteCarloConvergesAndIsDeterministic) {
  const auto raw = oracle::gaussian(77, 12);
  RadElement e(2, 2.0);
  std::vector<std::vector<double>> xs;
  for (std::size_t s = 0; s < 6; ++s) {
    xs.push_back({raw[2 * s], raw[2 * s + 1]});
    e.push_back(xs.back());
  }
  const double exact = brute_rad(xs, 2.0, 4.0);
  const auto mode = RadMode::montecarlo(20000, 5);
  const double mc = rad_norm(e, 4.0, mode);
  EXPECT_NEAR(mc, exact, 0.05 * exact);
  EXPECT_EQ(mc, rad_norm(e, 4.0, mode));
}

TEST(RadMode, ParseAndErrors) {
  EXPECT_EQ(RadMode::parse("exact", 1).kind, RadMode::Kind::exact);
  const auto mc = RadMode::parse("mc:256", 9);
  EXPECT_EQ(mc.kind, RadMode::Kind::montecarlo);
  EXPECT_EQ(mc.samples, 256u);
  EXPECT_EQ(mc.to_string(), "mc:256");
  for (const char* bad : {"mc:", "mc:x", "mc:0", "gauss"}) {
    try {
      RadMode::parse(bad, 1);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::bad_mode);
    }
  }
  RadElement big(1, 2.0);
  for (std::size_t s = 0; s <= kMaxExactSigns; ++s) big.push_back(std::vector<double>{1.0});
  EXPECT_THROW(rad_norm(big, 2.0, RadMode::exact()), Error);
  EXPECT_THROW(rad_norm(big, kInf, RadMode::montecarlo(4, 1)), Error);
}

TEST(LpRadXNorm, SingleComponentAndOrthogonality) {
  const auto f = gaussian_lattice(4, 5, 2, 3.0);
  std::vector<LatticeFunction> one{f};
  EXPECT_NEAR(lp_radx_norm(one, 3.0, RadMode::exact()), lp_x_norm(f, 3.0), 1e-12);

  std::vector<LatticeFunction> scalars;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    scalars.push_back(gaussian_lattice(10 + s, 5, 1, 2.0));
    sum += std::pow(lp_x_norm(scalars.back(), 2.0), 2.0);
  }
  EXPECT_NEAR(lp_radx_norm(scalars, 2.0, RadMode::exact()), std::sqrt(sum), 1e-12);
}

TEST(LpRadXNorm, ContractionBySignFunctions) {
  const unsigned N = 5;
  std::vector<LatticeFunction> gs;
  std::vector<LatticeFunction> signed_gs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto g = gaussian_lattice(20 + s, N, 3, 4.0);
    gs.push_back(g);
    std::vector<DyadicFunction> coords;
    for (const auto& c : g.coordinates()) coords.push_back(multiply_walsh(static_cast<WalshIndex>(7 * s + 1), c));
    signed_gs.push_back(LatticeFunction::from_coordinates(coords, 4.0));
  }
  const auto a = rad_pointwise_norm(gs, 3.0, RadMode::exact());
  const auto b = rad_pointwise_norm(signed_gs, 3.0, RadMode::exact());
  EXPECT_LE(max_abs_diff(a, b), 1e-12);
}

TEST(ApplyT, MatchesSpectralProjectionOfAnchorRun) {
  const unsigned N = 6;
  const auto table = oracle::walsh_table(N);
  const auto f = gaussian_lattice(30, N, 2, 2.0);
  const std::vector<IntInterval> family{IntInterval(1, 6), IntInterval(9, 40), IntInterval(41, 64)};
  const auto ds = family_decompose(family);
  const auto ts = apply_t(f, ds);
  ASSERT_EQ(ts.size(), 3u);
  for (std::size_t s = 0; s < ds.size(); ++s) {
    const WalshIndex a = ds[s].anchor;
    const WalshIndex end = ds[s].left.empty() ? a + 1 : ds[s].left.back().interval.hi();
    for (std::size_t c = 0; c < 2; ++c) {
      const auto expected = oracle::mask(oracle::to_vec(f.coordinate(c)), table,
                                         [&](std::uint32_t n) { return a <= n && n < end; });
      EXPECT_LE(oracle::max_diff(multiply_walsh(a, ts[s].coordinate(c)), expected), 1e-10);
    }
  }
}

TEST(ApplyT, FullRangeAndConstants) {
  const unsigned N = 5;
  const auto f = gaussian_lattice(31, N, 3, 2.0);
  const std::vector<IntInterval> full{IntInterval(0, 32)};
  const auto ds = family_decompose(full);
  const auto t = apply_t(f, ds);
  EXPECT_LE(lp_x_norm(t[0] - f, kInf), 1e-12);

  std::vector<LatticeFunction> gs{f};
  EXPECT_LE(lp_x_norm(apply_t_star(gs, ds) - f, kInf), 1e-12);

  const std::vector<IntInterval> family{IntInterval(0, 3), IntInterval(5, 9)};
  const auto ds2 = family_decompose(family);
  LatticeFunction c(N, 1, 2.0, std::vector<double>(32, 2.0));
  const auto tc = apply_t(c, ds2);
  EXPECT_LE(lp_x_norm(tc[0] - c, kInf), 1e-12);
  EXPECT_LE(lp_x_norm(tc[1], kInf), 1e-12);
}

TEST(ApplyTStar, AdjointOfApplyT) {
  const unsigned N = 6;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const std::size_t d = 1 + t % 4;
    const auto family = random_interval_family(t, N, 1 + t % 6, FamilyPolicy::mixed);
    const auto ds = family_decompose(family);
    const auto f = gaussian_lattice(100 + t, N, d, 2.0);
    std::vector<LatticeFunction> gs;
    for (std::size_t s = 0; s < ds.size(); ++s) gs.push_back(gaussian_lattice(200 + 10 * t + s, N, d, 2.0));
    const auto tf = apply_t(f, ds);
    double direct = 0.0;
    for (std::size_t s = 0; s < ds.size(); ++s) {
      for (std::size_t i = 0; i < tf[s].values().size(); ++i) direct += tf[s].values()[i] * gs[s].values()[i];
    }
    const auto ts = apply_t_star(gs, ds);
    double dual = 0.0;
    for (std::size_t i = 0; i < ts.values().size(); ++i) dual += f.values()[i] * ts.values()[i];
    EXPECT_NEAR(direct, dual, 1e-10 * (1.0 + std::abs(dual)));
  }
  std::vector<LatticeFunction> none;
  std::vector<Decomposition> nd;
  EXPECT_THROW(apply_t_star(none, nd), Error);
}

TEST(CZDecompose, WorkedExample) {
  LatticeFunction g(2, 1, 2.0, {4.0, 0.0, 0.0, 0.0});
  const auto r = cz_decompose(g, 1.0);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0], DyadicCell(1, 0));
  EXPECT_EQ(std::vector<double>(r.good.values().begin(), r.good.values().end()),
            (std::vector<double>{2, 2, 0, 0}));
  EXPECT_EQ(std::vector<double>(r.bad.values().begin(), r.bad.values().end()),
            (std::vector<double>{2, -2, 0, 0}));
  EXPECT_DOUBLE_EQ(union_measure(r.cells), 0.5);
  const auto report = check_cz(g, r);
  EXPECT_TRUE(report.passed);
  EXPECT_FALSE(report.root_stopped);
}

TEST(CZDecompose, BelowThresholdIsIdentity) {
  const auto g = gaussian_lattice(40, 5, 2, 2.0);
  const double lambda = lp_norm(g.pointwise_norm(), kInf);
  const auto r = cz_decompose(g, lambda);
  EXPECT_TRUE(r.cells.empty());
  EXPECT_EQ(lp_x_norm(r.bad, kInf), 0.0);
  EXPECT_THROW(cz_decompose(g, 0.0), Error);
}

TEST(CZDecompose, InvariantsOnRandomData) {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const std::size_t d = 1 + t % 3;
    const double q = t % 2 ? 2.0 : kInf;
    const auto g = random_lattice_function(t, 6, d, q, FunctionPolicy::parse("mixed").for_trial(t));
    const double l1 = g.pointwise_norm().integral();
    const double lambda = l1 * (1.25 + static_cast<double>(t % 17));
    const auto r = cz_decompose(g, lambda);
    const auto report = check_cz(g, r);
    for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << c.name << " trial " << t;
    const auto norms = r.good.pointwise_norm();
    EXPECT_LE(lp_norm(norms, kInf), 2.0 * lambda * (1.0 + 1e-12));

    // Stopping cells: disjoint, average above lambda, parent average at most lambda.
    const auto gn = g.pointwise_norm();
    std::vector<int> cover(gn.size(), 0);
    for (const auto& c : r.cells) {
      double avg = 0.0;
      for (std::size_t x = c.first(6); x < c.first(6) + c.count(6); ++x) {
        avg += gn[x];
        cover[x] += 1;
      }
      avg /= static_cast<double>(c.count(6));
      EXPECT_GT(avg, lambda);
      ASSERT_GT(c.level, 0u);
      const DyadicCell parent(c.level - 1, c.position / 2);
      double pavg = 0.0;
      for (std::size_t x = parent.first(6); x < parent.first(6) + parent.count(6); ++x) pavg += gn[x];
      EXPECT_LE(pavg / static_cast<double>(parent.count(6)), lambda);
    }
    for (int c : cover) EXPECT_LE(c, 1);
  }
}

TEST(CZDecompose, RootStopsWhenThresholdBelowMean) {
  LatticeFunction g(3, 1, 2.0, std::vector<double>(8, 5.0));
  const auto r = cz_decompose(g, 1.0);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0], DyadicCell(0, 0));
  const auto report = check_cz(g, r);
  EXPECT_TRUE(report.root_stopped);
  EXPECT_TRUE(report.passed);
}

TEST(CZDecompose, Homogeneous) {
  const auto g = gaussian_lattice(50, 6, 2, 2.0);
  const auto r1 = cz_decompose(g, 0.9);
  LatticeFunction scaled(6, 2, 2.0, [&] {
    std::vector<double> v(g.values().begin(), g.values().end());
    for (double& x : v) x *= 4.0;
    return v;
  }());
  const auto r4 = cz_decompose(scaled, 3.6);
  EXPECT_EQ(r1.cells, r4.cells);
  for (std::size_t i = 0; i < g.values().size(); ++i) {
    EXPECT_NEAR(4.0 * r1.good.values()[i], r4.good.values()[i], 1e-12);
  }
}

TEST(CZDecompose, ExceptionalSets) {
  const std::vector<DyadicCell> cells{DyadicCell(1, 0), DyadicCell(3, 5)};
  const auto e1 = exceptional_set(cells, 3, 1);
  EXPECT_EQ(std::vector<char>(e1.begin(), e1.end()), std::vector<char>(8, 0));
  const auto e2 = exceptional_set(cells, 3, 2);
  EXPECT_EQ(std::vector<char>(e2.begin(), e2.end()), (std::vector<char>{1, 1, 1, 1, 0, 0, 0, 0}));
  const auto e4 = exceptional_set(cells, 3, 4);
  EXPECT_EQ(std::vector<char>(e4.begin(), e4.end()), (std::vector<char>{1, 1, 1, 1, 0, 1, 0, 0}));
  EXPECT_DOUBLE_EQ(union_measure(cells), 0.625);
}

TEST(CZDecomposeRad, SharedCellsAcrossComponents) {
  std::vector<LatticeFunction> gs;
  for (std::uint64_t s = 0; s < 3; ++s) gs.push_back(gaussian_lattice(60 + s, 5, 2, 2.0));
  const auto norms = rad_pointwise_norm(gs, 1.0, RadMode::exact());
  const double lambda = 2.0 * norms.integral();
  const auto r = cz_decompose_rad(gs, lambda, 1.0, RadMode::exact());
  ASSERT_EQ(r.good.size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_LE(lp_x_norm(r.good[s] + r.bad[s] - gs[s], kInf), 1e-12);
    for (const auto& c : r.cells) {
      for (std::size_t k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (std::size_t x = c.first(5); x < c.first(5) + c.count(5); ++x) sum += r.bad[s].cell(x)[k];
        EXPECT_NEAR(sum, 0.0, 1e-10);
      }
    }
  }
}
