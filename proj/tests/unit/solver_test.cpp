#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pcfr/poker_games.hpp"
#include "pcfr/solver.hpp"
#include "test_support.hpp"

namespace pcfr {
namespace {

SolveResult solve(const GameTree& t, VariantKind kind, int iterations, int every = 0,
                  int workers = 1) {
  SolveOptions o;
  o.pipeline.variant.kind = kind;
  o.pipeline.workers = workers;
  o.iterations = iterations;
  o.convergence_every = every;
  return run_solve(t, o);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

TEST(Solver, KuhnCfrPlusReachesEquilibrium) {
  const GameTree t = build_kuhn();
  const auto r = solve(t, VariantKind::kCfrPlus, 10000);
  EXPECT_LT(r.final_exploitability.exploitability, 1e-3);
  EXPECT_NEAR(game_value(t, r.average), -1.0 / 18.0, 1e-3);
  EXPECT_EQ(r.rho, 1.0);
}

TEST(Solver, VariantsBeatVanillaOnLeduc) {
  const GameTree t = build_leduc();
  const double vanilla = solve(t, VariantKind::kVanilla, 1000).final_exploitability.exploitability;
  const double plus = solve(t, VariantKind::kCfrPlus, 1000).final_exploitability.exploitability;
  const double dcfr = solve(t, VariantKind::kDcfr, 1000).final_exploitability.exploitability;
  EXPECT_LT(plus, vanilla);
  EXPECT_LT(dcfr, vanilla);
}

TEST(Solver, VanillaRateOnLeduc) {
  const GameTree t = build_leduc();
  const auto r = solve(t, VariantKind::kVanilla, 2000, 100);
  ASSERT_EQ(r.log.size(), 20u);
  const double e0 = r.log.front().exploitability_chips;
  const double e1 = r.log.back().exploitability_chips;
  const double slope = std::log(e1 / e0) / std::log(2000.0 / 100.0);
  EXPECT_LE(slope, -0.35);
}

TEST(Solver, MedianExploitabilityFalls) {
  const GameTree t = build_leduc();
  const auto r = solve(t, VariantKind::kCfrPlus, 1200, 50);
  std::vector<double> e;
  for (const auto& p : r.log) e.push_back(p.exploitability_chips);
  ASSERT_EQ(e.size(), 24u);
  double last = median({e.begin(), e.begin() + 8});
  for (int w = 1; w < 3; ++w) {
    const double m = median({e.begin() + 8 * w, e.begin() + 8 * (w + 1)});
    EXPECT_LT(m, last);
    last = m;
  }
}

TEST(Solver, PcfrPlusConvergesOnRiver) {
  const GameTree t = testing::small_river("Ks Th 7d 4c 2s", 2, 1);
  const auto r = solve(t, VariantKind::kPcfrPlus, 120, 40);
  ASSERT_EQ(r.log.size(), 3u);
  EXPECT_LT(r.log[2].exploitability_pot, r.log[0].exploitability_pot);
  EXPECT_LT(r.log[2].exploitability_pot, 0.02);
}

TEST(Solver, LogIsOrderedAndUnitsAgree) {
  const GameTree t = build_leduc();
  const auto r = solve(t, VariantKind::kDcfr, 30, 10);
  ASSERT_EQ(r.log.size(), 3u);
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    EXPECT_EQ(r.log[i].iteration, 10 * static_cast<int>(i + 1));
    if (i > 0) {
      EXPECT_GE(r.log[i].wall_ms, r.log[i - 1].wall_ms);
    }
    EXPECT_NEAR(r.log[i].exploitability_pot, r.log[i].exploitability_chips / t.starting_pot, 1e-15);
  }
  EXPECT_EQ(r.log.back().exploitability_chips, r.final_exploitability.exploitability);
}

TEST(Solver, WorkersDoNotChangeResult) {
  const GameTree t = build_leduc();
  const auto a = solve(t, VariantKind::kDcfr, 50, 0, 1);
  const auto b = solve(t, VariantKind::kDcfr, 50, 0, 4);
  EXPECT_EQ(a.average.node, b.average.node);
}

TEST(Solver, RandomInitIsSeeded) {
  const GameTree t = build_leduc();
  SolveOptions o;
  o.pipeline.variant.kind = VariantKind::kCfrPlus;
  o.iterations = 200;
  o.random_init = true;
  o.seed = 5;
  const auto a = run_solve(t, o);
  const auto b = run_solve(t, o);
  EXPECT_EQ(a.average.node, b.average.node);
  o.random_init = false;
  const auto c = run_solve(t, o);
  EXPECT_NE(a.average.node, c.average.node);
  EXPECT_LT(a.final_exploitability.exploitability, 0.05);
}

TEST(Solver, RejectsZeroIterations) {
  const GameTree t = build_kuhn();
  SolveOptions o;
  o.iterations = 0;
  EXPECT_THROW(run_solve(t, o), std::invalid_argument);
}

}  // namespace
}  // namespace pcfr
