#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>

#include "pcfr/poker_games.hpp"
#include "pcfr/reference.hpp"
#include "test_support.hpp"

namespace pcfr {
namespace {

// Kuhn in closed form. Cards J=0, Q=1, K=2; ante 1 each, bet 1.
// Player 0: bet at the root, call after check-bet. Player 1: bet after a
// check, call after a bet. Each entry is a per-card probability.
struct KuhnStrategy {
  std::array<double, 3> bet0{}, call0{}, bet1{}, call1{};
};

double kuhn_value(const KuhnStrategy& s) {
  double v = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const double win = a > b ? 1.0 : -1.0;
      const double check = 1.0 - s.bet0[a];
      double x = check * (1.0 - s.bet1[b]) * win;
      x += check * s.bet1[b] * ((1.0 - s.call0[a]) * -1.0 + s.call0[a] * 2.0 * win);
      x += s.bet0[a] * ((1.0 - s.call1[b]) * 1.0 + s.call1[b] * 2.0 * win);
      v += x / 6.0;
    }
  }
  return v;
}

Profile to_profile(const GameTree& t, const KuhnStrategy& s) {
  Profile p = uniform_profile(t);
  for (int c = 0; c < 3; ++c) {
    p.node[0][2 * c] = 1.0 - s.bet0[c];
    p.node[0][2 * c + 1] = s.bet0[c];
    p.node[1][2 * c] = 1.0 - s.bet1[c];
    p.node[1][2 * c + 1] = s.bet1[c];
    p.node[3][2 * c] = 1.0 - s.call0[c];
    p.node[3][2 * c + 1] = s.call0[c];
    p.node[6][2 * c] = 1.0 - s.call1[c];
    p.node[6][2 * c + 1] = s.call1[c];
  }
  return p;
}

KuhnStrategy random_kuhn(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  KuhnStrategy s;
  for (int c = 0; c < 3; ++c) {
    s.bet0[c] = u(rng);
    s.call0[c] = u(rng);
    s.bet1[c] = u(rng);
    s.call1[c] = u(rng);
  }
  return s;
}

TEST(Kuhn, TreeMatchesClosedForm) {
  const GameTree t = build_kuhn();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_kuhn(rng);
    EXPECT_NEAR(game_value(t, to_profile(t, s)), kuhn_value(s), 1e-14);
  }
}

TEST(BestResponse, EqualsBestOfAllPureKuhnStrategies) {
  const GameTree t = build_kuhn();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_kuhn(rng);
    double best1 = -1e9;
    double best0 = -1e9;
    for (int m = 0; m < 64; ++m) {
      KuhnStrategy r1 = s;
      KuhnStrategy r0 = s;
      for (int c = 0; c < 3; ++c) {
        r1.bet1[c] = (m >> c) & 1;
        r1.call1[c] = (m >> (c + 3)) & 1;
        r0.bet0[c] = (m >> c) & 1;
        r0.call0[c] = (m >> (c + 3)) & 1;
      }
      best1 = std::max(best1, -kuhn_value(r1));
      best0 = std::max(best0, kuhn_value(r0));
    }
    const Profile p = to_profile(t, s);
    EXPECT_NEAR(best_response_value(t, p, 1), best1, 1e-12);
    EXPECT_NEAR(best_response_value(t, p, 0), best0, 1e-12);
  }
}

KuhnStrategy kuhn_equilibrium(double alpha) {
  KuhnStrategy s;
  s.bet0 = {alpha, 0.0, 3 * alpha};
  s.call0 = {0.0, alpha + 1.0 / 3.0, 1.0};
  s.bet1 = {1.0 / 3.0, 0.0, 1.0};
  s.call1 = {0.0, 1.0 / 3.0, 1.0};
  return s;
}

TEST(BestResponse, EquilibriumIsUnexploitable) {
  const GameTree t = build_kuhn();
  for (double alpha : {0.0, 0.2, 1.0 / 3.0}) {
    const Profile p = to_profile(t, kuhn_equilibrium(alpha));
    EXPECT_NEAR(game_value(t, p), -1.0 / 18.0, 1e-14);
    EXPECT_NEAR(best_response_value(t, p, 0), -1.0 / 18.0, 1e-14);
    EXPECT_NEAR(best_response_value(t, p, 1), 1.0 / 18.0, 1e-14);
    EXPECT_NEAR(exploitability(t, p).exploitability, 0.0, 1e-14);
  }
}

TEST(Exploitability, NonNegativeAndUnits) {
  const GameTree t = build_leduc();
  std::mt19937_64 rng(3);
  StrategyTables tables = make_tables(t);
  for (int i = 0; i < 5; ++i) {
    randomize_strategies(tables, rng());
    const auto r = exploitability(t, current_profile(t, tables));
    EXPECT_GE(r.exploitability, 0.0);
    EXPECT_NEAR(r.exploitability, (r.value[0] + r.value[1]) / 2, 1e-15);
    EXPECT_NEAR(r.pot_units, r.exploitability / t.starting_pot, 1e-15);
    EXPECT_NEAR(r.mbb_per_game, r.exploitability / t.big_blind * 1000, 1e-9);
  }
}

TEST(BestResponse, HistoryTwinAgreesOnLeduc) {
  const GameTree t = build_leduc();
  StrategyTables tables = make_tables(t);
  randomize_strategies(tables, 7);
  const Profile p = current_profile(t, tables);
  for (int player : {0, 1}) {
    EXPECT_NEAR(best_response_value(t, p, player), best_response_value_history(t, p, player),
                1e-12);
  }
}

TEST(BestResponse, HistoryTwinAgreesOnRiver) {
  const GameTree t = testing::small_river();
  StrategyTables tables = make_tables(t);
  randomize_strategies(tables, 8);
  const Profile p = current_profile(t, tables);
  for (int player : {0, 1}) {
    const double fast = best_response_value(t, p, player);
    EXPECT_NEAR(fast, best_response_value_history(t, p, player), 1e-10 * std::max(1.0, fast));
  }
}

TEST(BestResponse, ProfileValuesAgreeWithGameValue) {
  const GameTree t = build_leduc();
  StrategyTables tables = make_tables(t);
  randomize_strategies(tables, 9);
  const Profile p = current_profile(t, tables);
  const auto pv = profile_node_values(t, p, 0);
  // Root values are counterfactual: weight by hero reach (1) and deal weight.
  double v = 0.0;
  for (int h = 0; h < t.num_hands(); ++h) v += pv.values[h];
  EXPECT_NEAR(v * t.root_deal_weight(), game_value(t, p), 1e-14);
}

TEST(SmallEquilibrium, KuhnValue) {
  const auto r = lp_equilibrium_small(build_kuhn(), 1e-5);
  EXPECT_NEAR(r.value, -1.0 / 18.0, 1e-6);
  EXPECT_LE(r.exploitability, 1e-5);
}

TEST(SmallEquilibrium, LeducValue) {
  // Frozen from an independent sequence-form linear program.
  const auto r = lp_equilibrium_small(build_leduc(), 1e-5);
  EXPECT_NEAR(r.value, -0.085606424078, 1e-4);
  EXPECT_LE(r.exploitability, 1e-5);
}

TEST(SmallEquilibrium, RefusesLargeTrees) {
  EXPECT_THROW(lp_equilibrium_small(testing::small_river()), std::invalid_argument);
}

TEST(DealAlgebra, CountsKuhnHistories) {
  const GameTree t = build_kuhn();
  DealAlgebra algebra(t);
  EXPECT_EQ(algebra.count_histories(), 30);
}

}  // namespace
}  // namespace pcfr
