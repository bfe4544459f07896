#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>

#include "pcfr/abstraction.hpp"
#include "pcfr/poker_games.hpp"
#include "pcfr/reference.hpp"
#include "pcfr/solver.hpp"
#include "test_support.hpp"

namespace pcfr {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST(PreflopBuckets, ClassSizes) {
  const BucketMap map = lossless_preflop_buckets();
  EXPECT_EQ(map.buckets, 169);
  EXPECT_EQ(map.num_hands(), 1326);
  EXPECT_TRUE(map.lossless);
  const auto hands = enumerate_hands(full_deck(), {}, 2);
  std::map<std::string, int> count;
  for (const auto& h : hands) ++count[preflop_class_name(h)];
  EXPECT_EQ(count.size(), 169u);
  EXPECT_EQ(count["AA"], 6);
  EXPECT_EQ(count["AKs"], 4);
  EXPECT_EQ(count["AKo"], 12);
  EXPECT_EQ(count["72o"], 12);
  int total = 0;
  for (int s : map.sizes()) total += s;
  EXPECT_EQ(total, 1326);
  // Same class name, same bucket.
  std::map<std::string, int> bucket_of_class;
  for (int h = 0; h < 1326; ++h) {
    const auto [it, fresh] = bucket_of_class.emplace(preflop_class_name(hands[h]), map.bucket_of[h]);
    EXPECT_EQ(it->second, map.bucket_of[h]);
  }
}

TEST(PreflopBuckets, ClassNames) {
  EXPECT_EQ(preflop_class_name(Hand{{parse_card("As"), parse_card("Ah")}}), "AA");
  EXPECT_EQ(preflop_class_name(Hand{{parse_card("Kd"), parse_card("Ad")}}), "AKs");
  EXPECT_EQ(preflop_class_name(Hand{{parse_card("2c"), parse_card("7h")}}), "72o");
}

TEST(Projection, AdjointAndBruteForce) {
  const BucketMap map = lossless_preflop_buckets();
  std::mt19937_64 rng(1);
  const auto r = testing::random_range(rng, 1326);
  const auto v = testing::random_range(rng, 169, 0.0);
  const auto pr = project_range(map, r);
  const auto lv = lift_values(map, v);
  double lhs = 0.0;
  double rhs = 0.0;
  for (int b = 0; b < 169; ++b) lhs += pr[b] * v[b];
  for (int h = 0; h < 1326; ++h) rhs += r[h] * lv[h];
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
  for (int b = 0; b < 169; ++b) {
    double s = 0.0;
    for (int h = 0; h < 1326; ++h) {
      if (map.bucket_of[h] == b) s += r[h];
    }
    EXPECT_NEAR(pr[b], s, 1e-12);
  }
  for (int h = 0; h < 1326; ++h) EXPECT_EQ(lv[h], v[map.bucket_of[h]]);
}

TEST(BucketMap, ValidateAndRoundTrip) {
  BucketMap bad;
  bad.bucket_of = {0, 2};
  bad.buckets = 3;
  EXPECT_THROW(bad.validate(2), std::invalid_argument);
  BucketMap ok;
  ok.bucket_of = {1, 0, 1};
  ok.buckets = 2;
  EXPECT_NO_THROW(ok.validate(3));
  EXPECT_THROW(ok.validate(4), std::invalid_argument);
  const auto path = temp_path("pcfr_buckets_test.txt");
  write_bucket_map(path, ok);
  const BucketMap back = read_bucket_map(path, 3);
  EXPECT_EQ(back.bucket_of, ok.bucket_of);
  EXPECT_EQ(back.buckets, 2);
  std::remove(path.c_str());
  EXPECT_THROW(read_bucket_map(path, 3), std::runtime_error);
}

TEST(Prune, EmptyMaskKeepsTree) {
  const GameTree t = build_leduc();
  const PrunedTree p = apply_prune(t, PruneMask::none(t));
  EXPECT_EQ(p.rho, 1.0);
  EXPECT_EQ(p.tree.num_nodes(), t.num_nodes());
  EXPECT_FALSE(validate_tree(p.tree).has_value());
}

TEST(Prune, RemovingKuhnRootBet) {
  const GameTree t = build_kuhn();
  PruneMask mask = PruneMask::none(t);
  mask.removed[0][1] = 1;
  EXPECT_EQ(mask.removed_count(), 1);
  const PrunedTree p = apply_prune(t, mask);
  EXPECT_EQ(p.tree.num_nodes(), 6);
  EXPECT_DOUBLE_EQ(p.rho, 6.0 / 9.0);
  EXPECT_FALSE(validate_tree(p.tree).has_value());
  EXPECT_EQ(p.tree[0].num_children(), 1);
  EXPECT_EQ(p.new_node[6], -1);
  EXPECT_EQ(p.old_node[0], 0);

  // Lifted strategy never bets at the root; lost nodes are uniform.
  Profile lifted = lift_profile(p, t, uniform_profile(p.tree));
  for (int h = 0; h < 3; ++h) {
    EXPECT_EQ(lifted.node[0][2 * h], 1.0);
    EXPECT_EQ(lifted.node[0][2 * h + 1], 0.0);
    EXPECT_EQ(lifted.node[6][2 * h], 0.5);
  }
}

TEST(Prune, RejectsRemovingEveryAction) {
  const GameTree t = build_kuhn();
  PruneMask mask = PruneMask::none(t);
  mask.removed[0] = {1, 1};
  EXPECT_THROW(apply_prune(t, mask), std::invalid_argument);
  PruneMask terminal = PruneMask::none(t);
  terminal.removed[2] = {1};
  EXPECT_THROW(apply_prune(t, terminal), std::invalid_argument);
}

TEST(Prune, MaskFileRoundTrip) {
  const GameTree t = build_kuhn();
  PruneMask mask = PruneMask::none(t);
  mask.removed[1][0] = 1;
  const auto path = temp_path("pcfr_mask_test.txt");
  write_prune_mask(path, mask);
  EXPECT_EQ(read_prune_mask(path, t).removed, mask.removed);
  std::remove(path.c_str());
}

ActionBounds single_node_bounds(const GameTree& t, std::vector<std::pair<double, double>> iv) {
  ActionBounds b;
  b.interval.resize(t.num_nodes());
  for (const auto& n : t.nodes) {
    if (n.kind == NodeKind::kDecision) b.interval[n.id].assign(n.num_children(), {-1.0, 1.0});
  }
  b.interval[0] = std::move(iv);
  return b;
}

TEST(Pruner, IntervalDominance) {
  const GameTree t = build_kuhn();
  // Disjoint intervals: the lower one goes.
  auto mask = interval_dominance_pruner(t, single_node_bounds(t, {{0.0, 1.0}, {2.0, 3.0}}));
  EXPECT_EQ(mask.removed[0], (std::vector<char>{1, 0}));
  EXPECT_EQ(mask.removed_count(), 1);
  // Overlapping intervals: nothing goes.
  mask = interval_dominance_pruner(t, single_node_bounds(t, {{0.0, 2.5}, {2.0, 3.0}}));
  EXPECT_EQ(mask.removed_count(), 0);
  // Touching intervals are not strictly dominated.
  mask = interval_dominance_pruner(t, single_node_bounds(t, {{0.0, 2.0}, {2.0, 3.0}}));
  EXPECT_EQ(mask.removed_count(), 0);
  EXPECT_THROW(interval_dominance_pruner(t, single_node_bounds(t, {{1.0, 0.0}, {2.0, 3.0}})),
               std::invalid_argument);
}

void expect_support_kept(const GameTree& t, const Profile& eq, const PruneMask& mask) {
  for (const auto& n : t.nodes) {
    if (n.kind != NodeKind::kDecision) continue;
    for (int a = 0; a < n.num_children(); ++a) {
      if (!mask.removed[n.id][a]) continue;
      for (int h = 0; h < t.num_hands(); ++h) {
        EXPECT_LE(eq.row(n.id, h, n.num_children())[a], 1e-3) << n.id << " " << a << " " << h;
      }
    }
  }
}

TEST(ExactBounds, KuhnAndLeducKeepSupport) {
  for (const GameTree& t : {build_kuhn(), build_leduc()}) {
    const auto eq = lp_equilibrium_small(t, 1e-5);
    const auto mask = interval_dominance_pruner(t, exact_action_bounds(t, eq.strategy, 1e-3));
    expect_support_kept(t, eq.strategy, mask);

    SolveOptions opts;
    opts.pipeline.variant.kind = VariantKind::kCfrPlus;
    opts.iterations = 2000;
    const auto full = run_solve(t, opts);
    const auto pruned = run_solve(t, opts, nullptr, &mask);
    EXPECT_LE(pruned.rho, 1.0);
    // Both solves land within their own exploitability of the game value.
    EXPECT_LE(full.final_exploitability.exploitability, 2e-4);
    EXPECT_LE(pruned.final_exploitability.exploitability, 2e-4);
    EXPECT_NEAR(game_value(t, pruned.average), eq.value, 4e-4);
    EXPECT_NEAR(game_value(t, full.average), eq.value, 4e-4);
  }
}

TEST(ExactBounds, RoyalBoardDropsFolds) {
  // Every hand plays the board, so calling always beats folding. Bounds come
  // from the uniform profile, under which betting also beats checking.
  SubgameConfig c;
  c.board = parse_cards("As Ks Qs Js Ts");
  c.spr = 1;
  c.n_raise = 1;
  c.starting_pot = 10;
  const GameTree t = build_hunl_subgame(c);
  const auto mask = interval_dominance_pruner(t, exact_action_bounds(t, uniform_profile(t), 1e-9));
  EXPECT_GT(mask.removed_count(), 0);
  for (const auto& n : t.nodes) {
    if (n.kind != NodeKind::kDecision) continue;
    for (int a = 0; a < n.num_children(); ++a) {
      if (n.actions[a] == "f") {
        EXPECT_TRUE(mask.removed[n.id][a]) << n.id;
      }
    }
  }
  const PrunedTree p = apply_prune(t, mask);
  EXPECT_LT(p.rho, 1.0);
  EXPECT_FALSE(validate_tree(p.tree).has_value());
}

TEST(RowAbstraction, LosslessPreflopMatchesUnabstracted) {
  SubgameConfig c;
  c.spr = 2;
  c.n_raise = 1;
  c.starting_pot = 2;
  const GameTree t = build_preflop_toy(c);
  SolveOptions opts;
  opts.pipeline.variant.kind = VariantKind::kCfrPlus;
  opts.iterations = 40;
  const auto plain = run_solve(t, opts);
  opts.pipeline.rows.per_round = {std::make_shared<const std::vector<int>>(
      lossless_preflop_buckets(t.hands).bucket_of)};
  const auto bucketed = run_solve(t, opts);
  double worst = 0.0;
  for (const auto& n : t.nodes) {
    if (n.kind != NodeKind::kDecision) continue;
    for (std::size_t i = 0; i < plain.average.node[n.id].size(); ++i) {
      worst = std::max(worst, std::abs(plain.average.node[n.id][i] - bucketed.average.node[n.id][i]));
    }
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_NEAR(plain.final_exploitability.exploitability,
              bucketed.final_exploitability.exploitability, 1e-6);
}

}  // namespace
}  // namespace pcfr
