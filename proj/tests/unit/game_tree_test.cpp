#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "pcfr/game_tree.hpp"
#include "pcfr/poker_games.hpp"
#include "test_support.hpp"

namespace pcfr {
namespace {

TEST(Kuhn, Structure) {
  const GameTree t = build_kuhn();
  EXPECT_FALSE(validate_tree(t).has_value());
  EXPECT_EQ(t.num_hands(), 3);
  EXPECT_EQ(t.count_infosets(0), 6);
  EXPECT_EQ(t.count_infosets(1), 6);
  int terminals = 0;
  for (const auto& n : t.nodes) terminals += n.is_terminal();
  // 5 public terminals, 6 ordered deals each.
  EXPECT_EQ(terminals * 6, 30);
  EXPECT_DOUBLE_EQ(t.root_deal_weight(), 1.0 / 6.0);
}

TEST(Kuhn, ChainsOfPlayerZero) {
  const GameTree t = build_kuhn();
  const auto chains = build_infoset_forest(t, 0);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0].node_ids, (std::vector<int>{0, 3}));
  EXPECT_EQ(chains[0].parent_node, (std::vector<int>{-1, 0}));
  EXPECT_EQ(chains[0].parent_action, (std::vector<int>{-1, 0}));
}

GameTree single_decision() {
  GameTree t;
  t.deck_size = 3;
  t.deck = {0, 1, 2};
  t.hands = enumerate_hands(t.deck, {}, 1);
  t.rankings = {{1, 2, 3}};
  t.starting_pot = 2;
  PublicNode root;
  root.kind = NodeKind::kDecision;
  root.actor = 0;
  root.actions = {"a", "b"};
  root.children = {1, 2};
  root.pot = 2;
  t.nodes.push_back(root);
  for (int i = 1; i <= 2; ++i) {
    PublicNode sd;
    sd.id = i;
    sd.kind = NodeKind::kShowdown;
    sd.parent = 0;
    sd.parent_action = i - 1;
    sd.depth = 1;
    sd.pot = 2;
    sd.ranking = 0;
    sd.contributed = {1, 1};
    t.nodes.push_back(sd);
  }
  return t;
}

TEST(GameCore, SingleDecisionChain) {
  const GameTree t = single_decision();
  EXPECT_FALSE(validate_tree(t).has_value());
  const auto chains = build_infoset_forest(t, 0);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0].node_ids, std::vector<int>{0});
  EXPECT_TRUE(build_infoset_forest(t, 1).empty());
}

TEST(GameCore, ValidateReportsBadNodes) {
  GameTree t = single_decision();
  t.nodes[1].children = {2};
  auto d = validate_tree(t);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->node_id, 1);

  GameTree leduc = build_leduc();
  for (auto& n : leduc.nodes) {
    if (n.kind == NodeKind::kChance) {
      for (auto& w : n.chance_weights) w *= 0.9;
      d = validate_tree(leduc);
      ASSERT_TRUE(d.has_value());
      EXPECT_EQ(d->node_id, n.id);
      break;
    }
  }
}

TEST(GameCore, TopologicalOrder) {
  const GameTree t = build_leduc();
  const auto order = topological_order(t);
  ASSERT_EQ(static_cast<int>(order.size()), t.num_nodes());
  std::vector<int> pos(t.num_nodes());
  for (int i = 0; i < t.num_nodes(); ++i) pos[order[i]] = i;
  for (const auto& n : t.nodes) {
    for (int c : n.children) EXPECT_LT(pos[n.id], pos[c]);
  }
  GameTree cyclic = single_decision();
  cyclic.nodes[1].kind = NodeKind::kDecision;
  cyclic.nodes[1].actor = 1;
  cyclic.nodes[1].children = {0};
  EXPECT_THROW(topological_order(cyclic), std::runtime_error);
}

TEST(GameCore, ChainsPartitionDecisionNodes) {
  SubgameConfig c;
  c.board = parse_cards("Ks Th 7d 4c 2s");
  c.spr = 4;
  c.n_raise = 2;
  const GameTree t = build_hunl_subgame(c);
  for (int p = 0; p < kNumPlayers; ++p) {
    std::set<int> seen;
    for (const auto& chain : build_infoset_forest(t, p)) {
      for (std::size_t i = 0; i < chain.node_ids.size(); ++i) {
        const int id = chain.node_ids[i];
        EXPECT_EQ(t[id].actor, p);
        EXPECT_TRUE(seen.insert(id).second);
        if (i > 0) {
          EXPECT_LT(chain.parent_node[i], id);
        }
      }
    }
    EXPECT_EQ(static_cast<int>(seen.size()), t.count_decision_nodes(p));
  }
}

// Independent Leduc rules: ante 1, bets of 2 then 4, at most two bets per
// round, six cards J J Q Q K K. Walks the built tree in child order and
// checks every node against a replay of the betting.
struct LeducOracle {
  const GameTree& t;
  std::int64_t infosets[2] = {0, 0};

  void walk(int id, int round, std::array<double, 2> in, int acted, int raises,
            std::vector<int> board) {
    const PublicNode& n = t[id];
    const int actor = acted % 2;
    ASSERT_EQ(n.kind, NodeKind::kDecision);
    ASSERT_EQ(n.actor, actor);
    ASSERT_EQ(n.contributed, in);
    ASSERT_EQ(n.board, board);
    int live = 0;
    for (int card = 0; card < 6; ++card) {
      live += std::find(board.begin(), board.end(), card) == board.end();
    }
    infosets[actor] += live;
    const bool facing = in[1 - actor] > in[actor];
    std::vector<std::string> labels;
    if (facing) labels = {"f", "c"};
    else labels = {"k"};
    if (raises < 2) labels.push_back(facing ? "r" : "b");
    ASSERT_EQ(n.actions, labels);
    for (std::size_t a = 0; a < labels.size(); ++a) {
      const int c = n.children[a];
      const std::string& l = labels[a];
      if (l == "f") {
        ASSERT_EQ(t[c].kind, NodeKind::kFold);
        EXPECT_EQ(t[c].folder, actor);
        EXPECT_DOUBLE_EQ(t[c].fold_amount, in[actor]);
      } else if (l == "b" || l == "r") {
        auto next = in;
        next[actor] = in[1 - actor] + (round == 0 ? 2.0 : 4.0);
        walk(c, round, next, acted + 1, raises + 1, board);
      } else {
        auto next = in;
        next[actor] = in[1 - actor];
        if (l == "k" && acted == 0) {
          walk(c, round, next, 1, raises, board);
        } else if (round == 1) {
          ASSERT_EQ(t[c].kind, NodeKind::kShowdown);
          EXPECT_DOUBLE_EQ(t[c].pot, next[0] + next[1]);
          EXPECT_EQ(t[c].contributed[0], t[c].contributed[1]);
        } else {
          const PublicNode& ch = t[c];
          ASSERT_EQ(ch.kind, NodeKind::kChance);
          ASSERT_EQ(ch.num_children(), 6);
          for (int k = 0; k < 6; ++k) {
            EXPECT_EQ(t[ch.children[k]].dealt_card, k);
            walk(ch.children[k], 1, next, 0, 0, {k});
          }
        }
      }
    }
  }
};

TEST(Leduc, MatchesRulesOracle) {
  const GameTree t = build_leduc();
  EXPECT_FALSE(validate_tree(t).has_value());
  EXPECT_EQ(t.deck_size, 6);
  EXPECT_EQ(t.num_hands(), 6);
  LeducOracle oracle{t};
  oracle.walk(0, 0, {1.0, 1.0}, 0, 0, {});
  EXPECT_EQ(t.count_infosets(0), oracle.infosets[0]);
  EXPECT_EQ(t.count_infosets(1), oracle.infosets[1]);
}

TEST(Leduc, ChanceOutcomesAfterRemoval) {
  const GameTree t = build_leduc();
  for (const auto& n : t.nodes) {
    if (n.kind != NodeKind::kChance) continue;
    // One player's view: five cards remain; both hands known: four.
    for (int h = 0; h < t.num_hands(); ++h) {
      int seen = 0;
      for (int c : n.children) seen += !t.hands[h].contains(t[c].dealt_card);
      EXPECT_EQ(seen, 5);
    }
    double conditional = 0.0;
    for (int c : n.children) {
      if (t[c].dealt_card != 0 && t[c].dealt_card != 3) conditional += t.chance_factor(c);
    }
    EXPECT_NEAR(conditional, 1.0, 1e-15);
  }
}

TEST(Hunl, CheckCheckShowdownKeepsStartingPot) {
  SubgameConfig c;
  c.board = parse_cards("Ks Th 7d 4c 2s");
  c.spr = 100;
  c.starting_pot = 10;
  const GameTree t = build_hunl_subgame(c);
  EXPECT_FALSE(validate_tree(t).has_value());
  EXPECT_EQ(t.num_hands(), 1081);
  const int after_check = t[0].children[0];
  const int sd = t[after_check].children[0];
  EXPECT_EQ(t[sd].kind, NodeKind::kShowdown);
  EXPECT_DOUBLE_EQ(t[sd].pot, 10.0);
}

TEST(Hunl, ChipAccounting) {
  SubgameConfig c;
  c.board = parse_cards("Ks Th 7d 4c 2s");
  c.spr = 16;
  c.n_raise = 3;
  c.starting_pot = 10;
  const GameTree t = build_hunl_subgame(c);
  const double total = c.starting_pot / 2 + c.spr * c.starting_pot;
  for (const auto& n : t.nodes) {
    EXPECT_NEAR(n.pot, n.contributed[0] + n.contributed[1], 1e-9);
    EXPECT_LE(n.contributed[0], total + 1e-9);
    EXPECT_LE(n.contributed[1], total + 1e-9);
    if (n.kind == NodeKind::kFold) {
      // The folder loses the half of the starting pot plus its own bets.
      EXPECT_DOUBLE_EQ(n.fold_amount, n.contributed[n.folder]);
      EXPECT_LT(n.contributed[n.folder], n.contributed[1 - n.folder]);
    }
    if (n.kind == NodeKind::kShowdown) {
      EXPECT_NEAR(n.contributed[0], n.contributed[1], 1e-9);
    }
  }
}

// Target public-node counts are about 45 (SPR 4, two raise sizes) and 853
// (SPR 64, three). They depend on raise sizing, so only the order of
// magnitude is checked.
TEST(Hunl, NodeCountsOfExpectedOrder) {
  SubgameConfig c;
  c.board = parse_cards("Ks Th 7d 4c 2s");
  c.spr = 4;
  c.n_raise = 2;
  const int small = build_hunl_subgame(c).num_nodes();
  c.spr = 64;
  c.n_raise = 3;
  const int large = build_hunl_subgame(c).num_nodes();
  EXPECT_GE(small, 45 / 2);
  EXPECT_LE(small, 45 * 2);
  EXPECT_GE(large, 853 / 2);
  EXPECT_LE(large, 853 * 2);
}

TEST(Hunl, DepthLimitedTurnEndsInLeaves) {
  SubgameConfig c;
  c.street = Street::kTurn;
  c.board = parse_cards("Ks Th 7d 4c");
  c.spr = 2;
  const GameTree t = build_hunl_subgame(c);
  EXPECT_FALSE(validate_tree(t).has_value());
  int leaves = 0;
  for (const auto& n : t.nodes) {
    leaves += n.kind == NodeKind::kLeaf;
    EXPECT_NE(n.kind, NodeKind::kChance);
  }
  EXPECT_GT(leaves, 0);
  c.depth_limited = false;
  const GameTree full = build_hunl_subgame(c);
  for (const auto& n : full.nodes) EXPECT_NE(n.kind, NodeKind::kLeaf);
}

TEST(Hunl, ConfigValidation) {
  SubgameConfig c;
  c.board = parse_cards("Ks Th 7d");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.board = parse_cards("Ks Th 7d 4c 4c");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.board = parse_cards("Ks Th 7d 4c 2s");
  c.spr = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(PreflopToy, AllHands) {
  SubgameConfig c;
  c.spr = 2;
  const GameTree t = build_preflop_toy(c);
  EXPECT_FALSE(validate_tree(t).has_value());
  EXPECT_EQ(t.num_hands(), 1326);
  EXPECT_TRUE(t.board.empty());
}

}  // namespace
}  // namespace pcfr
