#include "pcfr/strategy.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

namespace pcfr {

StrategyTables make_tables(const GameTree& tree, const RowAbstraction& rows) {
  StrategyTables t;
  t.block_of_node.assign(tree.num_nodes(), -1);
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    InfosetBlock b;
    b.node_id = node.id;
    b.player = node.actor;
    b.actions = node.num_children();
    b.row_of = rows.for_round(node.round);
    if (b.row_of) {
      int max_row = -1;
      for (int r : *b.row_of) max_row = std::max(max_row, r);
      b.rows = max_row + 1;
    } else {
      b.rows = tree.num_hands();
    }
    const std::size_t n = static_cast<std::size_t>(b.rows) * b.actions;
    b.strategy.assign(n, 1.0 / b.actions);
    b.cum_regret.assign(n, 0.0);
    b.cum_strategy.assign(n, 0.0);
    b.pred.assign(n, 0.0);
    t.block_of_node[node.id] = static_cast<int>(t.blocks.size());
    t.blocks.push_back(std::move(b));
  }
  return t;
}

Profile uniform_profile(const GameTree& tree) {
  Profile p;
  p.node.resize(tree.num_nodes());
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    p.node[node.id].assign(static_cast<std::size_t>(tree.num_hands()) * node.num_children(),
                           1.0 / node.num_children());
  }
  return p;
}

namespace {

template <typename RowFn>
Profile lift_rows(const GameTree& tree, const StrategyTables& tables, RowFn fn) {
  Profile p;
  p.node.resize(tree.num_nodes());
  for (const auto& b : tables.blocks) {
    auto& out = p.node[b.node_id];
    out.resize(static_cast<std::size_t>(tree.num_hands()) * b.actions);
    for (int h = 0; h < tree.num_hands(); ++h) {
      fn(b, b.row(h), std::span<double>(out.data() + static_cast<std::size_t>(h) * b.actions,
                                        b.actions));
    }
  }
  return p;
}

}  // namespace

Profile current_profile(const GameTree& tree, const StrategyTables& tables) {
  return lift_rows(tree, tables, [](const InfosetBlock& b, int r, std::span<double> out) {
    auto row = b.strategy_row(r);
    std::copy(row.begin(), row.end(), out.begin());
  });
}

Profile extract_average_strategy(const GameTree& tree, const StrategyTables& tables) {
  return lift_rows(tree, tables, [](const InfosetBlock& b, int r, std::span<double> out) {
    normalize_average(
        std::span<const double>(b.cum_strategy.data() + static_cast<std::size_t>(r) * b.actions,
                                b.actions),
        out);
  });
}

void randomize_strategies(StrategyTables& tables, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (auto& b : tables.blocks) {
    for (int r = 0; r < b.rows; ++r) {
      auto row = b.strategy_row(r);
      double sum = 0.0;
      for (auto& x : row) sum += (x = u(rng));
      for (auto& x : row) x /= sum;
    }
  }
}

std::string format_profile(const GameTree& tree, const Profile& profile) {
  std::ostringstream os;
  char buf[32];
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    const int na = node.num_children();
    for (int h = 0; h < tree.num_hands(); ++h) {
      if (!tree.hand_valid(node.id, h)) continue;
      const auto& hand = tree.hands[h];
      os << node.id << ' ' << node.actor << ' ';
      os << hand.cards[0];
      if (hand.size == 2) os << ',' << hand.cards[1];
      for (double x : profile.row(node.id, h, na)) {
        std::snprintf(buf, sizeof buf, " %.12f", x);
        os << buf;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace pcfr
