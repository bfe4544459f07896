#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcfr/cfr_variants.hpp"
#include "pcfr/game_tree.hpp"

namespace pcfr {

// Tables of one public decision node: rows x actions, row-major. A row is
// one information set: a hand, or a bucket of hands when the strategy is
// abstracted.
struct InfosetBlock {
  int node_id = -1;
  int player = -1;
  int rows = 0;
  int actions = 0;
  // hand -> row; null means the identity map.
  std::shared_ptr<const std::vector<int>> row_of;
  std::vector<double> strategy;
  std::vector<double> cum_regret;
  std::vector<double> cum_strategy;
  std::vector<double> pred;  // PCFR+ prediction

  int row(int hand) const { return row_of ? (*row_of)[hand] : hand; }
  std::span<double> strategy_row(int r) {
    return {strategy.data() + static_cast<std::size_t>(r) * actions,
            static_cast<std::size_t>(actions)};
  }
  std::span<const double> strategy_row(int r) const {
    return {strategy.data() + static_cast<std::size_t>(r) * actions,
            static_cast<std::size_t>(actions)};
  }
};

// Hand-to-row maps per betting round. An empty entry (or a round past the
// end) keeps one row per hand.
struct RowAbstraction {
  std::vector<std::shared_ptr<const std::vector<int>>> per_round;

  std::shared_ptr<const std::vector<int>> for_round(int round) const {
    if (round < static_cast<int>(per_round.size())) return per_round[round];
    return nullptr;
  }
};

struct StrategyTables {
  std::vector<int> block_of_node;  // -1 for non-decision nodes
  std::vector<InfosetBlock> blocks;

  InfosetBlock& at(int node) { return blocks[block_of_node[node]]; }
  const InfosetBlock& at(int node) const { return blocks[block_of_node[node]]; }
};

// Uniform current strategy, zero regrets and sums.
StrategyTables make_tables(const GameTree& tree, const RowAbstraction& rows = {});

// Hand-space behaviour strategy for both players: per decision node a
// hands x actions matrix; empty for other nodes.
struct Profile {
  std::vector<std::vector<double>> node;

  std::span<const double> row(int node_id, int hand, int actions) const {
    return {node[node_id].data() + static_cast<std::size_t>(hand) * actions,
            static_cast<std::size_t>(actions)};
  }
};

Profile uniform_profile(const GameTree& tree);
Profile current_profile(const GameTree& tree, const StrategyTables& tables);
// Normalized cum_strategy rows, uniform where a row never accumulated.
Profile extract_average_strategy(const GameTree& tree, const StrategyTables& tables);

// Random rows from a seeded generator; used to probe equivalence at
// arbitrary strategies.
void randomize_strategies(StrategyTables& tables, std::uint64_t seed);

// One line per (node, hand): node id, hand cards, probabilities.
std::string format_profile(const GameTree& tree, const Profile& profile);

}  // namespace pcfr
