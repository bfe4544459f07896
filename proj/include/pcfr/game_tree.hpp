#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcfr/cards.hpp"

namespace pcfr {

inline constexpr int kNumPlayers = 2;

enum class NodeKind : std::uint8_t {
  kDecision,
  kChance,
  kFold,
  kShowdown,
  kLeaf,  // depth-limited frontier, valued by a leaf evaluator
};

const char* to_string(NodeKind kind);

struct PublicNode {
  int id = 0;
  NodeKind kind = NodeKind::kDecision;
  int actor = -1;           // decision nodes
  double pot = 0.0;         // chips in the middle, both players
  double fold_amount = 0.0; // fold terminals: chips the folder loses
  int folder = -1;          // fold terminals
  std::vector<std::string> actions;
  std::vector<int> children;
  std::vector<double> chance_weights;  // chance nodes, one per child
  int parent = -1;
  int parent_action = -1;
  int depth = 0;
  int round = 0;            // betting rounds completed since the root
  int dealt_card = -1;      // card revealed on the edge into this node
  std::vector<int> board;   // all public cards at this node
  int ranking = -1;         // showdown nodes: index into GameTree::rankings
  std::array<double, kNumPlayers> contributed{};  // chips each player has in

  bool is_terminal() const {
    return kind == NodeKind::kFold || kind == NodeKind::kShowdown;
  }
  int num_children() const { return static_cast<int>(children.size()); }
};

// Public-state tree. Nodes are stored in topological (parent-before-child)
// order and node 0 is the root. Both players share the same hand list.
struct GameTree {
  std::string name;
  std::vector<PublicNode> nodes;
  int deck_size = 0;           // card universe size, indexes per-card sums
  std::vector<int> deck;       // cards still in play at the root
  std::vector<int> board;      // public cards at the root
  std::vector<Hand> hands;
  int hand_size = 1;
  // Showdown strength per hand, larger wins; 0 marks a hand that collides
  // with that showdown's board.
  std::vector<std::vector<int>> rankings;
  double starting_pot = 0.0;
  double stack = 0.0;          // chips behind per player at the root
  double big_blind = 1.0;      // unit for milli-big-blinds per game

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_hands() const { return static_cast<int>(hands.size()); }
  const PublicNode& operator[](int id) const { return nodes[id]; }

  // Probability of the chance edge into `child` for any pair of private
  // hands that does not hold the dealt card. Chance weights are the public
  // (unconditional) outcome distribution; conditioning on 2 * hand_size
  // known private cards rescales every compatible outcome equally.
  double chance_factor(int child) const;

  // 1 / (number of ordered, card-disjoint private hand pairs at the root).
  double root_deal_weight() const;

  // True when `hand` does not collide with the node's public cards.
  bool hand_valid(int node, int hand) const;

  int count_decision_nodes(int player = -1) const;
  // Sum over decision nodes of hands that are possible there.
  std::int64_t count_infosets(int player = -1) const;
};

// Maximal same-player subtree of one player's decision nodes.
struct Chain {
  int player = 0;
  std::vector<int> node_ids;  // parent before child
  // Per node_ids[i]: nearest same-player decision ancestor (-1 at the chain
  // root) and the action taken there on the path.
  std::vector<int> parent_node;
  std::vector<int> parent_action;
};

std::vector<Chain> build_infoset_forest(const GameTree& tree, int player);

// Parent-before-child order of node ids. Throws std::runtime_error on a
// cycle or a dangling child link.
std::vector<int> topological_order(const GameTree& tree);

struct TreeDiagnostic {
  int node_id = -1;
  std::string message;
};

// First violated invariant, or nullopt for a well-formed tree.
std::optional<TreeDiagnostic> validate_tree(const GameTree& tree);

// Debug dump: one line per node.
std::string dump_tree(const GameTree& tree);

}  // namespace pcfr
