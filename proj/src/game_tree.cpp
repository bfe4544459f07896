#include "pcfr/game_tree.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pcfr {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kDecision: return "decision";
    case NodeKind::kChance: return "chance";
    case NodeKind::kFold: return "fold";
    case NodeKind::kShowdown: return "showdown";
    case NodeKind::kLeaf: return "leaf";
  }
  return "?";
}

double GameTree::chance_factor(int child) const {
  const auto& node = nodes[child];
  const auto& parent = nodes[node.parent];
  const int outcomes = parent.num_children();
  const int feasible = outcomes - kNumPlayers * hand_size;
  return parent.chance_weights[node.parent_action] * outcomes / feasible;
}

double GameTree::root_deal_weight() const {
  std::int64_t pairs = 0;
  for (const auto& a : hands) {
    for (const auto& b : hands) {
      if (!a.overlaps(b)) ++pairs;
    }
  }
  return pairs > 0 ? 1.0 / static_cast<double>(pairs) : 0.0;
}

bool GameTree::hand_valid(int node, int hand) const {
  return !hands[hand].overlaps(nodes[node].board);
}

int GameTree::count_decision_nodes(int player) const {
  int n = 0;
  for (const auto& node : nodes) {
    if (node.kind == NodeKind::kDecision && (player < 0 || node.actor == player)) {
      ++n;
    }
  }
  return n;
}

std::int64_t GameTree::count_infosets(int player) const {
  std::int64_t n = 0;
  for (const auto& node : nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    if (player >= 0 && node.actor != player) continue;
    for (int h = 0; h < num_hands(); ++h) {
      if (hand_valid(node.id, h)) ++n;
    }
  }
  return n;
}

std::vector<Chain> build_infoset_forest(const GameTree& tree, int player) {
  // nearest[n]: nearest decision node of `player` that is a strict ancestor
  // of n, with the action leading towards n.
  const int n = tree.num_nodes();
  std::vector<int> nearest(n, -1);
  std::vector<int> nearest_action(n, -1);
  std::vector<int> chain_of(n, -1);
  std::vector<Chain> chains;
  for (int id = 0; id < n; ++id) {
    const auto& node = tree[id];
    if (node.parent >= 0) {
      const auto& parent = tree[node.parent];
      if (parent.kind == NodeKind::kDecision && parent.actor == player) {
        nearest[id] = parent.id;
        nearest_action[id] = node.parent_action;
      } else {
        nearest[id] = nearest[node.parent];
        nearest_action[id] = nearest_action[node.parent];
      }
    }
    if (node.kind != NodeKind::kDecision || node.actor != player) continue;
    int chain = nearest[id] >= 0 ? chain_of[nearest[id]] : -1;
    if (chain < 0) {
      chain = static_cast<int>(chains.size());
      chains.emplace_back();
      chains.back().player = player;
    }
    chain_of[id] = chain;
    chains[chain].node_ids.push_back(id);
    chains[chain].parent_node.push_back(nearest[id]);
    chains[chain].parent_action.push_back(nearest_action[id]);
  }
  return chains;
}

std::vector<int> topological_order(const GameTree& tree) {
  const int n = tree.num_nodes();
  std::vector<int> indegree(n, 0);
  for (const auto& node : tree.nodes) {
    for (int c : node.children) {
      if (c < 0 || c >= n) {
        throw std::runtime_error("malformed tree: node " +
                                 std::to_string(node.id) +
                                 " links to missing child " + std::to_string(c));
      }
      ++indegree[c];
    }
  }
  std::vector<int> order;
  order.reserve(n);
  for (int id = 0; id < n; ++id) {
    if (indegree[id] == 0) order.push_back(id);
  }
  // Kahn's algorithm; children are released in child-list order.
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (int c : tree[order[head]].children) {
      if (--indegree[c] == 0) order.push_back(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::runtime_error("malformed tree: cycle detected");
  }
  return order;
}

std::optional<TreeDiagnostic> validate_tree(const GameTree& tree) {
  auto fail = [](int id, std::string msg) {
    return std::optional<TreeDiagnostic>(TreeDiagnostic{id, std::move(msg)});
  };
  if (tree.nodes.empty()) return fail(-1, "empty tree");
  if (tree.hands.empty()) return fail(-1, "no hands");
  const int n = tree.num_nodes();
  std::vector<int> parent_count(n, 0);
  for (int id = 0; id < n; ++id) {
    const auto& node = tree[id];
    if (node.id != id) return fail(id, "node id does not match its position");
    if (!(node.pot > 0.0)) return fail(id, "pot must be positive");
    if (node.children.size() != node.actions.size()) {
      return fail(id, "children count differs from actions count");
    }
    switch (node.kind) {
      case NodeKind::kFold:
      case NodeKind::kShowdown:
      case NodeKind::kLeaf:
        if (!node.children.empty()) {
          return fail(id, std::string(to_string(node.kind)) + " node has children");
        }
        break;
      case NodeKind::kDecision:
        if (node.children.empty()) return fail(id, "decision node without children");
        if (node.actor < 0 || node.actor >= kNumPlayers) {
          return fail(id, "decision node actor out of range");
        }
        break;
      case NodeKind::kChance: {
        if (node.children.empty()) return fail(id, "chance node without children");
        if (node.chance_weights.size() != node.children.size()) {
          return fail(id, "chance weights do not match children");
        }
        double sum = 0.0;
        for (double w : node.chance_weights) {
          if (w < 0.0) return fail(id, "negative chance weight");
          sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          return fail(id, "chance weights sum to " + std::to_string(sum));
        }
        if (node.num_children() <= kNumPlayers * tree.hand_size) {
          return fail(id, "chance node has too few outcomes");
        }
        break;
      }
    }
    if (node.kind == NodeKind::kFold) {
      if (node.folder < 0 || node.folder >= kNumPlayers) {
        return fail(id, "fold terminal without folder");
      }
      if (!(node.fold_amount > 0.0) || node.fold_amount > node.pot / 2 + 1e-9) {
        return fail(id, "fold amount outside (0, pot/2]");
      }
    }
    if (node.kind == NodeKind::kShowdown &&
        (node.ranking < 0 ||
         node.ranking >= static_cast<int>(tree.rankings.size()) ||
         static_cast<int>(tree.rankings[node.ranking].size()) != tree.num_hands())) {
      return fail(id, "showdown node without a hand ranking");
    }
    for (std::size_t a = 0; a < node.children.size(); ++a) {
      const int c = node.children[a];
      if (c <= id || c >= n) {
        return fail(id, "child " + std::to_string(c) + " breaks topological order");
      }
      ++parent_count[c];
      if (tree[c].parent != id || tree[c].parent_action != static_cast<int>(a)) {
        return fail(c, "parent link does not match child list");
      }
    }
  }
  if (tree[0].parent != -1) return fail(0, "root has a parent");
  for (int id = 1; id < n; ++id) {
    if (parent_count[id] != 1) return fail(id, "node is not reached exactly once");
  }
  return std::nullopt;
}

std::string dump_tree(const GameTree& tree) {
  std::ostringstream out;
  for (const auto& node : tree.nodes) {
    out << node.id << ' ' << to_string(node.kind) << " actor=" << node.actor
        << " pot=" << node.pot;
    if (node.kind == NodeKind::kFold) {
      out << " folder=" << node.folder << " amount=" << node.fold_amount;
    }
    out << " children=[";
    for (std::size_t a = 0; a < node.children.size(); ++a) {
      if (a) out << ',';
      out << node.actions[a] << ':' << node.children[a];
    }
    out << "]\n";
  }
  return out.str();
}

}  // namespace pcfr
