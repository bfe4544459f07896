#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcfr/game_tree.hpp"
#include "pcfr/leaf_eval.hpp"
#include "pcfr/strategy.hpp"

namespace pcfr {

struct BucketMap {
  std::vector<int> bucket_of;  // per hand
  int buckets = 0;
  bool lossless = false;

  int num_hands() const { return static_cast<int>(bucket_of.size()); }
  std::vector<int> sizes() const;
  std::vector<std::vector<int>> members() const;
  // Throws std::invalid_argument unless ids are dense in [0, buckets).
  void validate(int hands) const;
};

// Suit-isomorphism classes of two-card hands on an empty board: pairs,
// suited and offsuit rank combinations. 169 classes over all 1326 hands.
BucketMap lossless_preflop_buckets(std::span<const Hand> hands);
BucketMap lossless_preflop_buckets();
// "AA", "AKs", "72o".
std::string preflop_class_name(const Hand& hand);

// Sparse 0/1 hands x buckets membership; both directions are single passes
// over the hand index.
std::vector<double> project_range(const BucketMap& map, std::span<const double> hand_range);
std::vector<double> lift_values(const BucketMap& map, std::span<const double> bucket_values);

// Text lines "hand_id bucket_id"; '#' starts a comment.
BucketMap read_bucket_map(const std::string& path, int hands);
void write_bucket_map(const std::string& path, const BucketMap& map);

struct PruneMask {
  std::vector<std::vector<char>> removed;  // per node, per action

  static PruneMask none(const GameTree& tree);
  int removed_count() const;
};

// Text lines "node_id action_index".
PruneMask read_prune_mask(const std::string& path, const GameTree& tree);
void write_prune_mask(const std::string& path, const PruneMask& mask);

struct PrunedTree {
  GameTree tree;
  std::vector<int> old_node;                 // new id -> original id
  std::vector<int> new_node;                 // original id -> new id or -1
  std::vector<std::vector<int>> old_action;  // per new node: new action -> original action
  double rho = 1.0;                          // surviving nodes / original nodes
};

// Deletes removed actions with their subtrees. Throws std::invalid_argument
// when a mask removes every action of a node or touches a non-decision
// node.
PrunedTree apply_prune(const GameTree& tree, const PruneMask& mask);

// Strategy on the original tree: pruned actions get 0, nodes that no
// longer exist get uniform rows.
Profile lift_profile(const PrunedTree& pruned, const GameTree& original, const Profile& profile);

// Per (decision node, action) value interval [lower, upper] for the acting
// player, in chips conditional on reaching the node.
struct ActionBounds {
  std::vector<std::vector<std::pair<double, double>>> interval;
};

// Removes action a iff some sibling a' has lower(a') > upper(a); never
// removes the last action of a node.
PruneMask interval_dominance_pruner(const GameTree& tree, const ActionBounds& bounds);

// Bounds from a fixed (near-)equilibrium profile: per action, the range
// over the actor's live hands of the conditional action value, widened by
// `slack`.
ActionBounds exact_action_bounds(const GameTree& tree, const Profile& equilibrium, double slack,
                                 Evaluator* evaluator = nullptr);

}  // namespace pcfr
