#include "pcfr/abstraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pcfr/poker_games.hpp"
#include "pcfr/reference.hpp"

namespace pcfr {

// ------------------------------------------------------------- bucket maps

std::vector<int> BucketMap::sizes() const {
  std::vector<int> s(buckets, 0);
  for (int b : bucket_of) ++s[b];
  return s;
}

std::vector<std::vector<int>> BucketMap::members() const {
  std::vector<std::vector<int>> m(buckets);
  for (int h = 0; h < num_hands(); ++h) m[bucket_of[h]].push_back(h);
  return m;
}

void BucketMap::validate(int hands) const {
  if (num_hands() != hands) {
    throw std::invalid_argument("bucket map covers " + std::to_string(num_hands()) +
                                " hands, expected " + std::to_string(hands));
  }
  if (buckets <= 0) throw std::invalid_argument("bucket map has no buckets");
  std::vector<char> seen(buckets, 0);
  for (int h = 0; h < hands; ++h) {
    const int b = bucket_of[h];
    if (b < 0 || b >= buckets) {
      throw std::invalid_argument("hand " + std::to_string(h) + " has bucket " +
                                  std::to_string(b) + " outside [0, " +
                                  std::to_string(buckets) + ")");
    }
    seen[b] = 1;
  }
  for (int b = 0; b < buckets; ++b) {
    if (!seen[b]) throw std::invalid_argument("bucket " + std::to_string(b) + " is empty");
  }
}

namespace {

// Pairs 0..12, suited 13..90, offsuit 91..168.
int preflop_class(const Hand& hand) {
  if (hand.size != 2) throw std::invalid_argument("preflop classes need two-card hands");
  const int a = card_rank(hand.cards[0]);
  const int b = card_rank(hand.cards[1]);
  if (a == b) return a;
  const int hi = std::max(a, b);
  const int lo = std::min(a, b);
  const int combo = hi * (hi - 1) / 2 + lo;
  return card_suit(hand.cards[0]) == card_suit(hand.cards[1]) ? 13 + combo : 91 + combo;
}

}  // namespace

BucketMap lossless_preflop_buckets(std::span<const Hand> hands) {
  std::vector<int> canon(hands.size());
  std::vector<int> dense(169, -1);
  for (std::size_t h = 0; h < hands.size(); ++h) {
    canon[h] = preflop_class(hands[h]);
    dense[canon[h]] = 0;
  }
  BucketMap map;
  for (int& d : dense) {
    if (d == 0) d = map.buckets++;
  }
  map.bucket_of.resize(hands.size());
  for (std::size_t h = 0; h < hands.size(); ++h) map.bucket_of[h] = dense[canon[h]];
  map.lossless = true;
  return map;
}

BucketMap lossless_preflop_buckets() {
  const auto deck = full_deck();
  const auto hands = enumerate_hands(deck, {}, 2);
  return lossless_preflop_buckets(hands);
}

std::string preflop_class_name(const Hand& hand) {
  static constexpr char kRanks[] = "23456789TJQKA";
  const int a = card_rank(hand.cards[0]);
  const int b = card_rank(hand.cards[1]);
  std::string s{kRanks[std::max(a, b)], kRanks[std::min(a, b)]};
  if (a != b) s += card_suit(hand.cards[0]) == card_suit(hand.cards[1]) ? 's' : 'o';
  return s;
}

std::vector<double> project_range(const BucketMap& map, std::span<const double> hand_range) {
  if (static_cast<int>(hand_range.size()) != map.num_hands()) {
    throw std::invalid_argument("project_range: range has " + std::to_string(hand_range.size()) +
                                " entries, map has " + std::to_string(map.num_hands()));
  }
  std::vector<double> out(map.buckets, 0.0);
  for (int h = 0; h < map.num_hands(); ++h) out[map.bucket_of[h]] += hand_range[h];
  return out;
}

std::vector<double> lift_values(const BucketMap& map, std::span<const double> bucket_values) {
  if (static_cast<int>(bucket_values.size()) != map.buckets) {
    throw std::invalid_argument("lift_values: " + std::to_string(bucket_values.size()) +
                                " values, map has " + std::to_string(map.buckets) + " buckets");
  }
  std::vector<double> out(map.num_hands());
  for (int h = 0; h < map.num_hands(); ++h) out[h] = bucket_values[map.bucket_of[h]];
  return out;
}

namespace {

// Non-comment, non-blank lines as (line number, two integers).
std::vector<std::pair<int, std::pair<long, long>>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<int, std::pair<long, long>>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::istringstream is(line);
    long a = 0;
    long b = 0;
    if (!(is >> a)) continue;
    std::string rest;
    if (!(is >> b) || (is >> rest)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two integers");
    }
    out.push_back({lineno, {a, b}});
  }
  return out;
}

}  // namespace

BucketMap read_bucket_map(const std::string& path, int hands) {
  BucketMap map;
  map.bucket_of.assign(hands, -1);
  for (const auto& [lineno, p] : read_pairs(path)) {
    const auto [h, b] = p;
    if (h < 0 || h >= hands || b < 0) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": entry out of range");
    }
    if (map.bucket_of[h] >= 0) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": hand " +
                               std::to_string(h) + " listed twice");
    }
    map.bucket_of[h] = static_cast<int>(b);
    map.buckets = std::max(map.buckets, static_cast<int>(b) + 1);
  }
  for (int h = 0; h < hands; ++h) {
    if (map.bucket_of[h] < 0) {
      throw std::runtime_error(path + ": hand " + std::to_string(h) + " has no bucket");
    }
  }
  map.validate(hands);
  return map;
}

void write_bucket_map(const std::string& path, const BucketMap& map) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# hand_id bucket_id\n";
  for (int h = 0; h < map.num_hands(); ++h) out << h << ' ' << map.bucket_of[h] << '\n';
}

// ------------------------------------------------------------- prune masks

PruneMask PruneMask::none(const GameTree& tree) {
  PruneMask m;
  m.removed.resize(tree.num_nodes());
  for (const auto& node : tree.nodes) m.removed[node.id].assign(node.num_children(), 0);
  return m;
}

int PruneMask::removed_count() const {
  int n = 0;
  for (const auto& row : removed) n += static_cast<int>(std::count(row.begin(), row.end(), 1));
  return n;
}

PruneMask read_prune_mask(const std::string& path, const GameTree& tree) {
  PruneMask m = PruneMask::none(tree);
  for (const auto& [lineno, p] : read_pairs(path)) {
    const auto [node, action] = p;
    if (node < 0 || node >= tree.num_nodes() || action < 0 ||
        action >= tree[static_cast<int>(node)].num_children()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": no action " +
                               std::to_string(action) + " at node " + std::to_string(node));
    }
    m.removed[node][action] = 1;
  }
  return m;
}

void write_prune_mask(const std::string& path, const PruneMask& mask) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# node_id action_index\n";
  for (std::size_t n = 0; n < mask.removed.size(); ++n) {
    for (std::size_t a = 0; a < mask.removed[n].size(); ++a) {
      if (mask.removed[n][a]) out << n << ' ' << a << '\n';
    }
  }
}

PrunedTree apply_prune(const GameTree& tree, const PruneMask& mask) {
  if (static_cast<int>(mask.removed.size()) != tree.num_nodes()) {
    throw std::invalid_argument("prune mask covers " + std::to_string(mask.removed.size()) +
                                " nodes, tree has " + std::to_string(tree.num_nodes()));
  }
  for (const auto& node : tree.nodes) {
    const auto& row = mask.removed[node.id];
    if (static_cast<int>(row.size()) != node.num_children()) {
      throw std::invalid_argument("prune mask row size mismatch at node " +
                                  std::to_string(node.id));
    }
    const int removed = static_cast<int>(std::count(row.begin(), row.end(), 1));
    if (removed == 0) continue;
    if (node.kind != NodeKind::kDecision) {
      throw std::invalid_argument("prune mask removes a chance edge at node " +
                                  std::to_string(node.id));
    }
    if (removed == node.num_children()) {
      throw std::invalid_argument("prune mask removes every action at node " +
                                  std::to_string(node.id));
    }
  }

  PrunedTree out;
  GameTree& t = out.tree;
  t.name = tree.name;
  t.deck_size = tree.deck_size;
  t.deck = tree.deck;
  t.board = tree.board;
  t.hands = tree.hands;
  t.hand_size = tree.hand_size;
  t.rankings = tree.rankings;
  t.starting_pot = tree.starting_pot;
  t.stack = tree.stack;
  t.big_blind = tree.big_blind;
  out.new_node.assign(tree.num_nodes(), -1);

  std::function<int(int, int, int)> copy = [&](int old_id, int parent, int parent_action) {
    const PublicNode& src = tree[old_id];
    const int id = t.num_nodes();
    out.new_node[old_id] = id;
    out.old_node.push_back(old_id);
    out.old_action.emplace_back();
    PublicNode node = src;
    node.id = id;
    node.parent = parent;
    node.parent_action = parent_action;
    node.actions.clear();
    node.children.clear();
    node.chance_weights.clear();
    t.nodes.push_back(std::move(node));
    for (int a = 0; a < src.num_children(); ++a) {
      if (mask.removed[old_id][a]) continue;
      const int slot = static_cast<int>(out.old_action[id].size());
      out.old_action[id].push_back(a);
      const int child = copy(src.children[a], id, slot);
      PublicNode& self = t.nodes[id];
      self.children.push_back(child);
      self.actions.push_back(src.actions[a]);
      if (!src.chance_weights.empty()) self.chance_weights.push_back(src.chance_weights[a]);
    }
    return id;
  };
  copy(0, -1, -1);
  out.rho = static_cast<double>(t.num_nodes()) / tree.num_nodes();
  return out;
}

Profile lift_profile(const PrunedTree& pruned, const GameTree& original, const Profile& profile) {
  const int n = original.num_hands();
  Profile out;
  out.node.resize(original.num_nodes());
  for (const auto& node : original.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    const int na = node.num_children();
    auto& rows = out.node[node.id];
    const int nid = pruned.new_node[node.id];
    if (nid < 0) {
      rows.assign(static_cast<std::size_t>(n) * na, 1.0 / na);
      continue;
    }
    rows.assign(static_cast<std::size_t>(n) * na, 0.0);
    const auto& map = pruned.old_action[nid];
    const int nn = static_cast<int>(map.size());
    for (int h = 0; h < n; ++h) {
      auto src = profile.row(nid, h, nn);
      for (int j = 0; j < nn; ++j) rows[static_cast<std::size_t>(h) * na + map[j]] = src[j];
    }
  }
  return out;
}

// ------------------------------------------------------ dominance pruning

PruneMask interval_dominance_pruner(const GameTree& tree, const ActionBounds& bounds) {
  if (static_cast<int>(bounds.interval.size()) != tree.num_nodes()) {
    throw std::invalid_argument("bounds cover " + std::to_string(bounds.interval.size()) +
                                " nodes, tree has " + std::to_string(tree.num_nodes()));
  }
  PruneMask mask = PruneMask::none(tree);
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    const auto& iv = bounds.interval[node.id];
    const int na = node.num_children();
    if (static_cast<int>(iv.size()) != na) {
      throw std::invalid_argument("bounds row size mismatch at node " + std::to_string(node.id));
    }
    for (const auto& [lo, hi] : iv) {
      if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw std::invalid_argument("invalid interval at node " + std::to_string(node.id));
      }
    }
    double best_lower = -std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : iv) best_lower = std::max(best_lower, lo);
    int kept = na;
    for (int a = 0; a < na; ++a) {
      if (best_lower > iv[a].second && kept > 1) {
        mask.removed[node.id][a] = 1;
        --kept;
      }
    }
  }
  return mask;
}

ActionBounds exact_action_bounds(const GameTree& tree, const Profile& equilibrium, double slack,
                                 Evaluator* evaluator) {
  const int n = tree.num_hands();
  std::array<ProfileValues, kNumPlayers> pv;
  for (int p = 0; p < kNumPlayers; ++p) {
    pv[p] = profile_node_values(tree, equilibrium, p, evaluator);
  }
  // Any action value lies within the chips at stake.
  const double wide = tree.starting_pot + 2.0 * tree.stack + 1.0;
  ActionBounds bounds;
  bounds.interval.resize(tree.num_nodes());
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::kDecision) continue;
    const auto& v = pv[node.actor];
    auto& iv = bounds.interval[node.id];
    iv.assign(node.num_children(), {-wide, wide});
    for (int a = 0; a < node.num_children(); ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int h = 0; h < n; ++h) {
        const double reach = v.opp_reach[static_cast<std::size_t>(node.id) * n + h];
        if (!tree.hand_valid(node.id, h) || reach <= 0.0) continue;
        const double q =
            v.values[static_cast<std::size_t>(node.children[a]) * n + h] / reach;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
      if (lo <= hi) iv[a] = {lo - slack, hi + slack};
    }
  }
  return bounds;
}

}  // namespace pcfr
