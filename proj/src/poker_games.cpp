#include "pcfr/poker_games.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pcfr/hand_eval.hpp"

namespace pcfr {

const char* to_string(Street street) {
  switch (street) {
    case Street::kPreflop: return "preflop";
    case Street::kFlop: return "flop";
    case Street::kTurn: return "turn";
    case Street::kRiver: return "river";
  }
  return "?";
}

Street parse_street(const std::string& name) {
  if (name == "preflop") return Street::kPreflop;
  if (name == "flop") return Street::kFlop;
  if (name == "turn") return Street::kTurn;
  if (name == "river") return Street::kRiver;
  throw std::invalid_argument("unknown street '" + name + "'");
}

int board_size(Street street) {
  switch (street) {
    case Street::kPreflop: return 0;
    case Street::kFlop: return 3;
    case Street::kTurn: return 4;
    case Street::kRiver: return 5;
  }
  return 0;
}

std::vector<double> default_raise_sizes(int n_raise) {
  switch (n_raise) {
    case 0: return {};
    case 1: return {1.0};
    case 2: return {0.5, 1.0};
    case 3: return {0.5, 1.0, 2.0};
    default: {
      std::vector<double> sizes;
      for (int i = 0; i < n_raise; ++i) sizes.push_back(0.5 * (i + 1));
      return sizes;
    }
  }
}

std::vector<double> SubgameConfig::effective_raise_sizes() const {
  return raise_sizes.empty() ? default_raise_sizes(n_raise) : raise_sizes;
}

void SubgameConfig::validate() const {
  if (static_cast<int>(board.size()) != board_size(street)) {
    throw std::invalid_argument("board has " + std::to_string(board.size()) +
                                " cards but street " + to_string(street) +
                                " needs " + std::to_string(board_size(street)));
  }
  for (std::size_t i = 0; i < board.size(); ++i) {
    if (board[i] < 0 || board[i] >= kPokerDeckSize) {
      throw std::invalid_argument("board card out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (board[i] == board[j]) throw std::invalid_argument("duplicate board card");
    }
  }
  if (!(spr > 0.0)) throw std::invalid_argument("spr must be positive");
  if (n_raise < 0) throw std::invalid_argument("n_raise must be >= 0");
  if (!raise_sizes.empty() && static_cast<int>(raise_sizes.size()) != n_raise) {
    throw std::invalid_argument("raise_sizes length must equal n_raise");
  }
  for (double s : raise_sizes) {
    if (!(s > 0.0)) throw std::invalid_argument("raise sizes must be positive");
  }
  if (!(starting_pot > 0.0)) throw std::invalid_argument("starting_pot must be positive");
  if (!(big_blind > 0.0)) throw std::invalid_argument("big_blind must be positive");
}

std::vector<int> full_deck() {
  std::vector<int> deck(kPokerDeckSize);
  std::iota(deck.begin(), deck.end(), 0);
  return deck;
}

std::vector<Hand> enumerate_hands(std::span<const int> deck,
                                  std::span<const int> board, int hand_size) {
  std::vector<int> live;
  for (int c : deck) {
    if (std::find(board.begin(), board.end(), c) == board.end()) live.push_back(c);
  }
  std::sort(live.begin(), live.end());
  std::vector<Hand> hands;
  if (hand_size == 1) {
    for (int c : live) hands.push_back(Hand{{c, -1}, 1});
  } else if (hand_size == 2) {
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        hands.push_back(Hand{{live[i], live[j]}, 2});
      }
    }
  } else {
    throw std::invalid_argument("hand_size must be 1 or 2");
  }
  return hands;
}

std::vector<int> rank_hands(std::span<const int> board,
                            std::span<const Hand> hands) {
  if (board.size() != 5) throw std::invalid_argument("rank_hands needs a 5-card board");
  std::vector<HandValue> values(hands.size(), 0);
  std::array<int, 7> cards{};
  std::copy(board.begin(), board.end(), cards.begin());
  for (std::size_t h = 0; h < hands.size(); ++h) {
    if (hands[h].size != 2 || hands[h].overlaps(board)) continue;
    cards[5] = hands[h].cards[0];
    cards[6] = hands[h].cards[1];
    values[h] = evaluate7(cards);
  }
  std::vector<HandValue> distinct;
  for (std::size_t h = 0; h < hands.size(); ++h) {
    if (values[h] != 0 || !hands[h].overlaps(board)) distinct.push_back(values[h]);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> ranks(hands.size(), 0);
  for (std::size_t h = 0; h < hands.size(); ++h) {
    if (hands[h].overlaps(board)) continue;
    ranks[h] = 1 + static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(),
                                                     values[h]) -
                                    distinct.begin());
  }
  return ranks;
}

namespace {

std::string chips_label(char prefix, double to) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%c%g", prefix, to);
  return buf;
}

// Appends nodes in depth-first preorder, which is a topological order.
class TreeAssembler {
 public:
  explicit TreeAssembler(GameTree& tree) : tree_(tree) {}

  int add(int parent, std::string action, PublicNode node) {
    node.id = tree_.num_nodes();
    node.parent = parent;
    if (parent >= 0) {
      auto& p = tree_.nodes[parent];
      node.parent_action = p.num_children();
      node.depth = p.depth + 1;
      p.children.push_back(node.id);
      p.actions.push_back(std::move(action));
    }
    tree_.nodes.push_back(std::move(node));
    return tree_.num_nodes() - 1;
  }

  PublicNode& operator[](int id) { return tree_.nodes[id]; }

  int ranking_for(const std::vector<int>& board,
                  const std::function<std::vector<int>()>& compute) {
    auto key = board;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = cache_.try_emplace(key, -1);
    if (inserted) {
      it->second = static_cast<int>(tree_.rankings.size());
      tree_.rankings.push_back(compute());
    }
    return it->second;
  }

 private:
  GameTree& tree_;
  std::map<std::vector<int>, int> cache_;
};

PublicNode terminal(NodeKind kind, const std::array<double, 2>& contributed,
                    const std::vector<int>& board, int round) {
  PublicNode n;
  n.kind = kind;
  n.contributed = contributed;
  n.pot = contributed[0] + contributed[1];
  n.board = board;
  n.round = round;
  return n;
}

// ---------------------------------------------------------------------------
// Fixed-limit games (Kuhn, Leduc)

struct LimitRules {
  std::vector<double> bet_per_round;
  int max_raises = 1;
  // Strength of `hand` given the board (empty in the first round).
  std::function<int(int hand, const std::vector<int>& board)> strength;
};

class LimitBuilder {
 public:
  LimitBuilder(GameTree& tree, LimitRules rules) : tree_(tree), asm_(tree), rules_(std::move(rules)) {}

  void build() { betting(-1, "", {1.0, 1.0}, {}, 0, 0, 0); }

 private:
  void betting(int parent, std::string label, std::array<double, 2> in,
               std::vector<int> board, int round, int acted, int raises) {
    const int actor = acted % 2;
    PublicNode node;
    node.kind = NodeKind::kDecision;
    node.actor = actor;
    node.contributed = in;
    node.pot = in[0] + in[1];
    node.board = board;
    node.round = round;
    const int id = asm_.add(parent, std::move(label), std::move(node));

    const bool facing = in[1 - actor] > in[actor];
    const double bet = rules_.bet_per_round[round];
    if (facing) {
      PublicNode fold = terminal(NodeKind::kFold, in, board, round);
      fold.folder = actor;
      fold.fold_amount = in[actor];
      asm_.add(id, "f", std::move(fold));
      auto called = in;
      called[actor] = in[1 - actor];
      end_round(id, "c", called, board, round);
    } else {
      if (acted == 1) {
        end_round(id, "k", in, board, round);
      } else {
        betting(id, "k", in, board, round, acted + 1, raises);
      }
    }
    if (raises < rules_.max_raises) {
      auto raised = in;
      raised[actor] = in[1 - actor] + bet;
      betting(id, facing ? "r" : "b", raised, board, round, acted + 1, raises + 1);
    }
  }

  void end_round(int parent, std::string label, std::array<double, 2> in,
                 const std::vector<int>& board, int round) {
    if (round + 1 >= static_cast<int>(rules_.bet_per_round.size())) {
      PublicNode sd = terminal(NodeKind::kShowdown, in, board, round);
      sd.ranking = asm_.ranking_for(board, [&] {
        std::vector<int> r(tree_.num_hands());
        for (int h = 0; h < tree_.num_hands(); ++h) r[h] = rules_.strength(h, board);
        return r;
      });
      asm_.add(parent, std::move(label), std::move(sd));
      return;
    }
    PublicNode chance = terminal(NodeKind::kChance, in, board, round);
    const int id = asm_.add(parent, std::move(label), std::move(chance));
    std::vector<int> outcomes;
    for (int c : tree_.deck) {
      if (std::find(board.begin(), board.end(), c) == board.end()) outcomes.push_back(c);
    }
    for (int c : outcomes) {
      asm_[id].chance_weights.push_back(1.0 / outcomes.size());
      auto next_board = board;
      next_board.push_back(c);
      const int before = tree_.num_nodes();
      betting(id, std::to_string(c), in, next_board, round + 1, 0, 0);
      asm_[before].dealt_card = c;
    }
  }

  GameTree& tree_;
  TreeAssembler asm_;
  LimitRules rules_;
};

// ---------------------------------------------------------------------------
// No-limit streets

class NoLimitBuilder {
 public:
  NoLimitBuilder(GameTree& tree, const SubgameConfig& cfg,
                 std::function<std::vector<int>(const std::vector<int>&)> ranker)
      : tree_(tree), asm_(tree), cfg_(cfg), sizes_(cfg.effective_raise_sizes()),
        ranker_(std::move(ranker)) {
    total_ = cfg.starting_pot / 2 + cfg.spr * cfg.starting_pot;
  }

  void build() {
    const double half = cfg_.starting_pot / 2;
    betting(-1, "", {half, half}, cfg_.board, 0, 0, 0);
  }

 private:
  bool all_in(const std::array<double, 2>& in) const {
    return in[0] >= total_ - 1e-9 || in[1] >= total_ - 1e-9;
  }

  void betting(int parent, std::string label, std::array<double, 2> in,
               std::vector<int> board, int round, int acted, int raises) {
    const int actor = acted % 2;
    const int opp = 1 - actor;
    PublicNode node;
    node.kind = NodeKind::kDecision;
    node.actor = actor;
    node.contributed = in;
    node.pot = in[0] + in[1];
    node.board = board;
    node.round = round;
    const int id = asm_.add(parent, std::move(label), std::move(node));

    const bool facing = in[opp] > in[actor] + 1e-9;
    if (facing) {
      PublicNode fold = terminal(NodeKind::kFold, in, board, round);
      fold.folder = actor;
      fold.fold_amount = in[actor];
      asm_.add(id, "f", std::move(fold));
      auto called = in;
      called[actor] = std::min(in[opp], total_);
      end_street(id, "c", called, board, round);
    } else if (acted >= 1) {
      end_street(id, "x", in, board, round);
    } else {
      betting(id, "x", in, board, round, acted + 1, raises);
    }

    const bool capped = cfg_.max_raises >= 0 && raises >= cfg_.max_raises;
    const bool can_raise = in[opp] < total_ - 1e-9 && total_ > in[opp] + 1e-9;
    if (capped || !can_raise) return;
    const double pot_after_call = in[0] + in[1] + (in[opp] - in[actor]);
    std::vector<double> targets;
    for (double frac : sizes_) {
      const double to = std::min(in[opp] + frac * pot_after_call, total_);
      if (to <= in[opp] + 1e-9) continue;
      if (std::none_of(targets.begin(), targets.end(),
                       [&](double t) { return std::abs(t - to) < 1e-9; })) {
        targets.push_back(to);
      }
    }
    for (double to : targets) {
      auto raised = in;
      raised[actor] = to;
      betting(id, chips_label(to >= total_ - 1e-9 ? 'A' : 'r', to), raised, board,
              round, acted + 1, raises + 1);
    }
  }

  void end_street(int parent, std::string label, std::array<double, 2> in,
                  const std::vector<int>& board, int round) {
    if (board.size() == 5 || !dealing_) {
      PublicNode sd = terminal(NodeKind::kShowdown, in, board, round);
      sd.ranking = asm_.ranking_for(board, [&] { return ranker_(board); });
      asm_.add(parent, std::move(label), std::move(sd));
      return;
    }
    if (cfg_.depth_limited) {
      asm_.add(parent, std::move(label), terminal(NodeKind::kLeaf, in, board, round));
      return;
    }
    PublicNode chance = terminal(NodeKind::kChance, in, board, round);
    const int id = asm_.add(parent, std::move(label), std::move(chance));
    std::vector<int> outcomes;
    for (int c : tree_.deck) {
      if (std::find(board.begin(), board.end(), c) == board.end()) outcomes.push_back(c);
    }
    for (int c : outcomes) {
      asm_[id].chance_weights.push_back(1.0 / outcomes.size());
      auto next_board = board;
      next_board.push_back(c);
      const int before = tree_.num_nodes();
      if (all_in(in)) {
        end_street(id, card_name(c), in, next_board, round + 1);
      } else {
        betting(id, card_name(c), in, next_board, round + 1, 0, 0);
      }
      asm_[before].dealt_card = c;
    }
  }

 public:
  bool dealing_ = true;

 private:
  GameTree& tree_;
  TreeAssembler asm_;
  const SubgameConfig& cfg_;
  std::vector<double> sizes_;
  std::function<std::vector<int>(const std::vector<int>&)> ranker_;
  double total_ = 0.0;
};

}  // namespace

GameTree build_kuhn() {
  GameTree tree;
  tree.name = "kuhn";
  tree.deck_size = 3;
  tree.deck = {0, 1, 2};
  tree.hands = enumerate_hands(tree.deck, {}, 1);
  tree.hand_size = 1;
  tree.starting_pot = 2.0;
  tree.stack = 1.0;
  tree.big_blind = 1.0;
  LimitRules rules{.bet_per_round = {1.0},
                   .max_raises = 1,
                   .strength = [&tree](int h, const std::vector<int>&) {
                     return tree.hands[h].cards[0] + 1;
                   }};
  LimitBuilder(tree, std::move(rules)).build();
  return tree;
}

GameTree build_leduc() {
  GameTree tree;
  tree.name = "leduc";
  tree.deck_size = 6;
  tree.deck = {0, 1, 2, 3, 4, 5};  // rank = card / 2
  tree.hands = enumerate_hands(tree.deck, {}, 1);
  tree.hand_size = 1;
  tree.starting_pot = 2.0;
  tree.stack = 12.0;
  tree.big_blind = 1.0;
  LimitRules rules{
      .bet_per_round = {2.0, 4.0},
      .max_raises = 2,
      .strength = [&tree](int h, const std::vector<int>& board) {
        const int card = tree.hands[h].cards[0];
        const int b = board.back();
        if (card == b) return 0;
        return card / 2 == b / 2 ? 10 + card / 2 : 1 + card / 2;
      }};
  LimitBuilder(tree, std::move(rules)).build();
  return tree;
}

GameTree build_hunl_subgame(const SubgameConfig& cfg) {
  cfg.validate();
  GameTree tree;
  tree.name = std::string("hunl-") + to_string(cfg.street);
  tree.deck_size = kPokerDeckSize;
  tree.board = cfg.board;
  for (int c : full_deck()) {
    if (std::find(cfg.board.begin(), cfg.board.end(), c) == cfg.board.end()) {
      tree.deck.push_back(c);
    }
  }
  tree.hands = enumerate_hands(full_deck(), cfg.board, 2);
  tree.hand_size = 2;
  tree.starting_pot = cfg.starting_pot;
  tree.stack = cfg.spr * cfg.starting_pot;
  tree.big_blind = cfg.big_blind;
  if (cfg.street == Street::kPreflop && !cfg.depth_limited) {
    throw std::invalid_argument(
        "preflop subgames must be depth-limited (full board runouts are not expanded)");
  }
  NoLimitBuilder builder(tree, cfg, [&tree](const std::vector<int>& board) {
    return rank_hands(board, tree.hands);
  });
  builder.build();
  return tree;
}

GameTree build_preflop_toy(const SubgameConfig& cfg) {
  SubgameConfig c = cfg;
  c.street = Street::kPreflop;
  c.board.clear();
  c.validate();
  GameTree tree;
  tree.name = "preflop-toy";
  tree.deck_size = kPokerDeckSize;
  tree.deck = full_deck();
  tree.hands = enumerate_hands(tree.deck, {}, 2);
  tree.hand_size = 2;
  tree.starting_pot = c.starting_pot;
  tree.stack = c.spr * c.starting_pot;
  tree.big_blind = c.big_blind;
  NoLimitBuilder builder(tree, c, [&tree](const std::vector<int>&) {
    std::vector<int> r(tree.num_hands());
    for (int h = 0; h < tree.num_hands(); ++h) {
      const int a = card_rank(tree.hands[h].cards[0]);
      const int b = card_rank(tree.hands[h].cards[1]);
      const int hi = std::max(a, b);
      const int lo = std::min(a, b);
      r[h] = a == b ? 200 + a : 1 + 13 * hi + lo;
    }
    return r;
  });
  builder.dealing_ = false;
  builder.build();
  return tree;
}

}  // namespace pcfr
