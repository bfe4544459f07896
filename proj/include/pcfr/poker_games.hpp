#pragma once

#include <span>
#include <string>
#include <vector>

#include "pcfr/cards.hpp"
#include "pcfr/game_tree.hpp"

namespace pcfr {

enum class Street { kPreflop, kFlop, kTurn, kRiver };

const char* to_string(Street street);
Street parse_street(const std::string& name);
int board_size(Street street);

struct SubgameConfig {
  Street street = Street::kRiver;
  std::vector<int> board;
  double spr = 4.0;              // stack behind / starting pot
  int n_raise = 1;
  std::vector<double> raise_sizes;  // pot fractions; empty = defaults for n_raise
  double starting_pot = 1.0;
  bool depth_limited = true;
  double big_blind = 1.0;
  int max_raises = -1;           // per street; -1 = until all-in

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::vector<double> effective_raise_sizes() const;
};

// Default pot fractions: {1} for one raise, {0.5, 1} for two, {0.5, 1, 2}
// for three.
std::vector<double> default_raise_sizes(int n_raise);

GameTree build_kuhn();
GameTree build_leduc();
GameTree build_hunl_subgame(const SubgameConfig& cfg);

// One betting round on an empty board with a suit-blind two-card showdown
// (pairs beat unpaired hands, then high card, then kicker). All 1326 hands.
// Used to exercise lossless preflop isomorphism at desk scale.
GameTree build_preflop_toy(const SubgameConfig& cfg);

// All hand_size-subsets of deck minus board, lexicographic by card index.
std::vector<Hand> enumerate_hands(std::span<const int> deck,
                                  std::span<const int> board, int hand_size);

// Showdown strength per hand on a five-card board: dense ranks starting at 1
// (equal strength -> equal rank); hands touching the board get 0.
std::vector<int> rank_hands(std::span<const int> board,
                            std::span<const Hand> hands);

std::vector<int> full_deck();

}  // namespace pcfr
