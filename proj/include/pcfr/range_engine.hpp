#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcfr/cards.hpp"

namespace pcfr {

// Three-level reach summary of one player's range: total mass, mass per card
// and mass per hand. With it, the opponent mass compatible with a hand
// (sharing no card with it) is an O(1) inclusion-exclusion.
struct Aggregates {
  double p_sum = 0.0;
  std::vector<double> p_card;  // indexed by card, deck_size entries
  std::vector<double> p_hand;  // indexed by hand
};

Aggregates aggregate(std::span<const double> range, std::span<const Hand> hands,
                     int deck_size);

// In-place variant used by the pipeline; p_hand is not copied.
void aggregate_into(std::span<const double> range, std::span<const Hand> hands,
                    double& p_sum, std::span<double> p_card);

// Opponent mass over hands sharing no card with `hand`.
inline double counterfactual_reach(double p_sum, std::span<const double> p_card,
                                   std::span<const double> p_hand,
                                   const Hand& hand, int hand_id) {
  if (hand.size == 1) return p_sum - p_card[hand.cards[0]];
  return p_sum - p_card[hand.cards[0]] - p_card[hand.cards[1]] + p_hand[hand_id];
}

inline double counterfactual_reach(const Aggregates& agg, const Hand& hand,
                                   int hand_id) {
  return counterfactual_reach(agg.p_sum, agg.p_card, agg.p_hand, hand, hand_id);
}

// Hands sorted by ascending showdown rank with tie groups, built once per
// ranking and reused by every scan.
struct ShowdownOrder {
  std::vector<int> sorted;        // hand ids, ascending rank
  std::vector<int> group_begin;   // offsets into `sorted`; last = sorted.size()
};

ShowdownOrder make_showdown_order(std::span<const int> ranking);

// Scratch buffers for showdown_values; one per worker.
struct ShowdownScratch {
  std::vector<double> card_mass;
  std::vector<double> win;
};

// Counts inner-loop steps of the showdown scan (test instrumentation).
struct OpCounter {
  std::int64_t ops = 0;
};

// value(h) = scale * (pot / 2) * (W(h) - L(h)); W and L are the
// blocking-corrected opponent masses strictly below and strictly above h's
// rank. One ascending and one descending sweep; tie groups contribute 0.
void showdown_values(std::span<const double> opp_range, std::span<const Hand> hands,
                     const ShowdownOrder& order, int deck_size, double pot,
                     double scale, std::span<double> out, ShowdownScratch& scratch,
                     OpCounter* counter = nullptr);

std::vector<double> showdown_values(std::span<const double> opp_range,
                                    std::span<const Hand> hands,
                                    std::span<const int> ranking, int deck_size,
                                    double pot, OpCounter* counter = nullptr);

// value(h) = s * fold_amount * counterfactual_reach(opp, h), s = -1 when the
// hero folded.
std::vector<double> fold_values(const Aggregates& opp, std::span<const Hand> hands,
                                double fold_amount, bool hero_is_folder);

// Quadratic oracles with explicit card-disjointness checks.
double brute_force_reach(std::span<const double> opp_range,
                         std::span<const Hand> hands, int hand_id);
std::vector<double> brute_force_showdown(std::span<const double> opp_range,
                                         std::span<const Hand> hands,
                                         std::span<const int> ranking, double pot);

}  // namespace pcfr
