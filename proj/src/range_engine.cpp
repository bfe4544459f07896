#include "pcfr/range_engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pcfr {

void aggregate_into(std::span<const double> range, std::span<const Hand> hands,
                    double& p_sum, std::span<double> p_card) {
  std::fill(p_card.begin(), p_card.end(), 0.0);
  double sum = 0.0;
  for (std::size_t h = 0; h < hands.size(); ++h) {
    const double r = range[h];
    sum += r;
    p_card[hands[h].cards[0]] += r;
    if (hands[h].size == 2) p_card[hands[h].cards[1]] += r;
  }
  p_sum = sum;
}

Aggregates aggregate(std::span<const double> range, std::span<const Hand> hands,
                     int deck_size) {
  Aggregates agg;
  agg.p_card.assign(deck_size, 0.0);
  agg.p_hand.assign(range.begin(), range.end());
  aggregate_into(range, hands, agg.p_sum, agg.p_card);
  return agg;
}

ShowdownOrder make_showdown_order(std::span<const int> ranking) {
  ShowdownOrder order;
  order.sorted.resize(ranking.size());
  std::iota(order.sorted.begin(), order.sorted.end(), 0);
  std::stable_sort(order.sorted.begin(), order.sorted.end(),
                   [&](int a, int b) { return ranking[a] < ranking[b]; });
  for (std::size_t i = 0; i < order.sorted.size(); ++i) {
    if (i == 0 || ranking[order.sorted[i]] != ranking[order.sorted[i - 1]]) {
      order.group_begin.push_back(static_cast<int>(i));
    }
  }
  order.group_begin.push_back(static_cast<int>(order.sorted.size()));
  return order;
}

void showdown_values(std::span<const double> opp_range, std::span<const Hand> hands,
                     const ShowdownOrder& order, int deck_size, double pot,
                     double scale, std::span<double> out, ShowdownScratch& scratch,
                     OpCounter* counter) {
  const std::size_t n = hands.size();
  if (opp_range.size() != n || out.size() != n || order.sorted.size() != n) {
    throw std::invalid_argument("showdown_values: ranking/hand index mismatch");
  }
  scratch.card_mass.assign(deck_size, 0.0);
  scratch.win.resize(n);
  auto& card_mass = scratch.card_mass;
  const int groups = static_cast<int>(order.group_begin.size()) - 1;
  std::int64_t ops = 0;

  // ascending sweep: mass strictly below each tie group
  double below = 0.0;
  for (int g = 0; g < groups; ++g) {
    const int begin = order.group_begin[g];
    const int end = order.group_begin[g + 1];
    for (int i = begin; i < end; ++i) {
      const int h = order.sorted[i];
      const Hand& hand = hands[h];
      double w = below - card_mass[hand.cards[0]];
      if (hand.size == 2) w -= card_mass[hand.cards[1]];
      scratch.win[h] = w;
    }
    for (int i = begin; i < end; ++i) {
      const int h = order.sorted[i];
      const double r = opp_range[h];
      below += r;
      card_mass[hands[h].cards[0]] += r;
      if (hands[h].size == 2) card_mass[hands[h].cards[1]] += r;
    }
    ops += end - begin;
  }

  // descending sweep: mass strictly above
  std::fill(card_mass.begin(), card_mass.end(), 0.0);
  double above = 0.0;
  const double half = scale * pot / 2;
  for (int g = groups - 1; g >= 0; --g) {
    const int begin = order.group_begin[g];
    const int end = order.group_begin[g + 1];
    for (int i = begin; i < end; ++i) {
      const int h = order.sorted[i];
      const Hand& hand = hands[h];
      double l = above - card_mass[hand.cards[0]];
      if (hand.size == 2) l -= card_mass[hand.cards[1]];
      out[h] = half * (scratch.win[h] - l);
    }
    for (int i = begin; i < end; ++i) {
      const int h = order.sorted[i];
      const double r = opp_range[h];
      above += r;
      card_mass[hands[h].cards[0]] += r;
      if (hands[h].size == 2) card_mass[hands[h].cards[1]] += r;
    }
    ops += end - begin;
  }
  if (counter) counter->ops += ops;
}

std::vector<double> showdown_values(std::span<const double> opp_range,
                                    std::span<const Hand> hands,
                                    std::span<const int> ranking, int deck_size,
                                    double pot, OpCounter* counter) {
  if (ranking.size() != hands.size()) {
    throw std::invalid_argument("showdown_values: ranking/hand index mismatch");
  }
  const ShowdownOrder order = make_showdown_order(ranking);
  ShowdownScratch scratch;
  std::vector<double> out(hands.size());
  showdown_values(opp_range, hands, order, deck_size, pot, 1.0, out, scratch, counter);
  return out;
}

std::vector<double> fold_values(const Aggregates& opp, std::span<const Hand> hands,
                                double fold_amount, bool hero_is_folder) {
  const double s = hero_is_folder ? -fold_amount : fold_amount;
  std::vector<double> out(hands.size());
  for (std::size_t h = 0; h < hands.size(); ++h) {
    out[h] = s * counterfactual_reach(opp, hands[h], static_cast<int>(h));
  }
  return out;
}

double brute_force_reach(std::span<const double> opp_range,
                         std::span<const Hand> hands, int hand_id) {
  double sum = 0.0;
  for (std::size_t o = 0; o < hands.size(); ++o) {
    if (!hands[hand_id].overlaps(hands[o])) sum += opp_range[o];
  }
  return sum;
}

std::vector<double> brute_force_showdown(std::span<const double> opp_range,
                                         std::span<const Hand> hands,
                                         std::span<const int> ranking, double pot) {
  std::vector<double> out(hands.size(), 0.0);
  for (std::size_t h = 0; h < hands.size(); ++h) {
    double v = 0.0;
    for (std::size_t o = 0; o < hands.size(); ++o) {
      if (hands[h].overlaps(hands[o])) continue;
      if (ranking[h] > ranking[o]) v += opp_range[o];
      else if (ranking[h] < ranking[o]) v -= opp_range[o];
    }
    out[h] = pot / 2 * v;
  }
  return out;
}

}  // namespace pcfr
