#include "pcfr/hand_eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <initializer_list>

#include "pcfr/cards.hpp"

namespace pcfr {

namespace {

HandValue encode(HandCategory category, std::initializer_list<int> ranks) {
  HandValue v = static_cast<HandValue>(category) << 20;
  int shift = 16;
  for (int r : ranks) {
    v |= static_cast<HandValue>(r) << shift;
    shift -= 4;
  }
  return v;
}

HandValue encode(HandCategory category, const std::array<int, 5>& ranks,
                 int n) {
  HandValue v = static_cast<HandValue>(category) << 20;
  for (int i = 0; i < n; ++i) {
    v |= static_cast<HandValue>(ranks[i]) << (16 - 4 * i);
  }
  return v;
}

// Highest straight in a 13-bit rank mask, or -1. The wheel reports 3 (five).
int straight_high(unsigned mask) {
  for (int high = 12; high >= 4; --high) {
    const unsigned run = 0x1Fu << (high - 4);
    if ((mask & run) == run) return high;
  }
  constexpr unsigned kWheel = (1u << 12) | 0xFu;
  if ((mask & kWheel) == kWheel) return 3;
  return -1;
}

// Up to n highest set ranks of mask, skipping the ranks in `exclude`.
int top_ranks(unsigned mask, int n, std::array<int, 5>& out, int start = 0) {
  int k = start;
  for (int r = 12; r >= 0 && k < start + n; --r) {
    if (mask & (1u << r)) out[k++] = r;
  }
  return k;
}

}  // namespace

HandValue evaluate5(std::span<const int> cards) {
  assert(cards.size() == 5);
  std::array<int, 13> count{};
  unsigned mask = 0;
  bool flush = true;
  for (int c : cards) {
    ++count[card_rank(c)];
    mask |= 1u << card_rank(c);
    if (card_suit(c) != card_suit(cards[0])) flush = false;
  }
  const int straight = std::popcount(mask) == 5 ? straight_high(mask) : -1;
  if (flush && straight >= 0) return encode(HandCategory::kStraightFlush, {straight});

  // ranks ordered by (multiplicity desc, rank desc)
  std::array<int, 5> order{};
  int n = 0;
  for (int mult = 4; mult >= 1; --mult) {
    for (int r = 12; r >= 0; --r) {
      if (count[r] == mult) order[n++] = r;
    }
  }
  int max_count = count[order[0]];
  int second_count = n > 1 ? count[order[1]] : 0;
  if (max_count == 4) return encode(HandCategory::kQuads, order, 2);
  if (max_count == 3 && second_count == 2) {
    return encode(HandCategory::kFullHouse, order, 2);
  }
  if (flush) return encode(HandCategory::kFlush, order, 5);
  if (straight >= 0) return encode(HandCategory::kStraight, {straight});
  if (max_count == 3) return encode(HandCategory::kTrips, order, 3);
  if (max_count == 2 && second_count == 2) {
    return encode(HandCategory::kTwoPair, order, 3);
  }
  if (max_count == 2) return encode(HandCategory::kPair, order, 4);
  return encode(HandCategory::kHighCard, order, 5);
}

HandValue evaluate7(std::span<const int> cards) {
  std::array<unsigned, 4> suit_mask{};
  std::array<int, 13> count{};
  unsigned all = 0;
  for (int c : cards) {
    suit_mask[card_suit(c)] |= 1u << card_rank(c);
    ++count[card_rank(c)];
    all |= 1u << card_rank(c);
  }
  int flush_suit = -1;
  for (int s = 0; s < 4; ++s) {
    if (std::popcount(suit_mask[s]) >= 5) flush_suit = s;
  }
  if (flush_suit >= 0) {
    const int sf = straight_high(suit_mask[flush_suit]);
    if (sf >= 0) return encode(HandCategory::kStraightFlush, {sf});
  }

  int quad = -1;
  std::array<int, 3> trips{};
  std::array<int, 3> pairs{};
  int n_trips = 0;
  int n_pairs = 0;
  for (int r = 12; r >= 0; --r) {
    if (count[r] == 4) quad = r;
    else if (count[r] == 3) trips[n_trips++] = r;
    else if (count[r] == 2) pairs[n_pairs++] = r;
  }

  std::array<int, 5> out{};
  if (quad >= 0) {
    out[0] = quad;
    top_ranks(all & ~(1u << quad), 1, out, 1);
    return encode(HandCategory::kQuads, out, 2);
  }
  if (n_trips > 0 && (n_trips > 1 || n_pairs > 0)) {
    const int pair = n_trips > 1 ? std::max(trips[1], n_pairs ? pairs[0] : -1)
                                 : pairs[0];
    return encode(HandCategory::kFullHouse, {trips[0], pair});
  }
  if (flush_suit >= 0) {
    top_ranks(suit_mask[flush_suit], 5, out);
    return encode(HandCategory::kFlush, out, 5);
  }
  if (const int st = straight_high(all); st >= 0) {
    return encode(HandCategory::kStraight, {st});
  }
  if (n_trips > 0) {
    out[0] = trips[0];
    top_ranks(all & ~(1u << trips[0]), 2, out, 1);
    return encode(HandCategory::kTrips, out, 3);
  }
  if (n_pairs >= 2) {
    out[0] = pairs[0];
    out[1] = pairs[1];
    top_ranks(all & ~(1u << pairs[0]) & ~(1u << pairs[1]), 1, out, 2);
    return encode(HandCategory::kTwoPair, out, 3);
  }
  if (n_pairs == 1) {
    out[0] = pairs[0];
    top_ranks(all & ~(1u << pairs[0]), 3, out, 1);
    return encode(HandCategory::kPair, out, 4);
  }
  const int n = top_ranks(all, 5, out);
  return encode(HandCategory::kHighCard, out, n);
}

HandValue evaluate7_naive(std::span<const int> cards) {
  const int n = static_cast<int>(cards.size());
  assert(n >= 5 && n <= 7);
  HandValue best = 0;
  std::array<int, 5> pick{};
  // all 5-subsets via index combinations
  std::array<int, 5> idx{0, 1, 2, 3, 4};
  while (true) {
    for (int i = 0; i < 5; ++i) pick[i] = cards[idx[i]];
    best = std::max(best, evaluate5(pick));
    int i = 4;
    while (i >= 0 && idx[i] == n - 5 + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < 5; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace pcfr
