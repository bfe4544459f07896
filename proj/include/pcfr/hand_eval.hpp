#pragma once

#include <cstdint>
#include <span>

namespace pcfr {

// Poker hand strength. Larger compares stronger; equal values split the pot.
// Layout: category in bits 20..23, up to five 4-bit tie-break ranks below it.
using HandValue = std::uint32_t;

enum class HandCategory : int {
  kHighCard = 0,
  kPair,
  kTwoPair,
  kTrips,
  kStraight,
  kFlush,
  kFullHouse,
  kQuads,
  kStraightFlush,
};

constexpr HandCategory category_of(HandValue v) {
  return static_cast<HandCategory>(v >> 20);
}

// Exactly five cards.
HandValue evaluate5(std::span<const int> cards);

// Best five of five to seven cards, computed directly from rank/suit masks.
HandValue evaluate7(std::span<const int> cards);

// Best five of seven by trying all 21 subsets with evaluate5. Slow; used as
// an oracle for evaluate7.
HandValue evaluate7_naive(std::span<const int> cards);

}  // namespace pcfr
