#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcfr {

// Poker cards are encoded as rank * 4 + suit, rank 0 = deuce ... 12 = ace,
// suits c, d, h, s. Toy games use their own small card universes.
inline constexpr int kPokerDeckSize = 52;

constexpr int card_rank(int card) { return card / 4; }
constexpr int card_suit(int card) { return card % 4; }
constexpr int make_card(int rank, int suit) { return rank * 4 + suit; }

// "As" -> 51. Throws std::invalid_argument on malformed names.
int parse_card(std::string_view name);
std::string card_name(int card);

// Whitespace-separated list of card names, e.g. "As Kd 7c".
std::vector<int> parse_cards(std::string_view text);
std::string cards_to_string(std::span<const int> cards);

// A private holding: one card for toy games, two for hold'em.
struct Hand {
  std::array<int, 2> cards{-1, -1};
  int size = 0;

  bool contains(int card) const {
    return cards[0] == card || (size == 2 && cards[1] == card);
  }
  bool overlaps(const Hand& other) const {
    for (int i = 0; i < other.size; ++i) {
      if (contains(other.cards[i])) return true;
    }
    return false;
  }
  bool overlaps(std::span<const int> board) const {
    for (int c : board) {
      if (contains(c)) return true;
    }
    return false;
  }
};

}  // namespace pcfr
