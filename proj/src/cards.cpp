#include "pcfr/cards.hpp"

#include <sstream>
#include <stdexcept>

namespace pcfr {

namespace {

constexpr std::string_view kRanks = "23456789TJQKA";
constexpr std::string_view kSuits = "cdhs";

}  // namespace

int parse_card(std::string_view name) {
  if (name.size() != 2) {
    throw std::invalid_argument("bad card name '" + std::string(name) + "'");
  }
  const auto r = kRanks.find(name[0]);
  const auto s = kSuits.find(name[1]);
  if (r == std::string_view::npos || s == std::string_view::npos) {
    throw std::invalid_argument("bad card name '" + std::string(name) + "'");
  }
  return make_card(static_cast<int>(r), static_cast<int>(s));
}

std::string card_name(int card) {
  if (card < 0 || card >= kPokerDeckSize) return "?" + std::to_string(card);
  return {kRanks[card_rank(card)], kSuits[card_suit(card)]};
}

std::vector<int> parse_cards(std::string_view text) {
  std::vector<int> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) out.push_back(parse_card(token));
  return out;
}

std::string cards_to_string(std::span<const int> cards) {
  std::string out;
  for (int c : cards) {
    if (!out.empty()) out += ' ';
    out += card_name(c);
  }
  return out;
}

}  // namespace pcfr
