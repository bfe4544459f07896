#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pcfr/cards.hpp"
#include "pcfr/hand_eval.hpp"
#include "pcfr/poker_games.hpp"
#include "test_support.hpp"

namespace pcfr {
namespace {

TEST(Cards, ParseAndNameRoundTrip) {
  EXPECT_EQ(parse_card("As"), 51);
  EXPECT_EQ(parse_card("2c"), 0);
  for (int c = 0; c < kPokerDeckSize; ++c) EXPECT_EQ(parse_card(card_name(c)), c);
  EXPECT_EQ(parse_cards("Ks Th 7d"), (std::vector<int>{47, 34, 21}));
  EXPECT_THROW(parse_card("1x"), std::invalid_argument);
  EXPECT_THROW(parse_card("A"), std::invalid_argument);
}

TEST(Cards, HandCounts) {
  const auto deck = full_deck();
  EXPECT_EQ(enumerate_hands(deck, {}, 2).size(), 1326u);
  const auto board = parse_cards("As Ks Qs Js 2d");
  EXPECT_EQ(enumerate_hands(deck, board, 2).size(), 1081u);
  EXPECT_EQ(build_kuhn().num_hands(), 3);
}

TEST(HandEval, CategoryOrdering) {
  const auto board = parse_cards("As Ks Qs Js 2d");
  std::vector<Hand> hands(3);
  hands[0].cards = {parse_card("Ts"), parse_card("9s")};
  hands[1].cards = {parse_card("Ad"), parse_card("Ac")};
  hands[2].cards = {parse_card("3c"), parse_card("4c")};
  for (auto& h : hands) h.size = 2;
  const auto rank = rank_hands(board, hands);
  EXPECT_GT(rank[0], rank[1]);
  EXPECT_GT(rank[1], rank[2]);

  std::vector<int> royal = parse_cards("As Ks Qs Js Ts");
  EXPECT_EQ(category_of(evaluate5(royal)), HandCategory::kStraightFlush);
  std::vector<int> wheel = parse_cards("Ah 2c 3d 4s 5h");
  EXPECT_EQ(category_of(evaluate5(wheel)), HandCategory::kStraight);
  std::vector<int> six_high = parse_cards("2h 3c 4d 5s 6h");
  EXPECT_LT(evaluate5(wheel), evaluate5(six_high));
}

TEST(HandEval, EqualBestFiveGivesEqualRank) {
  // The board plays for both hands.
  const auto board = parse_cards("As Ks Qs Js Ts");
  std::vector<Hand> hands(2);
  hands[0].cards = {parse_card("2c"), parse_card("3d")};
  hands[1].cards = {parse_card("4h"), parse_card("5c")};
  for (auto& h : hands) h.size = 2;
  const auto rank = rank_hands(board, hands);
  EXPECT_EQ(rank[0], rank[1]);
}

TEST(HandEval, MatchesNaiveOnRandomDraws) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 10000; ++i) {
    const auto cards = testing::random_board(rng, 7);
    ASSERT_EQ(evaluate7(cards), evaluate7_naive(cards)) << cards_to_string(cards);
  }
}

TEST(HandEval, RankHandsMarksBoardCollisions) {
  const auto board = parse_cards("Ks Th 7d 4c 2s");
  const auto hands = enumerate_hands(full_deck(), {}, 2);
  const auto rank = rank_hands(board, hands);
  for (std::size_t h = 0; h < hands.size(); ++h) {
    EXPECT_EQ(rank[h] == 0, hands[h].overlaps(board));
  }
}

}  // namespace
}  // namespace pcfr
