#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pcfr/cfr_variants.hpp"

namespace pcfr {
namespace {

using V = std::vector<double>;

V match(V cum) {
  V out(cum.size());
  regret_match(cum, out);
  return out;
}

TEST(RegretMatching, Examples) {
  const V a = match({2, 1, -1});
  EXPECT_DOUBLE_EQ(a[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(a[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(a[2], 0.0);
  EXPECT_EQ(match({-5, -1}), (V{0.5, 0.5}));
  const V u = match({0, 0, 0});
  for (double x : u) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(Vanilla, Accumulates) {
  V cum{0, 0};
  update_vanilla(cum, V{1, -1});
  EXPECT_EQ(cum, (V{1, -1}));
  update_vanilla(cum, V{0, 0});
  EXPECT_EQ(cum, (V{1, -1}));
  V sum{0, 0};
  V acc{0, 0};
  for (int t = 1; t <= 10; ++t) {
    const V r{0.1 * t, -0.3 * t};
    update_vanilla(acc, r);
    sum[0] += r[0];
    sum[1] += r[1];
  }
  EXPECT_EQ(acc, sum);
}

TEST(CfrPlus, Floors) {
  V cum{1};
  update_cfr_plus(cum, V{-3});
  EXPECT_EQ(cum, V{0});
  V a{0.5, 2};
  V b = a;
  update_cfr_plus(a, V{1, 3});
  update_vanilla(b, V{1, 3});
  EXPECT_EQ(a, b);
}

TEST(Dcfr, Discounts) {
  V cum{8, -8};
  update_dcfr(cum, V{0, 0}, 1, 1.5, 0.0);
  EXPECT_DOUBLE_EQ(cum[0], 8 * 0.5);
  EXPECT_DOUBLE_EQ(cum[1], -8 * 0.5);
  cum = {8, -8};
  update_dcfr(cum, V{0, 0}, 5, 1.5, 0.0);
  EXPECT_DOUBLE_EQ(cum[1], -4.0);
  const double f = std::pow(5.0, 1.5) / (std::pow(5.0, 1.5) + 1);
  EXPECT_DOUBLE_EQ(cum[0], 8 * f);
  // Large alpha: positive discount tends to 1.
  cum = {8, -8};
  update_dcfr(cum, V{0, 0}, 3, 60.0, 0.0);
  EXPECT_NEAR(cum[0], 8.0, 1e-12);
  EXPECT_THROW(update_dcfr(cum, V{0, 0}, 0, 1.5, 0.0), std::invalid_argument);
}

TEST(PcfrPlus, Prediction) {
  VariantConfig cfg;
  cfg.kind = VariantKind::kPcfrPlus;
  V cum{0, 0};
  V pred{0, 0};
  V next(2);
  update_row(cfg, cum, pred, V{1, -1}, 1, next);
  EXPECT_EQ(cum, (V{1, 0}));
  EXPECT_EQ(pred, (V{1, -1}));
  EXPECT_EQ(next, (V{1, 0}));

  // Zero prediction reduces to the CFR+ strategy.
  VariantConfig plus;
  V c1{0.3, 0.1};
  V c2 = c1;
  V p1{0, 0};
  V p2{0, 0};
  V n1(2);
  V n2(2);
  update_row(plus, c1, p1, V{0, 0}, 1, n1);
  update_row(cfg, c2, p2, V{0, 0}, 1, n2);
  EXPECT_EQ(n1, n2);
}

TEST(Averaging, Weights) {
  VariantConfig cfg;
  cfg.kind = VariantKind::kVanilla;
  EXPECT_EQ(averaging_weight(cfg, 7), 1.0);
  cfg.kind = VariantKind::kCfrPlus;
  EXPECT_EQ(averaging_weight(cfg, 7), 7.0);
  cfg.kind = VariantKind::kPcfrPlus;
  EXPECT_EQ(averaging_weight(cfg, 7), 49.0);

  cfg.kind = VariantKind::kVanilla;
  V cum{0, 0};
  accumulate_average(cfg, cum, 0.5, V{0.25, 0.75}, 1);
  EXPECT_EQ(cum, (V{0.125, 0.375}));
  V avg(2);
  normalize_average(cum, avg);
  EXPECT_EQ(avg, (V{0.25, 0.75}));
  normalize_average(V{0, 0, 0}, avg = V(3));
  for (double x : avg) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);

  cfg.kind = VariantKind::kDcfr;
  cum = {1, 1};
  accumulate_average(cfg, cum, 1.0, V{1, 0}, 1);
  EXPECT_DOUBLE_EQ(cum[0], 2 * 0.25);
  EXPECT_DOUBLE_EQ(cum[1], 1 * 0.25);
}

TEST(Variants, ParseNames) {
  EXPECT_EQ(parse_variant("cfr"), VariantKind::kVanilla);
  EXPECT_EQ(parse_variant("cfr+"), VariantKind::kCfrPlus);
  EXPECT_EQ(parse_variant("dcfr"), VariantKind::kDcfr);
  EXPECT_EQ(parse_variant("pcfr+"), VariantKind::kPcfrPlus);
  EXPECT_THROW(parse_variant("cfr++"), std::invalid_argument);
  VariantConfig bad;
  bad.dcfr_alpha = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace pcfr
