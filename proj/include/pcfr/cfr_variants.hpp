#pragma once

#include <span>
#include <string>
#include <vector>

namespace pcfr {

enum class VariantKind { kVanilla, kCfrPlus, kDcfr, kPcfrPlus };

const char* to_string(VariantKind kind);
// Accepts the config spellings cfr, cfr+, dcfr, pcfr+.
VariantKind parse_variant(const std::string& name);

struct VariantConfig {
  VariantKind kind = VariantKind::kCfrPlus;
  double dcfr_alpha = 1.5;
  double dcfr_beta = 0.0;
  double dcfr_gamma = 2.0;

  void validate() const;
};

// sigma(a) = max(R(a), 0) / sum_a' max(R(a'), 0); uniform when the sum is 0.
void regret_match(std::span<const double> cum, std::span<double> out);

void update_vanilla(std::span<double> cum, std::span<const double> r_inst);
void update_cfr_plus(std::span<double> cum, std::span<const double> r_inst);
// Discounts positive entries by t^a/(t^a+1) and negative ones by
// t^b/(t^b+1), then adds r_inst. Throws for t < 1.
void update_dcfr(std::span<double> cum, std::span<const double> r_inst, int t,
                 double alpha, double beta);
// cum = max(cum + r_inst, 0); pred = r_inst.
void update_pcfr_plus(std::span<double> cum, std::span<double> pred,
                      std::span<const double> r_inst);

// Cumulative-regret update for iteration t (1-based) followed by the next
// current strategy. `pred` is only touched by PCFR+.
void update_row(const VariantConfig& cfg, std::span<double> cum,
                std::span<double> pred, std::span<const double> r_inst, int t,
                std::span<double> next_strategy);

// Weight of iteration t in the average strategy: 1 (vanilla), t (CFR+),
// t^2 (PCFR+). DCFR uses a multiplicative discount instead, see
// accumulate_average.
double averaging_weight(const VariantConfig& cfg, int t);

// cum_strategy += w_t * reach * strategy. For DCFR the sum is multiplied by
// (t / (t + 1))^gamma after adding this iteration's contribution.
void accumulate_average(const VariantConfig& cfg, std::span<double> cum_strategy,
                        double reach, std::span<const double> strategy, int t);

// Normalized row; uniform when the row is all zero.
void normalize_average(std::span<const double> cum_strategy, std::span<double> out);

}  // namespace pcfr
