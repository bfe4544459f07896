#include "pcfr/cfr_variants.hpp"

#include <cmath>
#include <stdexcept>

namespace pcfr {

const char* to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::kVanilla: return "cfr";
    case VariantKind::kCfrPlus: return "cfr+";
    case VariantKind::kDcfr: return "dcfr";
    case VariantKind::kPcfrPlus: return "pcfr+";
  }
  return "?";
}

VariantKind parse_variant(const std::string& name) {
  if (name == "cfr" || name == "vanilla") return VariantKind::kVanilla;
  if (name == "cfr+" || name == "cfr_plus") return VariantKind::kCfrPlus;
  if (name == "dcfr") return VariantKind::kDcfr;
  if (name == "pcfr+" || name == "pcfr_plus") return VariantKind::kPcfrPlus;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

void VariantConfig::validate() const {
  if (!std::isfinite(dcfr_alpha) || !std::isfinite(dcfr_beta) ||
      !std::isfinite(dcfr_gamma)) {
    throw std::invalid_argument("dcfr parameters must be finite");
  }
  if (dcfr_gamma < 0.0) throw std::invalid_argument("dcfr_gamma must be >= 0");
}

void regret_match(std::span<const double> cum, std::span<double> out) {
  double denom = 0.0;
  for (double r : cum) denom += r > 0.0 ? r : 0.0;
  if (denom > 0.0) {
    for (std::size_t a = 0; a < cum.size(); ++a) {
      out[a] = cum[a] > 0.0 ? cum[a] / denom : 0.0;
    }
  } else {
    const double u = 1.0 / static_cast<double>(cum.size());
    for (auto& x : out) x = u;
  }
}

void update_vanilla(std::span<double> cum, std::span<const double> r_inst) {
  for (std::size_t a = 0; a < cum.size(); ++a) cum[a] += r_inst[a];
}

void update_cfr_plus(std::span<double> cum, std::span<const double> r_inst) {
  for (std::size_t a = 0; a < cum.size(); ++a) {
    const double v = cum[a] + r_inst[a];
    cum[a] = v > 0.0 ? v : 0.0;
  }
}

void update_dcfr(std::span<double> cum, std::span<const double> r_inst, int t,
                 double alpha, double beta) {
  if (t < 1) throw std::invalid_argument("dcfr iteration must be >= 1");
  const double ta = std::pow(static_cast<double>(t), alpha);
  const double tb = std::pow(static_cast<double>(t), beta);
  const double pos = ta / (ta + 1.0);
  const double neg = tb / (tb + 1.0);
  for (std::size_t a = 0; a < cum.size(); ++a) {
    cum[a] *= cum[a] > 0.0 ? pos : neg;
    cum[a] += r_inst[a];
  }
}

void update_pcfr_plus(std::span<double> cum, std::span<double> pred,
                      std::span<const double> r_inst) {
  for (std::size_t a = 0; a < cum.size(); ++a) {
    const double v = cum[a] + r_inst[a];
    cum[a] = v > 0.0 ? v : 0.0;
    pred[a] = r_inst[a];
  }
}

void update_row(const VariantConfig& cfg, std::span<double> cum,
                std::span<double> pred, std::span<const double> r_inst, int t,
                std::span<double> next_strategy) {
  switch (cfg.kind) {
    case VariantKind::kVanilla:
      update_vanilla(cum, r_inst);
      break;
    case VariantKind::kCfrPlus:
      update_cfr_plus(cum, r_inst);
      break;
    case VariantKind::kDcfr:
      update_dcfr(cum, r_inst, t, cfg.dcfr_alpha, cfg.dcfr_beta);
      break;
    case VariantKind::kPcfrPlus: {
      update_pcfr_plus(cum, pred, r_inst);
      // rows are at most a handful of actions wide
      double optimistic[16];
      double* buf = optimistic;
      std::vector<double> heap;
      if (cum.size() > 16) {
        heap.resize(cum.size());
        buf = heap.data();
      }
      for (std::size_t a = 0; a < cum.size(); ++a) buf[a] = cum[a] + pred[a];
      regret_match(std::span<const double>(buf, cum.size()), next_strategy);
      return;
    }
  }
  regret_match(cum, next_strategy);
}

double averaging_weight(const VariantConfig& cfg, int t) {
  switch (cfg.kind) {
    case VariantKind::kVanilla: return 1.0;
    case VariantKind::kCfrPlus: return static_cast<double>(t);
    case VariantKind::kDcfr: return 1.0;
    case VariantKind::kPcfrPlus: return static_cast<double>(t) * t;
  }
  return 1.0;
}

void accumulate_average(const VariantConfig& cfg, std::span<double> cum_strategy,
                        double reach, std::span<const double> strategy, int t) {
  const double w = averaging_weight(cfg, t) * reach;
  for (std::size_t a = 0; a < cum_strategy.size(); ++a) {
    cum_strategy[a] += w * strategy[a];
  }
  if (cfg.kind == VariantKind::kDcfr) {
    const double d = std::pow(static_cast<double>(t) / (t + 1.0), cfg.dcfr_gamma);
    for (auto& x : cum_strategy) x *= d;
  }
}

void normalize_average(std::span<const double> cum_strategy, std::span<double> out) {
  double sum = 0.0;
  for (double x : cum_strategy) sum += x;
  if (sum > 0.0) {
    for (std::size_t a = 0; a < cum_strategy.size(); ++a) out[a] = cum_strategy[a] / sum;
  } else {
    const double u = 1.0 / static_cast<double>(cum_strategy.size());
    for (auto& x : out) x = u;
  }
}

}  // namespace pcfr
