#pragma once

#include <cstdint>
#include <vector>

#include "pcfr/abstraction.hpp"
#include "pcfr/pipeline.hpp"
#include "pcfr/reference.hpp"

namespace pcfr {

struct SolveOptions {
  PipelineOptions pipeline;
  int iterations = 1000;       // full iterations, two passes each
  int convergence_every = 0;   // 0 = only at the end
  bool random_init = false;    // random initial current strategies
  std::uint64_t seed = 1;
};

struct ConvergencePoint {
  int iteration = 0;
  double wall_ms = 0.0;  // solver time so far, best-response time excluded
  double exploitability_chips = 0.0;
  double exploitability_pot = 0.0;
  double exploitability_mbb = 0.0;
};

struct SolveResult {
  Profile average;  // on the original tree
  StrategyTables tables;  // on the solved (possibly pruned) tree
  std::vector<ConvergencePoint> log;
  double rho = 1.0;
  BestResponseResult final_exploitability;
};

// Applies `mask` (if any), runs the pipeline and measures exploitability of
// the lifted average strategy on the original tree.
SolveResult run_solve(const GameTree& tree, const SolveOptions& options,
                      Evaluator* evaluator = nullptr, const PruneMask* mask = nullptr);

}  // namespace pcfr
