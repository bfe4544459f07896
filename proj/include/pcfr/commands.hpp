#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcfr/config.hpp"
#include "pcfr/pipeline.hpp"
#include "pcfr/reference.hpp"

namespace pcfr {

// Largest per-block relative deviation between two table sets of the same
// shape: max|a - b| / max|b| over each InfosetBlock table (absolute when
// the reference block is all zero), with the worst entry located.
struct Deviation {
  double relative = 0.0;
  double absolute = 0.0;
  std::int64_t unequal = 0;  // entries that differ in any bit
  std::string table;         // cum_regret | cum_strategy
  int node = -1;
  int player = -1;
  int row = -1;
  int action = -1;
  double value = 0.0;      // pipeline
  double reference = 0.0;  // serial reference

  void merge(const Deviation& other);
};

Deviation compare_tables(const StrategyTables& pipeline, const StrategyTables& reference);

struct VerifyReport {
  int passes = 0;
  Deviation matched;   // matched-order reference, free-running
  Deviation synced;    // history reference, re-synced to the pipeline before every pass
  Deviation free_run;  // history reference, free-running
  bool history_ran = false;
  bool free_run_ran = false;
};

// Runs the pipeline next to the serial references for `iterations`
// iterations (two passes each).
VerifyReport run_verify(const GameTree& tree, const PipelineOptions& options, Evaluator* evaluator,
                        int iterations, bool history, bool free_run);

// Per-pass stage timings after `warmup` discarded passes.
std::vector<StageTimings> run_bench(const GameTree& tree, const PipelineOptions& options,
                                    Evaluator* evaluator, int warmup, int measured);

struct ScalingRow {
  int k = 1;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double speedup = 1.0;
  std::uint64_t state_digest = 0;
};

// K = 1 is always measured first as the baseline.
std::vector<ScalingRow> run_scaling(const GameTree& tree, const PipelineOptions& options,
                                    Evaluator* evaluator, std::vector<int> k_list, int warmup,
                                    int measured);

// FNV-1a over the bytes of every strategy, regret and average table.
std::uint64_t state_digest(const StrategyTables& tables);

// Prune mask from the config: a mask file, exact bounds from a small-game
// equilibrium, or none.
PruneMask load_prune_mask(const RunConfig& config, const GameTree& tree, Evaluator* evaluator);

// Command entry points. Data go to files and `out`, diagnostics to `err`.
// Each returns the process exit code.
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_scaling(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pcfr
