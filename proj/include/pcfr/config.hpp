#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcfr/abstraction.hpp"
#include "pcfr/leaf_eval.hpp"
#include "pcfr/pipeline.hpp"
#include "pcfr/poker_games.hpp"
#include "pcfr/solver.hpp"

namespace pcfr {

enum class GameKind { kKuhn, kLeduc, kSubgame, kPreflopToy };

const char* to_string(GameKind kind);

struct RunConfig {
  // [game]
  GameKind game = GameKind::kKuhn;
  SubgameConfig subgame;

  // [solver]
  VariantConfig variant;
  int iterations = 1000;
  int workers = 1;
  std::uint64_t seed = 1;
  int convergence_every = 0;
  int hand_block = 128;
  ForkMode fork = ForkMode::kConcurrent;
  bool random_init = false;

  // [evaluator]
  EvaluatorSpec evaluator;

  // [abstraction]: per betting round, "" (none), "lossless_preflop" or a
  // bucket map file; `leaf_buckets` applies at the evaluator boundary.
  std::vector<std::string> strategy_buckets = std::vector<std::string>(4);
  std::string leaf_buckets;

  // [pruning]
  std::string prune_mask;  // file
  std::string bounds = "none";  // none | exact
  double bounds_slack = 0.0;

  // [bench]
  int warmup = 5;
  int measured = 20;
  std::vector<int> k_list{1, 2, 3, 4, 5};
  std::string street_label;  // defaults to the game's street

  // [output]
  std::string output_dir = ".";
  std::string strategy_file = "strategy.txt";
  std::string convergence_file = "convergence.csv";
  std::string timings_file = "timings.csv";
  std::string scaling_file = "scaling.csv";
  bool mask_timings = false;  // write timing columns as 0

  // [verify]
  int verify_iterations = 100;
  double tolerance = 1e-9;
  bool free_run = true;
  bool bitwise = true;
  Fault perturb;

  GameTree build_tree() const;
};

// Structured text: "[section]" headers and "key = value" lines; '#' or ';'
// start a comment. Unknown sections or keys and malformed values throw
// std::invalid_argument naming the key and line. `overrides` are
// "section.key=value" strings applied after the file. The environment
// variable PCFR_THREADS sets the default worker count.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {},
                            const std::string& origin = "<text>");

// Strategy row abstraction and leaf evaluator for a built tree.
RowAbstraction load_row_abstraction(const RunConfig& config, const GameTree& tree);
std::unique_ptr<Evaluator> load_evaluator(const RunConfig& config, const GameTree& tree);

SolveOptions solve_options(const RunConfig& config);

}  // namespace pcfr
