#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcfr/cfr_variants.hpp"
#include "pcfr/game_tree.hpp"
#include "pcfr/leaf_eval.hpp"
#include "pcfr/range_engine.hpp"
#include "pcfr/strategy.hpp"

namespace pcfr {

// Order of the middle pass: stage 5 on its own thread next to stages 3-4,
// or strictly before, or strictly after them.
enum class ForkMode { kConcurrent, kLeafFirst, kShowdownFirst };

const char* to_string(ForkMode mode);
ForkMode parse_fork_mode(const std::string& name);

inline constexpr int kNumStages = 7;

struct StageTimings {
  std::array<double, kNumStages> stage_ms{};
  double total_ms = 0.0;
  bool overlapped = false;  // stages 3-4 ran next to stage 5

  // Critical-path sum: an overlapped fork counts max(S3 + S4, S5).
  double stage_sum() const;
};

// Test hook: added to one cum_regret entry after stage 7 of pass `pass`.
struct Fault {
  int pass = -1;
  int node = -1;
  int row = 0;
  int action = 0;
  double delta = 0.0;
};

struct PipelineOptions {
  VariantConfig variant;
  int workers = 1;
  ForkMode fork = ForkMode::kConcurrent;
  int hand_block = 128;            // hands (or rows) per work item
  bool opp_reach_all_nodes = false;  // stage 3 fills every node, not only folds and leaves
  RowAbstraction rows;             // strategy buckets per round
  Fault fault;
};

// All per-pass buffers. Node-major matrices are nodes x hands.
struct PipelineState {
  int pass = 0;        // passes completed
  int traverser = 0;
  int iteration = 1;   // t of the pass being run: 1 + pass / 2
  std::array<std::vector<double>, kNumPlayers> reach;
  std::vector<double> opp_sum;    // per node
  std::vector<double> opp_card;   // nodes x deck
  std::vector<double> opp_reach;  // counterfactual opponent x chance reach
  std::vector<double> values;     // traverser counterfactual values
  LeafBatch leaf_batch;
  LeafValues leaf_values;
  StrategyTables tables;
};

class Executor;

class Pipeline {
 public:
  // `evaluator` must outlive the pipeline; it is required when the tree has
  // depth-limited leaves.
  Pipeline(const GameTree& tree, PipelineOptions options, Evaluator* evaluator = nullptr);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  // One traverser pass: 1, 2, fork {3, 4} | {5}, join, 6, 7. Alternates the
  // traverser between calls.
  StageTimings run_iteration();

  // Individual stages for the current pass. begin_pass() selects traverser
  // and t from the pass counter; end_pass() advances it.
  void begin_pass();
  void stage1_forward_profile();
  void stage2_aggregate();
  void stage3_opponent_reach();
  void stage4_showdown();
  void stage5_leaf_eval();
  void stage6_backward_cfv();
  void stage7_update();
  void end_pass();

  const GameTree& tree() const { return tree_; }
  const PipelineOptions& options() const { return opts_; }
  PipelineState& state() { return state_; }
  const PipelineState& state() const { return state_; }
  int workers() const { return opts_.workers; }

  std::span<const double> reach(int player, int node) const { return row(state_.reach[player], node); }
  std::span<const double> opp_reach(int node) const { return row(state_.opp_reach, node); }
  std::span<const double> values(int node) const { return row(state_.values, node); }
  // Product of conditional chance factors from the root to `node`.
  double chance_prod(int node) const { return chance_prod_[node]; }
  bool valid(int node, int hand) const {
    return valid_[static_cast<std::size_t>(node) * hands_ + hand] != 0;
  }

 private:
  struct Segment {
    int player = 0;
    bool root = false;
    std::vector<int> nodes;  // ascending id
  };
  struct Item {
    int a = 0;      // segment or node index
    int begin = 0;  // hand / row range
    int end = 0;
  };

  std::span<const double> row(const std::vector<double>& m, int node) const {
    return {m.data() + static_cast<std::size_t>(node) * hands_, static_cast<std::size_t>(hands_)};
  }
  void build_segments();
  std::vector<Item> blocked(const std::vector<int>& ids, std::function<int(int)> width) const;
  const std::vector<std::vector<int>>* members_of(const InfosetBlock& b) const;
  void middle_pass(StageTimings& t);

  const GameTree& tree_;
  PipelineOptions opts_;
  Evaluator* evaluator_;
  std::unique_ptr<Executor> exec_;
  PipelineState state_;

  int hands_ = 0;
  int deck_ = 0;
  std::vector<std::uint8_t> valid_;
  std::vector<double> chance_prod_;
  std::array<std::vector<int>, kNumPlayers> nearest_;
  std::array<std::vector<int>, kNumPlayers> nearest_action_;
  std::vector<Segment> segments_;
  std::array<std::vector<int>, kNumPlayers> chain_segments_;  // per traverser
  std::array<int, kNumPlayers> root_segment_{};
  std::vector<Item> stage1_items_;
  std::array<std::vector<Item>, kNumPlayers> accumulate_items_;  // per acting player
  std::array<std::vector<Item>, kNumPlayers> update_items_;
  std::array<std::vector<Item>, kNumPlayers> backward_items_;
  std::array<std::vector<Item>, kNumPlayers> backward_root_items_;
  std::vector<int> agg_nodes_;
  std::vector<Item> opp_items_;
  std::vector<int> terminal_nodes_;
  std::vector<int> leaf_nodes_;
  std::vector<int> leaf_row_;     // node -> batch row
  std::vector<ShowdownOrder> orders_;
  // distinct row maps and their member lists
  std::vector<std::shared_ptr<const std::vector<int>>> row_maps_;
  std::vector<std::vector<std::vector<int>>> row_members_;
};

}  // namespace pcfr
