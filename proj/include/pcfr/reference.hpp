#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "pcfr/cfr_variants.hpp"
#include "pcfr/game_tree.hpp"
#include "pcfr/leaf_eval.hpp"
#include "pcfr/strategy.hpp"

namespace pcfr {

// Explicit pairwise payoff algebra over (hero hand, opponent hand) deals.
// Every matrix entry is built from first principles: card disjointness,
// board collisions, the conditional probability of each chance edge given
// both private hands, and the showdown comparison. No aggregates, no sorted
// scans. Matrices are shared by all nodes below the same chance outcome.
class DealAlgebra {
 public:
  explicit DealAlgebra(const GameTree& tree, std::size_t cache_bytes = std::size_t{1} << 30);

  // Opponent mass compatible with each hero hand at `node`, chance included:
  // out(h) = sum_o C(h, o) * opp(o).
  void counterfactual(int node, std::span<const double> opp, std::span<double> out);

  // Batched form: out.col(j) = C(nodes[j]) * opp.col(j) for nodes under one
  // deal; `signed_payoff` switches to the showdown matrix (C times the sign
  // of the rank comparison).
  void apply(int key, int ranking, bool signed_payoff, const std::vector<const double*>& opp,
             const std::vector<double*>& out);

  int deal_key(int node) const { return deal_key_[node]; }

  // Number of (terminal or leaf node, compatible deal) pairs.
  std::int64_t count_histories() const;

 private:
  struct Matrix {
    std::vector<double> data;  // hands x hands, row-major
  };
  std::shared_ptr<const Matrix> matrix(int key, int ranking, bool signed_payoff);
  double conditional(int key, int h, int o) const;

  const GameTree& tree_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::vector<int> deal_key_;
  std::map<std::pair<int, int>, std::shared_ptr<const Matrix>> cache_;
};

enum class ReferenceMode {
  kHistory,       // explicit pairwise sums; structurally independent of the pipeline
  kMatchedOrder,  // recursive vector CFR with the pipeline's summation order
};

// Serial single-threaded CFR with the same schedule as the pipeline: passes
// alternate traverser 0, 1, 0, ...; t = 1 + pass / 2; the non-traverser's
// average strategy is accumulated during the traverser's pass.
class SerialReference {
 public:
  SerialReference(const GameTree& tree, VariantConfig variant, ReferenceMode mode,
                  Evaluator* evaluator = nullptr, RowAbstraction rows = {});
  ~SerialReference();

  void run_pass();
  void run_iterations(int iterations);

  StrategyTables& tables() { return tables_; }
  const StrategyTables& tables() const { return tables_; }
  int pass() const { return pass_; }
  // Traverser counterfactual values of the last pass, nodes x hands.
  const std::vector<double>& values() const { return values_; }

 private:
  void history_pass(int traverser, int t);
  void matched_pass(int traverser, int t);

  const GameTree& tree_;
  VariantConfig variant_;
  ReferenceMode mode_;
  Evaluator* evaluator_;
  StrategyTables tables_;
  std::unique_ptr<DealAlgebra> algebra_;
  std::vector<double> values_;
  int pass_ = 0;
};

// Own-reach of `player` at every node (nodes x hands) by direct recursion.
std::vector<double> reference_reach(const GameTree& tree, const Profile& profile, int player);

// Opponent x chance counterfactual reach for the traverser's hands at every
// node, from explicit pairwise sums.
std::vector<double> reference_opp_reach(const GameTree& tree, const Profile& profile,
                                        int traverser);

// Best-response value (chips) of `responder` against the other player's
// strategy in `profile`. Depth-limited leaves are valued with the evaluator
// on both players' profile reach.
double best_response_value(const GameTree& tree, const Profile& profile, int responder,
                           Evaluator* evaluator = nullptr);
// The same quantity from explicit pairwise sums; for small trees.
double best_response_value_history(const GameTree& tree, const Profile& profile, int responder,
                                   Evaluator* evaluator = nullptr);

// Counterfactual values of `hero` at every node when both players follow
// `profile`, and the opponent x chance reach for hero's hands there
// (nodes x hands each).
struct ProfileValues {
  std::vector<double> values;
  std::vector<double> opp_reach;
};
ProfileValues profile_node_values(const GameTree& tree, const Profile& profile, int hero,
                                  Evaluator* evaluator = nullptr);

// Expected chips for player 0 when both follow `profile`.
double game_value(const GameTree& tree, const Profile& profile, Evaluator* evaluator = nullptr);

struct BestResponseResult {
  std::array<double, kNumPlayers> value{};
  double exploitability = 0.0;  // chips: (br0 + br1) / 2
  double pot_units = 0.0;       // / starting pot
  double mbb_per_game = 0.0;    // / big blind * 1000
};

BestResponseResult exploitability(const GameTree& tree, const Profile& profile,
                                  Evaluator* evaluator = nullptr);

struct EquilibriumResult {
  double value = 0.0;  // player 0, chips
  Profile strategy;
  double exploitability = 0.0;
  int iterations = 0;
};

inline constexpr std::int64_t kMaxSmallGameHistories = 1'000'000;

// Iterates history-level CFR+ until the average profile is within `target`
// chips of equilibrium or `max_iterations` is reached. Throws
// std::invalid_argument for trees with more than kMaxSmallGameHistories
// histories.
EquilibriumResult lp_equilibrium_small(const GameTree& tree, double target = 1e-7,
                                       int max_iterations = 1'000'000);

}  // namespace pcfr
