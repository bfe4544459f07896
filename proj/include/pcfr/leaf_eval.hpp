#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pcfr/game_tree.hpp"
#include "pcfr/range_engine.hpp"

namespace pcfr {

// Row layout: [board one-hot over the card universe, pot / stack,
// player-0 range normalized to sum 1, player-1 range likewise].
inline constexpr const char* kLeafLayoutVersion = "board-onehot+pot+r0+r1/v1";

inline int leaf_input_dim(int deck_size, int num_hands) {
  return deck_size + 1 + 2 * num_hands;
}

struct LeafBatch {
  int rows = 0;
  int dim = 0;
  std::vector<double> inputs;        // rows x dim, row-major
  std::vector<int> leaf_node_ids;    // one per row

  std::span<double> row(int r) {
    return {inputs.data() + static_cast<std::size_t>(r) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> row(int r) const {
    return {inputs.data() + static_cast<std::size_t>(r) * dim, static_cast<std::size_t>(dim)};
  }
};

// Per-hand values for both players, not weighted by opponent reach:
// columns [player-0 hands, player-1 hands].
struct LeafValues {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  std::span<const double> row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<double> row(int r) {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
};

void encode_leaf_input(const GameTree& tree, const PublicNode& node,
                       std::span<const double> range0, std::span<const double> range1,
                       std::span<double> out);

class Evaluator {
 public:
  Evaluator(int input_dim, int output_dim) : input_dim_(input_dim), output_dim_(output_dim) {}
  virtual ~Evaluator() = default;

  // One backend invocation per non-empty batch. Throws
  // std::invalid_argument on a dimension mismatch.
  LeafValues evaluate(const LeafBatch& batch);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  std::int64_t backend_calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 protected:
  virtual void run(const LeafBatch& batch, LeafValues& out) = 0;

 private:
  int input_dim_;
  int output_dim_;
  std::int64_t calls_ = 0;
};

// Exact expected showdown value with the remaining board cards dealt
// uniformly and no further betting.
class EquityOracle : public Evaluator {
 public:
  explicit EquityOracle(const GameTree& tree);

 protected:
  void run(const LeafBatch& batch, LeafValues& out) override;

 private:
  struct Board {
    std::vector<int> ranking;
    ShowdownOrder order;
  };
  const Board& board_for(std::vector<int> cards);
  void eval_row(std::span<const double> x, std::span<double> out);

  const GameTree& tree_;
  std::mutex mu_;
  std::map<std::vector<int>, Board> boards_;
};

// Two dense layers, tanh between them, weights drawn from a seeded
// generator. The player-1 block is the negated player-0 block.
class SyntheticNet : public Evaluator {
 public:
  SyntheticNet(int input_dim, int num_hands, int hidden, std::uint64_t seed);

 protected:
  void run(const LeafBatch& batch, LeafValues& out) override;

 private:
  int hidden_;
  int num_hands_;
  std::vector<double> w1_, b1_, w2_, b2_;
};

// Dense MLP read from a weight bundle (see docs/formats.md): tanh on hidden
// layers, identity on the last one.
class ExternalNet : public Evaluator {
 public:
  static std::unique_ptr<ExternalNet> load(const std::string& path);
  ExternalNet(std::vector<int> dims, std::vector<std::vector<double>> weights,
              std::vector<std::vector<double>> biases);
  void save(const std::string& path) const;

 protected:
  void run(const LeafBatch& batch, LeafValues& out) override;

 private:
  std::vector<int> dims_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

// Runs `inner` in bucket space: range segments are summed per bucket on the
// way in and bucket values are copied back to member hands on the way out.
class BucketedEvaluator : public Evaluator {
 public:
  BucketedEvaluator(std::shared_ptr<Evaluator> inner, int deck_size,
                    std::vector<int> bucket_of);

 protected:
  void run(const LeafBatch& batch, LeafValues& out) override;

 private:
  std::shared_ptr<Evaluator> inner_;
  int deck_size_;
  int buckets_;
  std::vector<int> bucket_of_;
};

struct EvaluatorSpec {
  std::string kind = "equity_oracle";  // equity_oracle | synthetic_net | external
  std::uint64_t seed = 1;
  int hidden = 64;
  std::string path;
};

// Throws std::invalid_argument for an unknown kind or a network whose
// dimensions do not fit the tree.
std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSpec& spec, const GameTree& tree);

}  // namespace pcfr
