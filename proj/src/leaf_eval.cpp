#include "pcfr/leaf_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pcfr/poker_games.hpp"

namespace pcfr {

void encode_leaf_input(const GameTree& tree, const PublicNode& node,
                       std::span<const double> range0, std::span<const double> range1,
                       std::span<double> out) {
  const int deck = tree.deck_size;
  const int n = tree.num_hands();
  std::fill(out.begin(), out.end(), 0.0);
  for (int c : node.board) out[c] = 1.0;
  out[deck] = tree.stack > 0.0 ? node.pot / tree.stack : node.pot;
  auto put = [&](std::span<const double> r, int offset) {
    double sum = 0.0;
    for (double x : r) sum += x;
    if (sum <= 0.0) return;
    for (int h = 0; h < n; ++h) out[offset + h] = r[h] / sum;
  };
  put(range0, deck + 1);
  put(range1, deck + 1 + n);
}

LeafValues Evaluator::evaluate(const LeafBatch& batch) {
  if (batch.dim != input_dim_ ||
      batch.inputs.size() != static_cast<std::size_t>(batch.rows) * batch.dim) {
    throw std::invalid_argument("evaluator expects input dim " + std::to_string(input_dim_) +
                                ", batch has " + std::to_string(batch.dim));
  }
  LeafValues out;
  out.cols = output_dim_;
  if (batch.rows == 0) return out;
  out.rows = batch.rows;
  out.values.assign(static_cast<std::size_t>(out.rows) * out.cols, 0.0);
  ++calls_;
  run(batch, out);
  return out;
}

// ---------------------------------------------------------------- equity

EquityOracle::EquityOracle(const GameTree& tree)
    : Evaluator(leaf_input_dim(tree.deck_size, tree.num_hands()), 2 * tree.num_hands()),
      tree_(tree) {}

const EquityOracle::Board& EquityOracle::board_for(std::vector<int> cards) {
  std::sort(cards.begin(), cards.end());
  std::lock_guard<std::mutex> lock(mu_);
  auto it = boards_.find(cards);
  if (it == boards_.end()) {
    Board b;
    b.ranking = rank_hands(cards, tree_.hands);
    b.order = make_showdown_order(b.ranking);
    it = boards_.emplace(std::move(cards), std::move(b)).first;
  }
  return it->second;
}

void EquityOracle::run(const LeafBatch& batch, LeafValues& out) {
  for (int r = 0; r < batch.rows; ++r) eval_row(batch.row(r), out.row(r));
}

void EquityOracle::eval_row(std::span<const double> x, std::span<double> out) {
  const int deck = tree_.deck_size;
  const int n = tree_.num_hands();
  const auto& hands = tree_.hands;
  std::vector<int> board;
  for (int c = 0; c < deck; ++c) {
    if (x[c] > 0.5) board.push_back(c);
  }
  const double pot = tree_.stack > 0.0 ? x[deck] * tree_.stack : x[deck];
  const int to_come = 5 - static_cast<int>(board.size());
  if (deck != kPokerDeckSize || to_come < 0 || to_come > 2) {
    throw std::invalid_argument("equity oracle needs a hold'em board with at most two cards to come");
  }
  std::vector<int> remaining;
  for (int c : tree_.deck) {
    if (std::find(board.begin(), board.end(), c) == board.end()) remaining.push_back(c);
  }
  const int free_cards = static_cast<int>(remaining.size()) - 2 * tree_.hand_size;
  double runout_weight = 1.0;
  if (to_come == 1) runout_weight = 1.0 / free_cards;
  if (to_come == 2) runout_weight = 2.0 / (static_cast<double>(free_cards) * (free_cards - 1));

  std::vector<double> opp(n), masked(n), acc(n), sd(n);
  ShowdownScratch scratch;
  for (int p = 0; p < kNumPlayers; ++p) {
    const int opp_offset = deck + 1 + (1 - p) * n;
    for (int h = 0; h < n; ++h) {
      opp[h] = hands[h].overlaps(board) ? 0.0 : x[opp_offset + h];
    }
    const Aggregates agg = aggregate(opp, hands, deck);
    std::fill(acc.begin(), acc.end(), 0.0);

    auto add_board = [&](const std::vector<int>& dealt) {
      std::vector<int> full = board;
      full.insert(full.end(), dealt.begin(), dealt.end());
      const Board& b = board_for(full);
      for (int h = 0; h < n; ++h) masked[h] = hands[h].overlaps(dealt) ? 0.0 : opp[h];
      showdown_values(masked, hands, b.order, deck, pot, 1.0, sd, scratch);
      for (int h = 0; h < n; ++h) {
        if (!hands[h].overlaps(dealt)) acc[h] += sd[h];
      }
    };
    if (to_come == 0) {
      add_board({});
    } else if (to_come == 1) {
      for (int c : remaining) add_board({c});
    } else {
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        for (std::size_t j = i + 1; j < remaining.size(); ++j) {
          add_board({remaining[i], remaining[j]});
        }
      }
    }
    for (int h = 0; h < n; ++h) {
      const double cf = counterfactual_reach(agg, hands[h], h);
      const bool live = !hands[h].overlaps(board) && cf > 0.0;
      out[p * n + h] = live ? acc[h] * runout_weight / cf : 0.0;
    }
  }
}

// ------------------------------------------------------------- synthetic

SyntheticNet::SyntheticNet(int input_dim, int num_hands, int hidden, std::uint64_t seed)
    : Evaluator(input_dim, 2 * num_hands), hidden_(hidden), num_hands_(num_hands) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  w1_.resize(static_cast<std::size_t>(hidden) * input_dim);
  for (auto& w : w1_) w = s1 * u(rng);
  b1_.resize(hidden);
  for (auto& b : b1_) b = 0.1 * u(rng);
  w2_.resize(static_cast<std::size_t>(num_hands) * hidden);
  for (auto& w : w2_) w = s2 * u(rng);
  b2_.resize(num_hands);
  for (auto& b : b2_) b = 0.1 * u(rng);
}

void SyntheticNet::run(const LeafBatch& batch, LeafValues& out) {
  const int d = input_dim();
  std::vector<double> hid(hidden_);
  for (int r = 0; r < batch.rows; ++r) {
    auto x = batch.row(r);
    for (int j = 0; j < hidden_; ++j) {
      const double* w = w1_.data() + static_cast<std::size_t>(j) * d;
      double s = b1_[j];
      for (int i = 0; i < d; ++i) s += w[i] * x[i];
      hid[j] = std::tanh(s);
    }
    auto y = out.row(r);
    for (int k = 0; k < num_hands_; ++k) {
      const double* w = w2_.data() + static_cast<std::size_t>(k) * hidden_;
      double s = b2_[k];
      for (int j = 0; j < hidden_; ++j) s += w[j] * hid[j];
      y[k] = s;
      y[num_hands_ + k] = -s;
    }
  }
}

// -------------------------------------------------------------- external

namespace {

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw std::runtime_error("weight bundle truncated");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof v);
  write_u64(out, bits);
}

constexpr std::uint64_t kBundleMagic = 0x3174656e72666370ULL;  // "pcfrnet1"

}  // namespace

ExternalNet::ExternalNet(std::vector<int> dims, std::vector<std::vector<double>> weights,
                         std::vector<std::vector<double>> biases)
    : Evaluator(dims.front(), dims.back()),
      dims_(std::move(dims)),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (dims_.size() < 2 || weights_.size() != dims_.size() - 1 ||
      biases_.size() != dims_.size() - 1) {
    throw std::invalid_argument("weight bundle: layer count mismatch");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (weights_[l].size() != static_cast<std::size_t>(dims_[l]) * dims_[l + 1] ||
        biases_[l].size() != static_cast<std::size_t>(dims_[l + 1])) {
      throw std::invalid_argument("weight bundle: layer " + std::to_string(l) +
                                  " has the wrong size");
    }
  }
}

std::unique_ptr<ExternalNet> ExternalNet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weight bundle " + path);
  if (read_u64(in) != kBundleMagic) {
    throw std::runtime_error(path + ": not a weight bundle");
  }
  const std::uint64_t layers = read_u64(in);
  if (layers == 0 || layers > 64) throw std::runtime_error(path + ": bad layer count");
  std::vector<int> dims;
  for (std::uint64_t i = 0; i <= layers; ++i) {
    const std::uint64_t d = read_u64(in);
    if (d == 0 || d > (1u << 24)) throw std::runtime_error(path + ": bad layer width");
    dims.push_back(static_cast<int>(d));
  }
  std::vector<std::vector<double>> w(layers), b(layers);
  for (std::uint64_t l = 0; l < layers; ++l) {
    w[l].resize(static_cast<std::size_t>(dims[l]) * dims[l + 1]);
    for (auto& x : w[l]) x = read_f64(in);
    b[l].resize(dims[l + 1]);
    for (auto& x : b[l]) x = read_f64(in);
  }
  return std::make_unique<ExternalNet>(std::move(dims), std::move(w), std::move(b));
}

void ExternalNet::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_u64(out, kBundleMagic);
  write_u64(out, dims_.size() - 1);
  for (int d : dims_) write_u64(out, static_cast<std::uint64_t>(d));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (double x : weights_[l]) write_f64(out, x);
    for (double x : biases_[l]) write_f64(out, x);
  }
}

void ExternalNet::run(const LeafBatch& batch, LeafValues& out) {
  std::vector<double> cur, next;
  for (int r = 0; r < batch.rows; ++r) {
    auto x = batch.row(r);
    cur.assign(x.begin(), x.end());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const int in_dim = dims_[l];
      const int out_dim = dims_[l + 1];
      next.assign(out_dim, 0.0);
      for (int j = 0; j < out_dim; ++j) {
        const double* w = weights_[l].data() + static_cast<std::size_t>(j) * in_dim;
        double s = biases_[l][j];
        for (int i = 0; i < in_dim; ++i) s += w[i] * cur[i];
        next[j] = l + 1 < weights_.size() ? std::tanh(s) : s;
      }
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), out.row(r).begin());
  }
}

// -------------------------------------------------------------- bucketed

BucketedEvaluator::BucketedEvaluator(std::shared_ptr<Evaluator> inner, int deck_size,
                                     std::vector<int> bucket_of)
    : Evaluator(leaf_input_dim(deck_size, static_cast<int>(bucket_of.size())),
                2 * static_cast<int>(bucket_of.size())),
      inner_(std::move(inner)),
      deck_size_(deck_size),
      bucket_of_(std::move(bucket_of)) {
  buckets_ = 0;
  for (int b : bucket_of_) buckets_ = std::max(buckets_, b + 1);
  if (inner_->input_dim() != leaf_input_dim(deck_size_, buckets_) ||
      inner_->output_dim() != 2 * buckets_) {
    throw std::invalid_argument("bucketed evaluator: inner network does not match bucket count");
  }
}

void BucketedEvaluator::run(const LeafBatch& batch, LeafValues& out) {
  const int n = static_cast<int>(bucket_of_.size());
  const int head = deck_size_ + 1;
  LeafBatch small;
  small.rows = batch.rows;
  small.dim = inner_->input_dim();
  small.inputs.assign(static_cast<std::size_t>(small.rows) * small.dim, 0.0);
  small.leaf_node_ids = batch.leaf_node_ids;
  for (int r = 0; r < batch.rows; ++r) {
    auto x = batch.row(r);
    auto y = small.row(r);
    std::copy(x.begin(), x.begin() + head, y.begin());
    for (int p = 0; p < kNumPlayers; ++p) {
      for (int h = 0; h < n; ++h) {
        y[head + p * buckets_ + bucket_of_[h]] += x[head + p * n + h];
      }
    }
  }
  const LeafValues v = inner_->evaluate(small);
  for (int r = 0; r < batch.rows; ++r) {
    auto src = v.row(r);
    auto dst = out.row(r);
    for (int p = 0; p < kNumPlayers; ++p) {
      for (int h = 0; h < n; ++h) dst[p * n + h] = src[p * buckets_ + bucket_of_[h]];
    }
  }
}

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSpec& spec, const GameTree& tree) {
  const int d = leaf_input_dim(tree.deck_size, tree.num_hands());
  if (spec.kind == "equity_oracle") return std::make_unique<EquityOracle>(tree);
  if (spec.kind == "synthetic_net") {
    if (spec.hidden < 1) throw std::invalid_argument("evaluator.hidden must be >= 1");
    return std::make_unique<SyntheticNet>(d, tree.num_hands(), spec.hidden, spec.seed);
  }
  if (spec.kind == "external") {
    auto net = ExternalNet::load(spec.path);
    if (net->input_dim() != d || net->output_dim() != 2 * tree.num_hands()) {
      throw std::invalid_argument("external network dims " + std::to_string(net->input_dim()) +
                                  "x" + std::to_string(net->output_dim()) +
                                  " do not fit this tree (" + std::to_string(d) + "x" +
                                  std::to_string(2 * tree.num_hands()) + ")");
    }
    return net;
  }
  throw std::invalid_argument("unknown evaluator kind '" + spec.kind + "'");
}

}  // namespace pcfr
