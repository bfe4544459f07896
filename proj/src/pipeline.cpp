#include "pcfr/pipeline.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace pcfr {

const char* to_string(ForkMode mode) {
  switch (mode) {
    case ForkMode::kConcurrent: return "concurrent";
    case ForkMode::kLeafFirst: return "leaf_first";
    case ForkMode::kShowdownFirst: return "showdown_first";
  }
  return "?";
}

ForkMode parse_fork_mode(const std::string& name) {
  if (name == "concurrent") return ForkMode::kConcurrent;
  if (name == "leaf_first") return ForkMode::kLeafFirst;
  if (name == "showdown_first") return ForkMode::kShowdownFirst;
  throw std::invalid_argument("unknown fork mode '" + name + "'");
}

double StageTimings::stage_sum() const {
  double s = 0.0;
  for (double x : stage_ms) s += x;
  if (overlapped) s -= std::min(stage_ms[2] + stage_ms[3], stage_ms[4]);
  return s;
}

// K workers: a TBB arena for K > 1, a plain loop otherwise. Items are
// independent, so the schedule never changes results.
class Executor {
 public:
  explicit Executor(int k) {
    if (k > 1) {
      control_ = std::make_unique<tbb::global_control>(
          tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(k));
      arena_ = std::make_unique<tbb::task_arena>(k);
    }
  }

  template <typename F>
  void run(std::size_t n, F&& f) {
    if (!arena_ || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) f(i);
      return;
    }
    arena_->execute([&] {
      tbb::parallel_for(
          tbb::blocked_range<std::size_t>(0, n, 1),
          [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
          },
          tbb::simple_partitioner());
    });
  }

  // Runs a and b side by side in the arena, or a then b without one.
  template <typename A, typename B>
  void fork(A&& a, B&& b) {
    if (!arena_) {
      a();
      b();
      return;
    }
    arena_->execute([&] { tbb::parallel_invoke(a, b); });
  }

  bool parallel() const { return arena_ != nullptr; }

 private:
  std::unique_ptr<tbb::global_control> control_;
  std::unique_ptr<tbb::task_arena> arena_;
};

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Pipeline::Pipeline(const GameTree& tree, PipelineOptions options, Evaluator* evaluator)
    : tree_(tree), opts_(std::move(options)), evaluator_(evaluator) {
  if (opts_.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (opts_.hand_block < 1) throw std::invalid_argument("hand_block must be >= 1");
  opts_.variant.validate();
  hands_ = tree_.num_hands();
  deck_ = tree_.deck_size;
  const int n = tree_.num_nodes();

  valid_.assign(static_cast<std::size_t>(n) * hands_, 0);
  chance_prod_.assign(n, 1.0);
  for (int id = 0; id < n; ++id) {
    for (int h = 0; h < hands_; ++h) {
      valid_[static_cast<std::size_t>(id) * hands_ + h] = tree_.hand_valid(id, h) ? 1 : 0;
    }
    const int parent = tree_[id].parent;
    if (parent >= 0) {
      chance_prod_[id] = chance_prod_[parent] *
                         (tree_[parent].kind == NodeKind::kChance ? tree_.chance_factor(id) : 1.0);
    }
  }

  for (const auto& node : tree_.nodes) {
    switch (node.kind) {
      case NodeKind::kFold:
      case NodeKind::kShowdown:
        terminal_nodes_.push_back(node.id);
        break;
      case NodeKind::kLeaf:
        leaf_nodes_.push_back(node.id);
        break;
      default:
        break;
    }
  }
  leaf_row_.assign(n, -1);
  for (std::size_t i = 0; i < leaf_nodes_.size(); ++i) leaf_row_[leaf_nodes_[i]] = static_cast<int>(i);
  if (!leaf_nodes_.empty()) {
    if (!evaluator_) throw std::invalid_argument("tree has depth-limited leaves but no evaluator");
    if (evaluator_->input_dim() != leaf_input_dim(deck_, hands_) ||
        evaluator_->output_dim() != 2 * hands_) {
      throw std::invalid_argument("evaluator dimensions do not match the leaf layout");
    }
  }
  for (const auto& r : tree_.rankings) orders_.push_back(make_showdown_order(r));

  for (const auto& node : tree_.nodes) {
    if (opts_.opp_reach_all_nodes || node.kind == NodeKind::kFold || node.kind == NodeKind::kLeaf) {
      agg_nodes_.push_back(node.id);
    }
  }

  state_.tables = make_tables(tree_, opts_.rows);
  for (const auto& b : state_.tables.blocks) {
    if (!b.row_of) continue;
    if (std::find(row_maps_.begin(), row_maps_.end(), b.row_of) != row_maps_.end()) continue;
    if (static_cast<int>(b.row_of->size()) != hands_) {
      throw std::invalid_argument("bucket map covers " + std::to_string(b.row_of->size()) +
                                  " hands, tree has " + std::to_string(hands_));
    }
    std::vector<std::vector<int>> members(b.rows);
    for (int h = 0; h < hands_; ++h) members[(*b.row_of)[h]].push_back(h);
    row_maps_.push_back(b.row_of);
    row_members_.push_back(std::move(members));
  }

  build_segments();

  const std::size_t cells = static_cast<std::size_t>(n) * hands_;
  for (auto& r : state_.reach) r.assign(cells, 0.0);
  state_.opp_reach.assign(cells, 0.0);
  state_.values.assign(cells, 0.0);
  state_.opp_sum.assign(n, 0.0);
  state_.opp_card.assign(static_cast<std::size_t>(n) * deck_, 0.0);
  state_.leaf_batch.rows = static_cast<int>(leaf_nodes_.size());
  state_.leaf_batch.dim = leaf_input_dim(deck_, hands_);
  state_.leaf_batch.inputs.assign(
      static_cast<std::size_t>(state_.leaf_batch.rows) * state_.leaf_batch.dim, 0.0);
  state_.leaf_batch.leaf_node_ids = leaf_nodes_;

  exec_ = std::make_unique<Executor>(opts_.workers);
}

Pipeline::~Pipeline() = default;

std::vector<Pipeline::Item> Pipeline::blocked(const std::vector<int>& ids,
                                              std::function<int(int)> width) const {
  std::vector<Item> items;
  for (int id : ids) {
    const int w = width(id);
    for (int b = 0; b < w; b += opts_.hand_block) {
      items.push_back(Item{id, b, std::min(b + opts_.hand_block, w)});
    }
  }
  return items;
}

void Pipeline::build_segments() {
  const int n = tree_.num_nodes();
  std::vector<int> agg_index(agg_nodes_.size());
  for (int p = 0; p < kNumPlayers; ++p) {
    auto& nearest = nearest_[p];
    auto& nearest_action = nearest_action_[p];
    nearest.assign(n, -1);
    nearest_action.assign(n, -1);
    for (int id = 1; id < n; ++id) {
      const auto& node = tree_[id];
      const auto& parent = tree_[node.parent];
      if (parent.kind == NodeKind::kDecision && parent.actor == p) {
        nearest[id] = parent.id;
        nearest_action[id] = node.parent_action;
      } else {
        nearest[id] = nearest[node.parent];
        nearest_action[id] = nearest_action[node.parent];
      }
    }
    const auto chains = build_infoset_forest(tree_, p);
    std::vector<int> chain_of(n, -1);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      for (int id : chains[c].node_ids) chain_of[id] = static_cast<int>(c);
    }
    const int first = static_cast<int>(segments_.size());
    root_segment_[p] = first;
    segments_.push_back(Segment{p, true, {}});
    for (std::size_t c = 0; c < chains.size(); ++c) {
      chain_segments_[p].push_back(static_cast<int>(segments_.size()));
      segments_.push_back(Segment{p, false, {}});
    }
    for (int id = 0; id < n; ++id) {
      const bool own = tree_[id].kind == NodeKind::kDecision && tree_[id].actor == p;
      const int anc = own ? id : nearest[id];
      const int seg = anc < 0 ? first : chain_segments_[p][chain_of[anc]];
      segments_[seg].nodes.push_back(id);
    }
  }

  std::vector<int> all_segments;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    if (!segments_[s].nodes.empty()) all_segments.push_back(static_cast<int>(s));
  }
  auto by_hand = [this](int) { return hands_; };
  stage1_items_ = blocked(all_segments, by_hand);
  for (int p = 0; p < kNumPlayers; ++p) {
    std::vector<int> decisions;
    for (const auto& node : tree_.nodes) {
      if (node.kind == NodeKind::kDecision && node.actor == p) decisions.push_back(node.id);
    }
    accumulate_items_[p] = blocked(decisions, [this](int id) { return state_.tables.at(id).rows; });
    update_items_[p] = accumulate_items_[p];
    std::vector<int> chains;
    for (int s : chain_segments_[p]) {
      if (!segments_[s].nodes.empty()) chains.push_back(s);
    }
    backward_items_[p] = blocked(chains, by_hand);
    std::vector<int> root;
    if (!segments_[root_segment_[p]].nodes.empty()) root.push_back(root_segment_[p]);
    backward_root_items_[p] = blocked(root, by_hand);
  }
  opp_items_ = blocked(agg_nodes_, by_hand);
}

const std::vector<std::vector<int>>* Pipeline::members_of(const InfosetBlock& b) const {
  if (!b.row_of) return nullptr;
  for (std::size_t i = 0; i < row_maps_.size(); ++i) {
    if (row_maps_[i] == b.row_of) return &row_members_[i];
  }
  return nullptr;
}

void Pipeline::begin_pass() {
  state_.traverser = state_.pass % kNumPlayers;
  state_.iteration = 1 + state_.pass / kNumPlayers;
}

void Pipeline::end_pass() {
  const Fault& f = opts_.fault;
  if (f.pass == state_.pass && f.node >= 0) {
    auto& b = state_.tables.at(f.node);
    b.cum_regret[static_cast<std::size_t>(f.row) * b.actions + f.action] += f.delta;
  }
  ++state_.pass;
}

void Pipeline::stage1_forward_profile() {
  auto& st = state_;
  const std::size_t H = hands_;
  exec_->run(stage1_items_.size(), [&](std::size_t i) {
    const Item& it = stage1_items_[i];
    const Segment& seg = segments_[it.a];
    const int p = seg.player;
    double* reach = st.reach[p].data();
    for (int n : seg.nodes) {
      double* out = reach + n * H;
      const std::uint8_t* ok = valid_.data() + n * H;
      const int d = nearest_[p][n];
      if (d < 0) {
        for (int h = it.begin; h < it.end; ++h) out[h] = ok[h] ? 1.0 : 0.0;
        continue;
      }
      const int a = nearest_action_[p][n];
      const InfosetBlock& blk = st.tables.at(d);
      const double* in = reach + d * H;
      for (int h = it.begin; h < it.end; ++h) {
        out[h] = ok[h] ? in[h] * blk.strategy[static_cast<std::size_t>(blk.row(h)) * blk.actions + a]
                       : 0.0;
      }
    }
  });

  const int q = 1 - st.traverser;
  const auto& items = accumulate_items_[q];
  exec_->run(items.size(), [&](std::size_t i) {
    const Item& it = items[i];
    InfosetBlock& blk = st.tables.at(it.a);
    const auto* members = members_of(blk);
    const double* reach = st.reach[q].data() + it.a * H;
    const std::size_t A = blk.actions;
    for (int r = it.begin; r < it.end; ++r) {
      double w;
      if (members) {
        w = 0.0;
        for (int h : (*members)[r]) w += reach[h];
      } else {
        w = reach[r];
      }
      accumulate_average(opts_.variant, std::span<double>(blk.cum_strategy.data() + r * A, A), w,
                         std::span<const double>(blk.strategy.data() + r * A, A), st.iteration);
    }
  });
}

void Pipeline::stage2_aggregate() {
  auto& st = state_;
  const int opp = 1 - st.traverser;
  const std::size_t H = hands_;
  exec_->run(agg_nodes_.size(), [&](std::size_t i) {
    const int n = agg_nodes_[i];
    const std::span<const double> range(st.reach[opp].data() + n * H, H);
    aggregate_into(range, tree_.hands, st.opp_sum[n],
                   std::span<double>(st.opp_card.data() + n * deck_, deck_));
    const int lr = leaf_row_[n];
    if (lr >= 0) {
      encode_leaf_input(tree_, tree_[n], row(st.reach[0], n), row(st.reach[1], n),
                        st.leaf_batch.row(lr));
    }
  });
}

void Pipeline::stage3_opponent_reach() {
  auto& st = state_;
  const int opp = 1 - st.traverser;
  const std::size_t H = hands_;
  exec_->run(opp_items_.size(), [&](std::size_t i) {
    const Item& it = opp_items_[i];
    const int n = it.a;
    const double cp = chance_prod_[n];
    const std::span<const double> p_hand(st.reach[opp].data() + n * H, H);
    const std::span<const double> p_card(st.opp_card.data() + n * deck_, deck_);
    const std::uint8_t* ok = valid_.data() + n * H;
    double* out = st.opp_reach.data() + n * H;
    for (int h = it.begin; h < it.end; ++h) {
      out[h] = ok[h] ? counterfactual_reach(st.opp_sum[n], p_card, p_hand, tree_.hands[h], h) * cp
                     : 0.0;
    }
  });
}

void Pipeline::stage4_showdown() {
  auto& st = state_;
  const int trav = st.traverser;
  const int opp = 1 - trav;
  const std::size_t H = hands_;
  exec_->run(terminal_nodes_.size(), [&](std::size_t i) {
    const int n = terminal_nodes_[i];
    const PublicNode& node = tree_[n];
    double* out = st.values.data() + n * H;
    if (node.kind == NodeKind::kFold) {
      const double s = node.folder == trav ? -node.fold_amount : node.fold_amount;
      const double* cf = st.opp_reach.data() + n * H;
      for (std::size_t h = 0; h < H; ++h) out[h] = s * cf[h];
      return;
    }
    ShowdownScratch scratch;
    showdown_values(row(st.reach[opp], n), tree_.hands, orders_[node.ranking], deck_, node.pot,
                    chance_prod_[n], std::span<double>(out, H), scratch);
    const std::uint8_t* ok = valid_.data() + n * H;
    for (std::size_t h = 0; h < H; ++h) {
      if (!ok[h]) out[h] = 0.0;
    }
  });
}

void Pipeline::stage5_leaf_eval() {
  if (state_.leaf_batch.rows == 0) return;
  state_.leaf_values = evaluator_->evaluate(state_.leaf_batch);
}

void Pipeline::stage6_backward_cfv() {
  auto& st = state_;
  const int trav = st.traverser;
  const std::size_t H = hands_;
  double* V = st.values.data();
  auto sweep = [&](const Item& it) {
    const Segment& seg = segments_[it.a];
    for (auto p = seg.nodes.rbegin(); p != seg.nodes.rend(); ++p) {
      const int n = *p;
      const PublicNode& node = tree_[n];
      double* v = V + n * H;
      switch (node.kind) {
        case NodeKind::kFold:
        case NodeKind::kShowdown:
          break;
        case NodeKind::kLeaf: {
          const double* est = st.leaf_values.row(leaf_row_[n]).data() + trav * H;
          const double* cf = st.opp_reach.data() + n * H;
          for (int h = it.begin; h < it.end; ++h) v[h] = est[h] * cf[h];
          break;
        }
        case NodeKind::kDecision:
          if (node.actor == trav) {
            const InfosetBlock& blk = st.tables.at(n);
            const int A = blk.actions;
            for (int h = it.begin; h < it.end; ++h) {
              const double* sigma = blk.strategy.data() + static_cast<std::size_t>(blk.row(h)) * A;
              double acc = 0.0;
              for (int a = 0; a < A; ++a) acc += sigma[a] * V[node.children[a] * H + h];
              v[h] = acc;
            }
            break;
          }
          [[fallthrough]];
        case NodeKind::kChance:
          for (int h = it.begin; h < it.end; ++h) {
            double acc = 0.0;
            for (int c : node.children) acc += V[c * H + h];
            v[h] = acc;
          }
          break;
      }
    }
  };
  const auto& chains = backward_items_[trav];
  exec_->run(chains.size(), [&](std::size_t i) { sweep(chains[i]); });
  const auto& root = backward_root_items_[trav];
  exec_->run(root.size(), [&](std::size_t i) { sweep(root[i]); });
}

void Pipeline::stage7_update() {
  auto& st = state_;
  const int trav = st.traverser;
  const std::size_t H = hands_;
  const auto& items = update_items_[trav];
  exec_->run(items.size(), [&](std::size_t i) {
    const Item& it = items[i];
    const int n = it.a;
    const PublicNode& node = tree_[n];
    InfosetBlock& blk = st.tables.at(n);
    const auto* members = members_of(blk);
    const std::size_t A = blk.actions;
    const double* v = st.values.data() + n * H;
    std::vector<double> r(A);
    for (int row = it.begin; row < it.end; ++row) {
      for (std::size_t a = 0; a < A; ++a) {
        const double* vc = st.values.data() + node.children[a] * H;
        if (members) {
          double s = 0.0;
          for (int h : (*members)[row]) s += vc[h] - v[h];
          r[a] = s;
        } else {
          r[a] = vc[row] - v[row];
        }
      }
      const std::size_t off = row * A;
      update_row(opts_.variant, std::span<double>(blk.cum_regret.data() + off, A),
                 std::span<double>(blk.pred.data() + off, A), r, st.iteration,
                 std::span<double>(blk.strategy.data() + off, A));
    }
  });
}

void Pipeline::middle_pass(StageTimings& t) {
  auto branch = [&] {
    auto s3 = Clock::now();
    stage3_opponent_reach();
    t.stage_ms[2] = ms_since(s3);
    auto s4 = Clock::now();
    stage4_showdown();
    t.stage_ms[3] = ms_since(s4);
  };
  auto leaf = [&] {
    auto s5 = Clock::now();
    stage5_leaf_eval();
    t.stage_ms[4] = ms_since(s5);
  };
  if (state_.leaf_batch.rows == 0) {
    branch();
    return;
  }
  switch (opts_.fork) {
    case ForkMode::kLeafFirst:
      leaf();
      branch();
      return;
    case ForkMode::kShowdownFirst:
      branch();
      leaf();
      return;
    case ForkMode::kConcurrent:
      t.overlapped = exec_->parallel();
      exec_->fork(leaf, branch);
      return;
  }
}

StageTimings Pipeline::run_iteration() {
  StageTimings t;
  const auto start = Clock::now();
  begin_pass();
  auto s = Clock::now();
  stage1_forward_profile();
  t.stage_ms[0] = ms_since(s);
  s = Clock::now();
  stage2_aggregate();
  t.stage_ms[1] = ms_since(s);
  middle_pass(t);
  s = Clock::now();
  stage6_backward_cfv();
  t.stage_ms[5] = ms_since(s);
  s = Clock::now();
  stage7_update();
  t.stage_ms[6] = ms_since(s);
  end_pass();
  t.total_ms = ms_since(start);
  return t;
}

}  // namespace pcfr
