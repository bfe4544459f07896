#include "pcfr/reference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "pcfr/range_engine.hpp"

namespace pcfr {

namespace {

std::size_t cell(int node, int hands, int h) {
  return static_cast<std::size_t>(node) * hands + h;
}

}  // namespace

// ------------------------------------------------------------ deal algebra

DealAlgebra::DealAlgebra(const GameTree& tree, std::size_t cache_bytes)
    : tree_(tree), budget_(cache_bytes) {
  deal_key_.assign(tree.num_nodes(), 0);
  for (const auto& node : tree.nodes) {
    if (node.parent < 0) continue;
    deal_key_[node.id] =
        tree[node.parent].kind == NodeKind::kChance ? node.id : deal_key_[node.parent];
  }
}

double DealAlgebra::conditional(int key, int h, int o) const {
  const Hand& a = tree_.hands[h];
  const Hand& b = tree_.hands[o];
  double p = 1.0;
  for (int x = key; x != 0; x = tree_[x].parent) {
    const PublicNode& parent = tree_[tree_[x].parent];
    if (parent.kind != NodeKind::kChance) continue;
    double mass = 0.0;
    for (int c = 0; c < parent.num_children(); ++c) {
      const int dealt = tree_[parent.children[c]].dealt_card;
      if (!a.contains(dealt) && !b.contains(dealt)) mass += parent.chance_weights[c];
    }
    p *= parent.chance_weights[tree_[x].parent_action] / mass;
  }
  return p;
}

std::shared_ptr<const DealAlgebra::Matrix> DealAlgebra::matrix(int key, int ranking,
                                                               bool signed_payoff) {
  const std::pair<int, int> id{key, signed_payoff ? ranking : -1};
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const int n = tree_.num_hands();
  const auto& board = tree_[key].board;
  auto m = std::make_shared<Matrix>();
  m->data.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int h = 0; h < n; ++h) {
    const Hand& a = tree_.hands[h];
    if (a.overlaps(board)) continue;
    for (int o = 0; o < n; ++o) {
      const Hand& b = tree_.hands[o];
      if (a.overlaps(b) || b.overlaps(board)) continue;
      double x = conditional(key, h, o);
      if (signed_payoff) {
        const auto& rank = tree_.rankings[ranking];
        x *= rank[h] > rank[o] ? 1.0 : (rank[h] < rank[o] ? -1.0 : 0.0);
      }
      m->data[static_cast<std::size_t>(h) * n + o] = x;
    }
  }
  const std::size_t bytes = m->data.size() * sizeof(double);
  if (used_ + bytes <= budget_) {
    used_ += bytes;
    cache_.emplace(id, m);
  }
  return m;
}

void DealAlgebra::apply(int key, int ranking, bool signed_payoff,
                        const std::vector<const double*>& opp, const std::vector<double*>& out) {
  if (opp.empty()) return;
  const int n = tree_.num_hands();
  const int m = static_cast<int>(opp.size());
  const auto mat = matrix(key, ranking, signed_payoff);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> M(mat->data.data(), n, n);
  Eigen::MatrixXd R(n, m);
  for (int j = 0; j < m; ++j) {
    for (int o = 0; o < n; ++o) R(o, j) = opp[j][o];
  }
  const Eigen::MatrixXd V = M * R;
  for (int j = 0; j < m; ++j) {
    for (int h = 0; h < n; ++h) out[j][h] = V(h, j);
  }
}

void DealAlgebra::counterfactual(int node, std::span<const double> opp, std::span<double> out) {
  apply(deal_key_[node], -1, false, {opp.data()}, {out.data()});
}

std::int64_t DealAlgebra::count_histories() const {
  std::int64_t total = 0;
  const int n = tree_.num_hands();
  for (const auto& node : tree_.nodes) {
    if (!node.is_terminal() && node.kind != NodeKind::kLeaf) continue;
    for (int h = 0; h < n; ++h) {
      const Hand& a = tree_.hands[h];
      if (a.overlaps(node.board)) continue;
      for (int o = 0; o < n; ++o) {
        const Hand& b = tree_.hands[o];
        if (!a.overlaps(b) && !b.overlaps(node.board)) ++total;
      }
    }
  }
  return total;
}

// ---------------------------------------------------------- shared pieces

std::vector<double> reference_reach(const GameTree& tree, const Profile& profile, int player) {
  const int n = tree.num_hands();
  std::vector<double> reach(static_cast<std::size_t>(tree.num_nodes()) * n, 0.0);
  std::function<void(int)> down = [&](int id) {
    const PublicNode& node = tree[id];
    const bool own = node.kind == NodeKind::kDecision && node.actor == player;
    for (int a = 0; a < node.num_children(); ++a) {
      const int c = node.children[a];
      for (int h = 0; h < n; ++h) {
        double x = reach[cell(id, n, h)];
        if (own) x *= profile.row(id, h, node.num_children())[a];
        reach[cell(c, n, h)] = tree.hand_valid(c, h) ? x : 0.0;
      }
      down(c);
    }
  };
  for (int h = 0; h < n; ++h) reach[cell(0, n, h)] = tree.hand_valid(0, h) ? 1.0 : 0.0;
  down(0);
  return reach;
}

std::vector<double> reference_opp_reach(const GameTree& tree, const Profile& profile,
                                        int traverser) {
  const int n = tree.num_hands();
  const auto opp = reference_reach(tree, profile, 1 - traverser);
  std::vector<double> out(opp.size(), 0.0);
  DealAlgebra algebra(tree);
  for (const auto& node : tree.nodes) {
    algebra.counterfactual(node.id,
                           std::span<const double>(opp.data() + cell(node.id, n, 0), n),
                           std::span<double>(out.data() + cell(node.id, n, 0), n));
  }
  return out;
}

namespace {

std::vector<double> chance_products(const GameTree& tree);

// Leaf estimates for `hero` at every leaf, one evaluator call.
std::vector<std::vector<double>> leaf_estimates(const GameTree& tree, Evaluator* evaluator,
                                                const std::vector<double>& reach0,
                                                const std::vector<double>& reach1, int hero) {
  const int n = tree.num_hands();
  std::vector<int> leaves;
  for (const auto& node : tree.nodes) {
    if (node.kind == NodeKind::kLeaf) leaves.push_back(node.id);
  }
  std::vector<std::vector<double>> est(tree.num_nodes());
  if (leaves.empty()) return est;
  if (!evaluator) throw std::invalid_argument("tree has depth-limited leaves but no evaluator");
  LeafBatch batch;
  batch.rows = static_cast<int>(leaves.size());
  batch.dim = leaf_input_dim(tree.deck_size, n);
  batch.inputs.assign(static_cast<std::size_t>(batch.rows) * batch.dim, 0.0);
  batch.leaf_node_ids = leaves;
  for (int r = 0; r < batch.rows; ++r) {
    const int id = leaves[r];
    encode_leaf_input(tree, tree[id], std::span<const double>(reach0.data() + cell(id, n, 0), n),
                      std::span<const double>(reach1.data() + cell(id, n, 0), n), batch.row(r));
  }
  const LeafValues v = evaluator->evaluate(batch);
  for (int r = 0; r < batch.rows; ++r) {
    auto row = v.row(r);
    est[leaves[r]].assign(row.begin() + hero * n, row.begin() + (hero + 1) * n);
  }
  return est;
}

// Terminal and leaf values for `hero` from explicit pairwise sums; other
// nodes are left untouched.
void history_terminal_values(const GameTree& tree, DealAlgebra& algebra,
                             const std::vector<double>& opp_reach_own,
                             const std::vector<std::vector<double>>& leaf_est, int hero,
                             std::vector<double>& values) {
  const int n = tree.num_hands();
  struct Group {
    std::vector<int> nodes;
  };
  // (deal key, ranking or -1 for unsigned)
  std::map<std::pair<int, int>, Group> groups;
  for (const auto& node : tree.nodes) {
    if (node.kind == NodeKind::kShowdown) {
      groups[{algebra.deal_key(node.id), node.ranking}].nodes.push_back(node.id);
    } else if (node.kind == NodeKind::kFold || node.kind == NodeKind::kLeaf) {
      groups[{algebra.deal_key(node.id), -1}].nodes.push_back(node.id);
    }
  }
  std::vector<double> tmp;
  for (auto& [id, group] : groups) {
    const int m = static_cast<int>(group.nodes.size());
    tmp.assign(static_cast<std::size_t>(m) * n, 0.0);
    std::vector<const double*> in;
    std::vector<double*> out;
    for (int j = 0; j < m; ++j) {
      in.push_back(opp_reach_own.data() + cell(group.nodes[j], n, 0));
      out.push_back(tmp.data() + static_cast<std::size_t>(j) * n);
    }
    algebra.apply(id.first, id.second, id.second >= 0, in, out);
    for (int j = 0; j < m; ++j) {
      const PublicNode& node = tree[group.nodes[j]];
      double* v = values.data() + cell(node.id, n, 0);
      const double* x = out[j];
      for (int h = 0; h < n; ++h) {
        switch (node.kind) {
          case NodeKind::kShowdown:
            v[h] = node.pot / 2 * x[h];
            break;
          case NodeKind::kFold:
            v[h] = (node.folder == hero ? -node.fold_amount : node.fold_amount) * x[h];
            break;
          default:
            v[h] = leaf_est[node.id][h] * x[h];
            break;
        }
      }
    }
  }
}

// Terminal and leaf values for `hero` through the range engine.
void fast_terminal_values(const GameTree& tree, const std::vector<double>& opp_reach_own,
                          const std::vector<std::vector<double>>& leaf_est, int hero,
                          std::vector<double>& values) {
  const int n = tree.num_hands();
  const auto cp = chance_products(tree);
  std::vector<ShowdownOrder> orders;
  for (const auto& r : tree.rankings) orders.push_back(make_showdown_order(r));
  ShowdownScratch scratch;
  for (const auto& node : tree.nodes) {
    if (!node.is_terminal() && node.kind != NodeKind::kLeaf) continue;
    const std::span<const double> opp(opp_reach_own.data() + cell(node.id, n, 0), n);
    const std::span<double> v(values.data() + cell(node.id, n, 0), n);
    if (node.kind == NodeKind::kShowdown) {
      showdown_values(opp, tree.hands, orders[node.ranking], tree.deck_size, node.pot,
                      cp[node.id], v, scratch);
    } else {
      const Aggregates agg = aggregate(opp, tree.hands, tree.deck_size);
      const double s = node.kind == NodeKind::kLeaf ? 1.0
                       : node.folder == hero        ? -node.fold_amount
                                                    : node.fold_amount;
      for (int h = 0; h < n; ++h) {
        const double cf = counterfactual_reach(agg, tree.hands[h], h) * cp[node.id];
        v[h] = (node.kind == NodeKind::kLeaf ? leaf_est[node.id][h] : s) * cf;
      }
    }
    for (int h = 0; h < n; ++h) {
      if (!tree.hand_valid(node.id, h)) v[h] = 0.0;
    }
  }
}

std::vector<double> chance_products(const GameTree& tree) {
  std::vector<double> cp(tree.num_nodes(), 1.0);
  for (const auto& node : tree.nodes) {
    if (node.parent >= 0) {
      cp[node.id] = cp[node.parent] *
                    (tree[node.parent].kind == NodeKind::kChance ? tree.chance_factor(node.id) : 1.0);
    }
  }
  return cp;
}

// Values for `hero` at every node: sigma-weighted (best = false) or
// maximizing (best = true) at hero nodes, summed elsewhere.
std::vector<double> node_values(const GameTree& tree, const Profile& profile, int hero, bool best,
                                Evaluator* evaluator, bool history,
                                std::vector<double>* opp_reach_out = nullptr) {
  const int n = tree.num_hands();
  const auto r0 = reference_reach(tree, profile, 0);
  const auto r1 = reference_reach(tree, profile, 1);
  const auto leaf_est = leaf_estimates(tree, evaluator, r0, r1, hero);
  std::vector<double> values(r0.size(), 0.0);
  const auto& opp = hero == 0 ? r1 : r0;
  if (history) {
    DealAlgebra algebra(tree);
    history_terminal_values(tree, algebra, opp, leaf_est, hero, values);
  } else {
    fast_terminal_values(tree, opp, leaf_est, hero, values);
  }
  for (int id = tree.num_nodes() - 1; id >= 0; --id) {
    const PublicNode& node = tree[id];
    if (node.is_terminal() || node.kind == NodeKind::kLeaf) continue;
    double* v = values.data() + cell(id, n, 0);
    const int na = node.num_children();
    for (int h = 0; h < n; ++h) {
      if (node.kind == NodeKind::kDecision && node.actor == hero) {
        if (best) {
          double m = values[cell(node.children[0], n, h)];
          for (int a = 1; a < na; ++a) m = std::max(m, values[cell(node.children[a], n, h)]);
          v[h] = m;
        } else {
          auto sigma = profile.row(id, h, na);
          double acc = 0.0;
          for (int a = 0; a < na; ++a) acc += sigma[a] * values[cell(node.children[a], n, h)];
          v[h] = acc;
        }
      } else {
        double acc = 0.0;
        for (int c : node.children) acc += values[cell(c, n, h)];
        v[h] = acc;
      }
    }
  }
  if (opp_reach_out) {
    const auto cp = chance_products(tree);
    opp_reach_out->assign(r0.size(), 0.0);
    for (const auto& node : tree.nodes) {
      const std::span<const double> range(opp.data() + cell(node.id, n, 0), n);
      const Aggregates agg = aggregate(range, tree.hands, tree.deck_size);
      for (int h = 0; h < n; ++h) {
        (*opp_reach_out)[cell(node.id, n, h)] =
            tree.hand_valid(node.id, h)
                ? counterfactual_reach(agg, tree.hands[h], h) * cp[node.id]
                : 0.0;
      }
    }
  }
  return values;
}

double profile_value(const GameTree& tree, const Profile& profile, int hero, bool best,
                     Evaluator* evaluator, bool history) {
  const auto values = node_values(tree, profile, hero, best, evaluator, history);
  double total = 0.0;
  for (int h = 0; h < tree.num_hands(); ++h) total += values[h];
  return tree.root_deal_weight() * total;
}

}  // namespace

double best_response_value(const GameTree& tree, const Profile& profile, int responder,
                           Evaluator* evaluator) {
  return profile_value(tree, profile, responder, true, evaluator, false);
}

double best_response_value_history(const GameTree& tree, const Profile& profile, int responder,
                                   Evaluator* evaluator) {
  return profile_value(tree, profile, responder, true, evaluator, true);
}

ProfileValues profile_node_values(const GameTree& tree, const Profile& profile, int hero,
                                  Evaluator* evaluator) {
  ProfileValues out;
  out.values = node_values(tree, profile, hero, false, evaluator, false, &out.opp_reach);
  return out;
}

double game_value(const GameTree& tree, const Profile& profile, Evaluator* evaluator) {
  return profile_value(tree, profile, 0, false, evaluator, false);
}

BestResponseResult exploitability(const GameTree& tree, const Profile& profile,
                                  Evaluator* evaluator) {
  BestResponseResult r;
  for (int p = 0; p < kNumPlayers; ++p) {
    r.value[p] = best_response_value(tree, profile, p, evaluator);
  }
  r.exploitability = (r.value[0] + r.value[1]) / 2;
  r.pot_units = tree.starting_pot > 0 ? r.exploitability / tree.starting_pot : r.exploitability;
  r.mbb_per_game = r.exploitability / tree.big_blind * 1000.0;
  return r;
}

// ------------------------------------------------------------ serial CFR

SerialReference::SerialReference(const GameTree& tree, VariantConfig variant, ReferenceMode mode,
                                 Evaluator* evaluator, RowAbstraction rows)
    : tree_(tree), variant_(variant), mode_(mode), evaluator_(evaluator) {
  variant_.validate();
  if (mode_ == ReferenceMode::kHistory && !rows.per_round.empty()) {
    throw std::invalid_argument("history reference works in hand space only");
  }
  tables_ = make_tables(tree_, rows);
  if (mode_ == ReferenceMode::kHistory) algebra_ = std::make_unique<DealAlgebra>(tree_);
  values_.assign(static_cast<std::size_t>(tree_.num_nodes()) * tree_.num_hands(), 0.0);
}

SerialReference::~SerialReference() = default;

void SerialReference::run_pass() {
  const int traverser = pass_ % kNumPlayers;
  const int t = 1 + pass_ / kNumPlayers;
  if (mode_ == ReferenceMode::kHistory) {
    history_pass(traverser, t);
  } else {
    matched_pass(traverser, t);
  }
  ++pass_;
}

void SerialReference::run_iterations(int iterations) {
  for (int i = 0; i < iterations * kNumPlayers; ++i) run_pass();
}

void SerialReference::history_pass(int traverser, int t) {
  const int n = tree_.num_hands();
  const int other = 1 - traverser;
  const Profile sigma = current_profile(tree_, tables_);

  // Average strategy of the other player, one hand at a time.
  for (int h = 0; h < n; ++h) {
    std::function<void(int, double)> visit = [&](int id, double pi) {
      const PublicNode& node = tree_[id];
      const int na = node.num_children();
      const bool own = node.kind == NodeKind::kDecision && node.actor == other;
      if (own) {
        InfosetBlock& b = tables_.at(id);
        const std::size_t off = static_cast<std::size_t>(h) * na;
        accumulate_average(variant_, std::span<double>(b.cum_strategy.data() + off, na), pi,
                           std::span<const double>(b.strategy.data() + off, na), t);
      }
      for (int a = 0; a < na; ++a) {
        const int c = node.children[a];
        const double next = own ? pi * sigma.row(id, h, na)[a] : pi;
        visit(c, tree_.hand_valid(c, h) ? next : 0.0);
      }
    };
    visit(0, tree_.hand_valid(0, h) ? 1.0 : 0.0);
  }

  const auto r0 = reference_reach(tree_, sigma, 0);
  const auto r1 = reference_reach(tree_, sigma, 1);
  const auto leaf_est = leaf_estimates(tree_, evaluator_, r0, r1, traverser);
  std::fill(values_.begin(), values_.end(), 0.0);
  history_terminal_values(tree_, *algebra_, traverser == 0 ? r1 : r0, leaf_est, traverser,
                          values_);

  std::function<void(int)> back = [&](int id) {
    const PublicNode& node = tree_[id];
    if (node.is_terminal() || node.kind == NodeKind::kLeaf) return;
    for (int c : node.children) back(c);
    const int na = node.num_children();
    for (int h = 0; h < n; ++h) {
      double acc = 0.0;
      if (node.kind == NodeKind::kDecision && node.actor == traverser) {
        auto s = sigma.row(id, h, na);
        for (int a = 0; a < na; ++a) acc += s[a] * values_[cell(node.children[a], n, h)];
      } else {
        for (int c : node.children) acc += values_[cell(c, n, h)];
      }
      values_[cell(id, n, h)] = acc;
    }
  };
  back(0);

  std::vector<double> r;
  for (auto& b : tables_.blocks) {
    if (b.player != traverser) continue;
    const PublicNode& node = tree_[b.node_id];
    r.resize(b.actions);
    for (int h = 0; h < n; ++h) {
      for (int a = 0; a < b.actions; ++a) {
        r[a] = values_[cell(node.children[a], n, h)] - values_[cell(node.id, n, h)];
      }
      const std::size_t off = static_cast<std::size_t>(h) * b.actions;
      update_row(variant_, std::span<double>(b.cum_regret.data() + off, b.actions),
                 std::span<double>(b.pred.data() + off, b.actions), r, t,
                 std::span<double>(b.strategy.data() + off, b.actions));
    }
  }
}

void SerialReference::matched_pass(int traverser, int t) {
  const int n = tree_.num_hands();
  const int other = 1 - traverser;
  const int nodes = tree_.num_nodes();
  const std::size_t cells = static_cast<std::size_t>(nodes) * n;
  std::array<std::vector<double>, kNumPlayers> reach{std::vector<double>(cells, 0.0),
                                                     std::vector<double>(cells, 0.0)};
  std::vector<double> cp(nodes, 1.0);
  auto members_for = [&](const InfosetBlock& b) {
    std::vector<std::vector<int>> m;
    if (!b.row_of) return m;
    m.resize(b.rows);
    for (int h = 0; h < n; ++h) m[(*b.row_of)[h]].push_back(h);
    return m;
  };

  std::function<void(int)> down = [&](int id) {
    const PublicNode& node = tree_[id];
    for (int a = 0; a < node.num_children(); ++a) {
      const int c = node.children[a];
      cp[c] = cp[id] * (node.kind == NodeKind::kChance ? tree_.chance_factor(c) : 1.0);
      for (int p = 0; p < kNumPlayers; ++p) {
        const bool own = node.kind == NodeKind::kDecision && node.actor == p;
        const InfosetBlock* b = own ? &tables_.at(id) : nullptr;
        for (int h = 0; h < n; ++h) {
          const double x = reach[p][cell(id, n, h)];
          reach[p][cell(c, n, h)] =
              tree_.hand_valid(c, h)
                  ? (own ? x * b->strategy[static_cast<std::size_t>(b->row(h)) * b->actions + a] : x)
                  : 0.0;
        }
      }
      down(c);
    }
  };
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int h = 0; h < n; ++h) reach[p][cell(0, n, h)] = tree_.hand_valid(0, h) ? 1.0 : 0.0;
  }
  down(0);

  for (auto& b : tables_.blocks) {
    if (b.player != other) continue;
    const auto members = members_for(b);
    const std::size_t A = b.actions;
    for (int r = 0; r < b.rows; ++r) {
      double w;
      if (b.row_of) {
        w = 0.0;
        for (int h : members[r]) w += reach[other][cell(b.node_id, n, h)];
      } else {
        w = reach[other][cell(b.node_id, n, r)];
      }
      accumulate_average(variant_, std::span<double>(b.cum_strategy.data() + r * A, A), w,
                         std::span<const double>(b.strategy.data() + r * A, A), t);
    }
  }

  const auto& opp = reach[other];
  std::vector<double> opp_cf(cells, 0.0);
  std::vector<int> leaves;
  std::vector<double> p_card(tree_.deck_size);
  for (const auto& node : tree_.nodes) {
    if (node.kind != NodeKind::kFold && node.kind != NodeKind::kLeaf) continue;
    if (node.kind == NodeKind::kLeaf) leaves.push_back(node.id);
    const std::span<const double> p_hand(opp.data() + cell(node.id, n, 0), n);
    double p_sum = 0.0;
    aggregate_into(p_hand, tree_.hands, p_sum, p_card);
    for (int h = 0; h < n; ++h) {
      opp_cf[cell(node.id, n, h)] =
          tree_.hand_valid(node.id, h)
              ? counterfactual_reach(p_sum, p_card, p_hand, tree_.hands[h], h) * cp[node.id]
              : 0.0;
    }
  }
  LeafValues est;
  std::vector<int> leaf_row(nodes, -1);
  if (!leaves.empty()) {
    if (!evaluator_) throw std::invalid_argument("tree has depth-limited leaves but no evaluator");
    LeafBatch batch;
    batch.rows = static_cast<int>(leaves.size());
    batch.dim = leaf_input_dim(tree_.deck_size, n);
    batch.inputs.assign(static_cast<std::size_t>(batch.rows) * batch.dim, 0.0);
    batch.leaf_node_ids = leaves;
    for (int r = 0; r < batch.rows; ++r) {
      const int id = leaves[r];
      leaf_row[id] = r;
      encode_leaf_input(tree_, tree_[id],
                        std::span<const double>(reach[0].data() + cell(id, n, 0), n),
                        std::span<const double>(reach[1].data() + cell(id, n, 0), n),
                        batch.row(r));
    }
    est = evaluator_->evaluate(batch);
  }

  std::vector<ShowdownOrder> orders;
  for (const auto& rk : tree_.rankings) orders.push_back(make_showdown_order(rk));
  ShowdownScratch scratch;
  std::fill(values_.begin(), values_.end(), 0.0);
  std::function<void(int)> back = [&](int id) {
    const PublicNode& node = tree_[id];
    double* v = values_.data() + cell(id, n, 0);
    switch (node.kind) {
      case NodeKind::kFold: {
        const double s = node.folder == traverser ? -node.fold_amount : node.fold_amount;
        for (int h = 0; h < n; ++h) v[h] = s * opp_cf[cell(id, n, h)];
        return;
      }
      case NodeKind::kShowdown:
        showdown_values(std::span<const double>(opp.data() + cell(id, n, 0), n), tree_.hands,
                        orders[node.ranking], tree_.deck_size, node.pot, cp[id],
                        std::span<double>(v, n), scratch);
        for (int h = 0; h < n; ++h) {
          if (!tree_.hand_valid(id, h)) v[h] = 0.0;
        }
        return;
      case NodeKind::kLeaf: {
        auto row = est.row(leaf_row[id]);
        for (int h = 0; h < n; ++h) v[h] = row[traverser * n + h] * opp_cf[cell(id, n, h)];
        return;
      }
      default:
        break;
    }
    for (int c : node.children) back(c);
    if (node.kind == NodeKind::kDecision && node.actor == traverser) {
      const InfosetBlock& b = tables_.at(id);
      for (int h = 0; h < n; ++h) {
        const double* s = b.strategy.data() + static_cast<std::size_t>(b.row(h)) * b.actions;
        double acc = 0.0;
        for (int a = 0; a < b.actions; ++a) acc += s[a] * values_[cell(node.children[a], n, h)];
        v[h] = acc;
      }
    } else {
      for (int h = 0; h < n; ++h) {
        double acc = 0.0;
        for (int c : node.children) acc += values_[cell(c, n, h)];
        v[h] = acc;
      }
    }
  };
  back(0);

  std::vector<double> r;
  for (auto& b : tables_.blocks) {
    if (b.player != traverser) continue;
    const PublicNode& node = tree_[b.node_id];
    const auto members = members_for(b);
    const std::size_t A = b.actions;
    r.resize(A);
    for (int row = 0; row < b.rows; ++row) {
      for (std::size_t a = 0; a < A; ++a) {
        const int c = node.children[a];
        if (b.row_of) {
          double s = 0.0;
          for (int h : members[row]) s += values_[cell(c, n, h)] - values_[cell(node.id, n, h)];
          r[a] = s;
        } else {
          r[a] = values_[cell(c, n, row)] - values_[cell(node.id, n, row)];
        }
      }
      const std::size_t off = row * A;
      update_row(variant_, std::span<double>(b.cum_regret.data() + off, A),
                 std::span<double>(b.pred.data() + off, A), r, t,
                 std::span<double>(b.strategy.data() + off, A));
    }
  }
}

// ------------------------------------------------------------- small LP

EquilibriumResult lp_equilibrium_small(const GameTree& tree, double target, int max_iterations) {
  DealAlgebra probe(tree, 0);
  const std::int64_t histories = probe.count_histories();
  if (histories > kMaxSmallGameHistories) {
    throw std::invalid_argument("tree too large for the small-game oracle: " +
                                std::to_string(histories) + " histories");
  }
  for (const auto& node : tree.nodes) {
    if (node.kind == NodeKind::kLeaf) {
      throw std::invalid_argument("small-game oracle needs a tree solved to showdown");
    }
  }
  VariantConfig cfg;
  cfg.kind = VariantKind::kCfrPlus;
  SerialReference solver(tree, cfg, ReferenceMode::kHistory);
  EquilibriumResult result;
  int next_check = 10;
  for (int it = 1; it <= max_iterations; ++it) {
    solver.run_iterations(1);
    if (it == next_check || it == max_iterations) {
      result.strategy = extract_average_strategy(tree, solver.tables());
      result.exploitability = exploitability(tree, result.strategy).exploitability;
      result.iterations = it;
      if (result.exploitability <= target) break;
      next_check = std::min(max_iterations, next_check + std::max(10, next_check / 4));
    }
  }
  result.value = game_value(tree, result.strategy);
  return result;
}

}  // namespace pcfr
