#include "pcfr/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace pcfr {

const char* to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kKuhn: return "kuhn";
    case GameKind::kLeduc: return "leduc";
    case GameKind::kSubgame: return "subgame";
    case GameKind::kPreflopToy: return "preflop_toy";
  }
  return "?";
}

GameTree RunConfig::build_tree() const {
  switch (game) {
    case GameKind::kKuhn: return build_kuhn();
    case GameKind::kLeduc: return build_leduc();
    case GameKind::kSubgame: return build_hunl_subgame(subgame);
    case GameKind::kPreflopToy: return build_preflop_toy(subgame);
  }
  throw std::logic_error("unknown game kind");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer");
  return x;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw std::invalid_argument("not a boolean");
}

int positive(long long x, const char* what) {
  if (x < 1) throw std::invalid_argument(std::string(what) + " must be >= 1");
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"game.type",
       [](RunConfig& c, const std::string& v) {
         if (v == "kuhn") c.game = GameKind::kKuhn;
         else if (v == "leduc") c.game = GameKind::kLeduc;
         else if (v == "subgame" || v == "hunl") c.game = GameKind::kSubgame;
         else if (v == "preflop_toy") c.game = GameKind::kPreflopToy;
         else throw std::invalid_argument("expected kuhn, leduc, subgame or preflop_toy");
       }},
      {"game.street", [](RunConfig& c, const std::string& v) { c.subgame.street = parse_street(v); }},
      {"game.board", [](RunConfig& c, const std::string& v) { c.subgame.board = parse_cards(v); }},
      {"game.spr", [](RunConfig& c, const std::string& v) { c.subgame.spr = to_double(v); }},
      {"game.n_raise",
       [](RunConfig& c, const std::string& v) { c.subgame.n_raise = static_cast<int>(to_int(v)); }},
      {"game.raise_sizes",
       [](RunConfig& c, const std::string& v) {
         c.subgame.raise_sizes.clear();
         for (const auto& s : split_list(v)) c.subgame.raise_sizes.push_back(to_double(s));
       }},
      {"game.starting_pot",
       [](RunConfig& c, const std::string& v) { c.subgame.starting_pot = to_double(v); }},
      {"game.depth_limited",
       [](RunConfig& c, const std::string& v) { c.subgame.depth_limited = to_bool(v); }},
      {"game.big_blind",
       [](RunConfig& c, const std::string& v) { c.subgame.big_blind = to_double(v); }},
      {"game.max_raises",
       [](RunConfig& c, const std::string& v) {
         c.subgame.max_raises = static_cast<int>(to_int(v));
       }},

      {"solver.variant",
       [](RunConfig& c, const std::string& v) { c.variant.kind = parse_variant(v); }},
      {"solver.iterations",
       [](RunConfig& c, const std::string& v) { c.iterations = positive(to_int(v), "iterations"); }},
      {"solver.workers",
       [](RunConfig& c, const std::string& v) { c.workers = positive(to_int(v), "workers"); }},
      {"solver.seed",
       [](RunConfig& c, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(to_int(v));
       }},
      {"solver.convergence_every",
       [](RunConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 0) throw std::invalid_argument("must be >= 0");
         c.convergence_every = static_cast<int>(x);
       }},
      {"solver.hand_block",
       [](RunConfig& c, const std::string& v) { c.hand_block = positive(to_int(v), "hand_block"); }},
      {"solver.fork", [](RunConfig& c, const std::string& v) { c.fork = parse_fork_mode(v); }},
      {"solver.random_init",
       [](RunConfig& c, const std::string& v) { c.random_init = to_bool(v); }},
      {"solver.dcfr_alpha",
       [](RunConfig& c, const std::string& v) { c.variant.dcfr_alpha = to_double(v); }},
      {"solver.dcfr_beta",
       [](RunConfig& c, const std::string& v) { c.variant.dcfr_beta = to_double(v); }},
      {"solver.dcfr_gamma",
       [](RunConfig& c, const std::string& v) { c.variant.dcfr_gamma = to_double(v); }},

      {"evaluator.kind", [](RunConfig& c, const std::string& v) { c.evaluator.kind = v; }},
      {"evaluator.seed",
       [](RunConfig& c, const std::string& v) {
         c.evaluator.seed = static_cast<std::uint64_t>(to_int(v));
       }},
      {"evaluator.hidden",
       [](RunConfig& c, const std::string& v) {
         c.evaluator.hidden = positive(to_int(v), "hidden");
       }},
      {"evaluator.path", [](RunConfig& c, const std::string& v) { c.evaluator.path = v; }},

      {"abstraction.round0", [](RunConfig& c, const std::string& v) { c.strategy_buckets[0] = v; }},
      {"abstraction.round1", [](RunConfig& c, const std::string& v) { c.strategy_buckets[1] = v; }},
      {"abstraction.round2", [](RunConfig& c, const std::string& v) { c.strategy_buckets[2] = v; }},
      {"abstraction.round3", [](RunConfig& c, const std::string& v) { c.strategy_buckets[3] = v; }},
      {"abstraction.leaf", [](RunConfig& c, const std::string& v) { c.leaf_buckets = v; }},

      {"pruning.mask", [](RunConfig& c, const std::string& v) { c.prune_mask = v; }},
      {"pruning.bounds",
       [](RunConfig& c, const std::string& v) {
         if (v != "none" && v != "exact") throw std::invalid_argument("expected none or exact");
         c.bounds = v;
       }},
      {"pruning.slack",
       [](RunConfig& c, const std::string& v) {
         c.bounds_slack = to_double(v);
         if (c.bounds_slack < 0.0) throw std::invalid_argument("must be >= 0");
       }},

      {"bench.warmup",
       [](RunConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 0) throw std::invalid_argument("must be >= 0");
         c.warmup = static_cast<int>(x);
       }},
      {"bench.measured",
       [](RunConfig& c, const std::string& v) { c.measured = positive(to_int(v), "measured"); }},
      {"bench.k_list",
       [](RunConfig& c, const std::string& v) {
         c.k_list.clear();
         for (const auto& s : split_list(v)) c.k_list.push_back(positive(to_int(s), "k"));
         if (c.k_list.empty()) throw std::invalid_argument("empty list");
       }},
      {"bench.street_label", [](RunConfig& c, const std::string& v) { c.street_label = v; }},

      {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.strategy", [](RunConfig& c, const std::string& v) { c.strategy_file = v; }},
      {"output.convergence", [](RunConfig& c, const std::string& v) { c.convergence_file = v; }},
      {"output.timings", [](RunConfig& c, const std::string& v) { c.timings_file = v; }},
      {"output.scaling", [](RunConfig& c, const std::string& v) { c.scaling_file = v; }},
      {"output.mask_timings",
       [](RunConfig& c, const std::string& v) { c.mask_timings = to_bool(v); }},

      {"verify.iterations",
       [](RunConfig& c, const std::string& v) {
         c.verify_iterations = positive(to_int(v), "iterations");
       }},
      {"verify.tolerance",
       [](RunConfig& c, const std::string& v) {
         c.tolerance = to_double(v);
         if (!(c.tolerance >= 0.0)) throw std::invalid_argument("must be >= 0");
       }},
      {"verify.free_run", [](RunConfig& c, const std::string& v) { c.free_run = to_bool(v); }},
      {"verify.bitwise", [](RunConfig& c, const std::string& v) { c.bitwise = to_bool(v); }},
      {"verify.perturb_pass",
       [](RunConfig& c, const std::string& v) { c.perturb.pass = static_cast<int>(to_int(v)); }},
      {"verify.perturb_node",
       [](RunConfig& c, const std::string& v) { c.perturb.node = static_cast<int>(to_int(v)); }},
      {"verify.perturb_row",
       [](RunConfig& c, const std::string& v) { c.perturb.row = static_cast<int>(to_int(v)); }},
      {"verify.perturb_action",
       [](RunConfig& c, const std::string& v) {
         c.perturb.action = static_cast<int>(to_int(v));
       }},
      {"verify.perturb_delta",
       [](RunConfig& c, const std::string& v) { c.perturb.delta = to_double(v); }},
  };
  return table;
}

void apply(RunConfig& c, const std::string& key, const std::string& value,
           const std::string& where) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  try {
    it->second(c, value);
  } catch (const std::exception& e) {
    throw std::invalid_argument(where + ": bad value '" + value + "' for '" + key +
                                "': " + e.what());
  }
}

void finish(RunConfig& c) {
  if (c.game == GameKind::kSubgame) c.subgame.validate();
  c.variant.validate();
  if (c.street_label.empty()) {
    c.street_label = c.game == GameKind::kSubgame ? to_string(c.subgame.street) : to_string(c.game);
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
  RunConfig c;
  if (const char* env = std::getenv("PCFR_THREADS"); env && *env) {
    apply(c, "solver.workers", trim(env), "PCFR_THREADS");
  }
  static const std::vector<std::string> kSections = {
      "game", "solver", "evaluator", "abstraction", "pruning", "bench", "output", "verify"};
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.resize(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw std::invalid_argument(where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
    if (section.empty()) throw std::invalid_argument(where + ": key outside any section");
    apply(c, section + "." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set " + o + ": expected section.key=value");
    }
    apply(c, trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "--set " + o);
  }
  finish(c);
  return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides, path);
}

namespace {

BucketMap load_map(const std::string& spec, const GameTree& tree) {
  if (spec == "lossless_preflop") {
    if (!tree.board.empty() || tree.hand_size != 2) {
      throw std::invalid_argument("lossless_preflop needs two-card hands on an empty board");
    }
    return lossless_preflop_buckets(tree.hands);
  }
  return read_bucket_map(spec, tree.num_hands());
}

}  // namespace

RowAbstraction load_row_abstraction(const RunConfig& config, const GameTree& tree) {
  RowAbstraction rows;
  for (std::size_t r = 0; r < config.strategy_buckets.size(); ++r) {
    if (config.strategy_buckets[r].empty()) continue;
    rows.per_round.resize(r + 1);
    rows.per_round[r] = std::make_shared<const std::vector<int>>(
        load_map(config.strategy_buckets[r], tree).bucket_of);
  }
  return rows;
}

std::unique_ptr<Evaluator> load_evaluator(const RunConfig& config, const GameTree& tree) {
  bool leaves = false;
  for (const auto& node : tree.nodes) leaves = leaves || node.kind == NodeKind::kLeaf;
  if (!leaves) return nullptr;
  if (config.leaf_buckets.empty()) return make_evaluator(config.evaluator, tree);
  const BucketMap map = load_map(config.leaf_buckets, tree);
  const int d = leaf_input_dim(tree.deck_size, map.buckets);
  std::shared_ptr<Evaluator> inner;
  if (config.evaluator.kind == "synthetic_net") {
    inner = std::make_shared<SyntheticNet>(d, map.buckets, config.evaluator.hidden,
                                           config.evaluator.seed);
  } else if (config.evaluator.kind == "external") {
    auto net = ExternalNet::load(config.evaluator.path);
    if (net->input_dim() != d || net->output_dim() != 2 * map.buckets) {
      throw std::invalid_argument("external network does not fit the leaf bucket space");
    }
    inner = std::move(net);
  } else {
    throw std::invalid_argument("leaf buckets need a synthetic_net or external evaluator");
  }
  return std::make_unique<BucketedEvaluator>(inner, tree.deck_size, map.bucket_of);
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions o;
  o.pipeline.variant = config.variant;
  o.pipeline.workers = config.workers;
  o.pipeline.fork = config.fork;
  o.pipeline.hand_block = config.hand_block;
  o.iterations = config.iterations;
  o.convergence_every = config.convergence_every;
  o.random_init = config.random_init;
  o.seed = config.seed;
  return o;
}

}  // namespace pcfr
