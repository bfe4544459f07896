#include "pcfr/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "pcfr/abstraction.hpp"
#include "pcfr/solver.hpp"

namespace pcfr {

// ------------------------------------------------------------ comparisons

void Deviation::merge(const Deviation& other) {
  unequal += other.unequal;
  absolute = std::max(absolute, other.absolute);
  if (other.relative > relative || (table.empty() && !other.table.empty())) {
    const auto keep = unequal;
    const auto keep_abs = absolute;
    *this = other;
    unequal = keep;
    absolute = keep_abs;
  }
}

Deviation compare_tables(const StrategyTables& pipeline, const StrategyTables& reference) {
  if (pipeline.blocks.size() != reference.blocks.size()) {
    throw std::invalid_argument("table sets differ in shape");
  }
  Deviation total;
  for (std::size_t i = 0; i < pipeline.blocks.size(); ++i) {
    const InfosetBlock& a = pipeline.blocks[i];
    const InfosetBlock& b = reference.blocks[i];
    for (int which = 0; which < 2; ++which) {
      const auto& x = which == 0 ? a.cum_regret : a.cum_strategy;
      const auto& y = which == 0 ? b.cum_regret : b.cum_strategy;
      if (x.size() != y.size()) throw std::invalid_argument("table sets differ in shape");
      Deviation d;
      d.table = which == 0 ? "cum_regret" : "cum_strategy";
      d.node = a.node_id;
      d.player = a.player;
      double scale = 0.0;
      std::size_t worst = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        scale = std::max(scale, std::abs(y[k]));
        const double diff = std::abs(x[k] - y[k]);
        if (std::memcmp(&x[k], &y[k], sizeof(double)) != 0) ++d.unequal;
        if (diff > d.absolute) {
          d.absolute = diff;
          worst = k;
        }
      }
      d.relative = scale > 0.0 ? d.absolute / scale : d.absolute;
      if (!x.empty()) {
        d.row = static_cast<int>(worst) / a.actions;
        d.action = static_cast<int>(worst) % a.actions;
        d.value = x[worst];
        d.reference = y[worst];
      }
      total.merge(d);
    }
  }
  return total;
}

VerifyReport run_verify(const GameTree& tree, const PipelineOptions& options, Evaluator* evaluator,
                        int iterations, bool history, bool free_run) {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  const bool abstracted = !options.rows.per_round.empty();
  history = history && !abstracted;
  free_run = free_run && history;

  VerifyReport report;
  report.history_ran = history;
  report.free_run_ran = free_run;
  Pipeline pipe(tree, options, evaluator);
  SerialReference matched(tree, options.variant, ReferenceMode::kMatchedOrder, evaluator,
                          options.rows);
  std::unique_ptr<SerialReference> synced;
  std::unique_ptr<SerialReference> loose;
  if (history) {
    synced = std::make_unique<SerialReference>(tree, options.variant, ReferenceMode::kHistory,
                                               evaluator);
  }
  if (free_run) {
    loose = std::make_unique<SerialReference>(tree, options.variant, ReferenceMode::kHistory,
                                              evaluator);
  }
  for (int pass = 0; pass < 2 * iterations; ++pass) {
    if (synced) synced->tables() = pipe.state().tables;
    pipe.run_iteration();
    matched.run_pass();
    if (synced) {
      synced->run_pass();
      report.synced.merge(compare_tables(pipe.state().tables, synced->tables()));
    }
    if (loose) loose->run_pass();
  }
  report.passes = 2 * iterations;
  report.matched = compare_tables(pipe.state().tables, matched.tables());
  if (loose) report.free_run = compare_tables(pipe.state().tables, loose->tables());
  return report;
}

// ------------------------------------------------------------ benchmarks

std::vector<StageTimings> run_bench(const GameTree& tree, const PipelineOptions& options,
                                    Evaluator* evaluator, int warmup, int measured) {
  Pipeline pipe(tree, options, evaluator);
  for (int i = 0; i < warmup; ++i) pipe.run_iteration();
  std::vector<StageTimings> out;
  out.reserve(measured);
  for (int i = 0; i < measured; ++i) out.push_back(pipe.run_iteration());
  return out;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double denom = xs.size() > 1 ? static_cast<double>(xs.size() - 1) : 1.0;
  return {mean, std::sqrt(var / denom)};
}

}  // namespace

std::uint64_t state_digest(const StrategyTables& tables) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& b : tables.blocks) {
    feed(b.strategy);
    feed(b.cum_regret);
    feed(b.cum_strategy);
    feed(b.pred);
  }
  return h;
}

std::vector<ScalingRow> run_scaling(const GameTree& tree, const PipelineOptions& options,
                                    Evaluator* evaluator, std::vector<int> k_list, int warmup,
                                    int measured) {
  std::erase(k_list, 1);
  k_list.insert(k_list.begin(), 1);
  std::vector<ScalingRow> rows;
  for (int k : k_list) {
    PipelineOptions o = options;
    o.workers = k;
    Pipeline pipe(tree, o, evaluator);
    for (int i = 0; i < warmup; ++i) pipe.run_iteration();
    std::vector<double> ms;
    for (int i = 0; i < measured; ++i) ms.push_back(pipe.run_iteration().total_ms);
    ScalingRow r;
    r.k = k;
    std::tie(r.mean_ms, r.std_ms) = mean_std(ms);
    r.speedup = rows.empty() ? 1.0 : rows.front().mean_ms / r.mean_ms;
    r.state_digest = state_digest(pipe.state().tables);
    rows.push_back(r);
  }
  return rows;
}

PruneMask load_prune_mask(const RunConfig& config, const GameTree& tree, Evaluator* evaluator) {
  if (!config.prune_mask.empty() && config.bounds != "none") {
    throw std::invalid_argument("pruning.mask and pruning.bounds are mutually exclusive");
  }
  if (!config.prune_mask.empty()) return read_prune_mask(config.prune_mask, tree);
  if (config.bounds == "exact") {
    const EquilibriumResult eq = lp_equilibrium_small(tree);
    return interval_dominance_pruner(
        tree, exact_action_bounds(tree, eq.strategy, config.bounds_slack, evaluator));
  }
  return PruneMask::none(tree);
}

// ------------------------------------------------------------ commands

namespace {

std::string output_path(const RunConfig& c, const std::string& file) {
  std::filesystem::path dir(c.output_dir);
  std::filesystem::create_directories(dir);
  return (dir / file).string();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string describe(const Deviation& d) {
  std::string s = fmt("%.6e", d.relative) + " (abs " + fmt("%.3e", d.absolute) +
                  ", unequal entries " + std::to_string(d.unequal) + ")";
  if (d.relative > 0.0 || d.unequal > 0) {
    s += " worst " + d.table + " node " + std::to_string(d.node) + " player " +
         std::to_string(d.player) + " row " + std::to_string(d.row) + " action " +
         std::to_string(d.action) + " pipeline " + fmt("%.17g", d.value) + " reference " +
         fmt("%.17g", d.reference);
  }
  return s;
}

struct Setup {
  GameTree tree;
  std::unique_ptr<Evaluator> evaluator;
  PipelineOptions pipeline;
};

Setup setup(const RunConfig& c) {
  Setup s{c.build_tree(), nullptr, {}};
  s.evaluator = load_evaluator(c, s.tree);
  s.pipeline = solve_options(c).pipeline;
  s.pipeline.rows = load_row_abstraction(c, s.tree);
  return s;
}

}  // namespace

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Setup s = setup(c);
    SolveOptions opts = solve_options(c);
    opts.pipeline = s.pipeline;
    const PruneMask mask = load_prune_mask(c, s.tree, s.evaluator.get());
    const SolveResult result = run_solve(s.tree, opts, s.evaluator.get(), &mask);

    std::ofstream conv(output_path(c, c.convergence_file));
    conv << "# schema=pcfr-convergence/1\n";
    conv << "iteration,wall_ms,exploitability_pot,exploitability_mbb\n";
    for (const auto& p : result.log) {
      conv << p.iteration << ',' << fmt("%.3f", c.mask_timings ? 0.0 : p.wall_ms) << ','
           << fmt("%.12e", p.exploitability_pot) << ',' << fmt("%.12e", p.exploitability_mbb)
           << '\n';
    }
    std::ofstream strat(output_path(c, c.strategy_file));
    strat << "# schema=pcfr-strategy/1\n";
    strat << "# node player hand probabilities...\n";
    strat << format_profile(s.tree, result.average);

    const auto& br = result.final_exploitability;
    out << "game " << s.tree.name << " variant " << to_string(c.variant.kind) << " iterations "
        << c.iterations << " workers " << c.workers << '\n';
    out << "rho " << fmt("%.6f", result.rho) << " pruned_actions " << mask.removed_count() << '\n';
    out << "exploitability_chips " << fmt("%.9e", br.exploitability) << " pot "
        << fmt("%.9e", br.pot_units) << " mbb " << fmt("%.6f", br.mbb_per_game) << '\n';
    out << "game_value " << fmt("%.9f", game_value(s.tree, result.average, s.evaluator.get()))
        << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << '\n';
    return 2;
  }
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Setup s = setup(c);
    s.pipeline.fault = c.perturb;
    const VerifyReport r =
        run_verify(s.tree, s.pipeline, s.evaluator.get(), c.verify_iterations, true, c.free_run);
    bool ok = r.matched.relative <= c.tolerance;
    if (c.bitwise) ok = ok && r.matched.unequal == 0;
    out << "game " << s.tree.name << " variant " << to_string(c.variant.kind) << " workers "
        << c.workers << " fork " << to_string(c.fork) << " passes " << r.passes << '\n';
    out << "matched_order " << describe(r.matched) << '\n';
    if (r.history_ran) {
      ok = ok && r.synced.relative <= c.tolerance;
      out << "history_synced " << describe(r.synced) << '\n';
    } else {
      out << "history_synced skipped (strategy abstraction)\n";
    }
    if (r.free_run_ran) out << "history_free_run " << describe(r.free_run) << " (informational)\n";
    out << "tolerance " << fmt("%.1e", c.tolerance) << (c.bitwise ? " bitwise" : "") << '\n';
    out << (ok ? "PASS" : "FAIL") << '\n';
    if (!ok) err << "verify: deviation above tolerance\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << '\n';
    return 2;
  }
}

int cmd_bench(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Setup s = setup(c);
    const auto runs = run_bench(s.tree, s.pipeline, s.evaluator.get(), c.warmup, c.measured);
    const auto ms = [&](double x) { return fmt("%.4f", c.mask_timings ? 0.0 : x); };
    std::ofstream csv(output_path(c, c.timings_file));
    csv << "# schema=pcfr-timings/1\n";
    csv << "street,row,stage1_ms,stage2_ms,stage3_ms,stage4_ms,stage5_ms,stage6_ms,stage7_ms,"
           "total_ms,stage_sum_ms\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      csv << c.street_label << ',' << i;
      for (double x : runs[i].stage_ms) csv << ',' << ms(x);
      csv << ',' << ms(runs[i].total_ms) << ',' << ms(runs[i].stage_sum()) << '\n';
    }
    std::array<std::pair<double, double>, kNumStages + 2> stats;
    for (int k = 0; k < kNumStages + 2; ++k) {
      std::vector<double> xs;
      for (const auto& r : runs) {
        xs.push_back(k < kNumStages ? r.stage_ms[k]
                                    : (k == kNumStages ? r.total_ms : r.stage_sum()));
      }
      stats[k] = mean_std(xs);
    }
    csv << c.street_label << ",mean";
    for (const auto& st : stats) csv << ',' << ms(st.first);
    csv << '\n' << c.street_label << ",std";
    for (const auto& st : stats) csv << ',' << ms(st.second);
    csv << '\n' << c.street_label << ",iteration_mean";
    for (const auto& st : stats) csv << ',' << ms(2.0 * st.first);
    csv << '\n';

    out << "street " << c.street_label << " passes " << runs.size() << " warmup " << c.warmup
        << '\n';
    for (int k = 0; k < kNumStages; ++k) {
      out << "S" << (k + 1) << ' ' << fmt("%.4f", stats[k].first) << " +- "
          << fmt("%.4f", stats[k].second) << " ms\n";
    }
    out << "total " << fmt("%.4f", stats[kNumStages].first) << " +- "
        << fmt("%.4f", stats[kNumStages].second) << " ms, stage sum "
        << fmt("%.4f", stats[kNumStages + 1].first) << " ms\n";
    return 0;
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << '\n';
    return 2;
  }
}

int cmd_scaling(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Setup s = setup(c);
    const auto rows =
        run_scaling(s.tree, s.pipeline, s.evaluator.get(), c.k_list, c.warmup, c.measured);
    std::ofstream csv(output_path(c, c.scaling_file));
    csv << "# schema=pcfr-scaling/1\n";
    csv << "k,mean_ms,std_ms,speedup,state_digest\n";
    char digest[24];
    for (const auto& r : rows) {
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(r.state_digest));
      csv << r.k << ',' << fmt("%.4f", c.mask_timings ? 0.0 : r.mean_ms) << ','
          << fmt("%.4f", c.mask_timings ? 0.0 : r.std_ms) << ','
          << fmt("%.4f", c.mask_timings ? 1.0 : r.speedup) << ',' << digest << '\n';
      out << "K=" << r.k << ' ' << fmt("%.4f", r.mean_ms) << " +- " << fmt("%.4f", r.std_ms)
          << " ms speedup " << fmt("%.3f", r.speedup) << " digest " << digest << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "scaling: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pcfr
