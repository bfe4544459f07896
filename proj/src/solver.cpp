#include "pcfr/solver.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>

namespace pcfr {

SolveResult run_solve(const GameTree& tree, const SolveOptions& options, Evaluator* evaluator,
                      const PruneMask* mask) {
  if (options.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (options.convergence_every < 0) {
    throw std::invalid_argument("convergence_every must be nonnegative");
  }
  std::optional<PrunedTree> pruned;
  if (mask && mask->removed_count() > 0) pruned = apply_prune(tree, *mask);
  const GameTree& solved = pruned ? pruned->tree : tree;

  SolveResult result;
  result.rho = pruned ? pruned->rho : 1.0;
  Pipeline pipeline(solved, options.pipeline, evaluator);
  if (options.random_init) randomize_strategies(pipeline.state().tables, options.seed);

  auto lifted = [&] {
    Profile avg = extract_average_strategy(solved, pipeline.state().tables);
    return pruned ? lift_profile(*pruned, tree, avg) : avg;
  };
  auto record = [&](int iteration, double wall_ms) {
    const Profile avg = lifted();
    const BestResponseResult br = exploitability(tree, avg, evaluator);
    result.log.push_back({iteration, wall_ms, br.exploitability, br.pot_units, br.mbb_per_game});
    return br;
  };

  double wall_ms = 0.0;
  for (int it = 1; it <= options.iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    pipeline.run_iteration();
    pipeline.run_iteration();
    wall_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                   .count();
    const bool last = it == options.iterations;
    if (last || (options.convergence_every > 0 && it % options.convergence_every == 0)) {
      result.final_exploitability = record(it, wall_ms);
    }
  }
  result.average = lifted();
  result.tables = pipeline.state().tables;
  return result;
}

}  // namespace pcfr
