#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcfr/commands.hpp"
#include "pcfr/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Parallel pipeline CFR solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string k_list;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override: section.key=value");
    return sub;
  };
  auto* solve = add("solve", "Solve and write strategy and convergence files");
  auto* verify = add("verify", "Compare the pipeline against the serial reference");
  auto* bench = add("bench", "Per-stage timings");
  auto* scaling = add("scaling", "Pass time against worker count");
  scaling->add_option("--k", k_list, "Comma-separated worker counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!k_list.empty()) overrides.push_back("bench.k_list=" + k_list);
    const pcfr::RunConfig config = pcfr::parse_config(config_path, overrides);
    if (solve->parsed()) return pcfr::cmd_solve(config, std::cout, std::cerr);
    if (verify->parsed()) return pcfr::cmd_verify(config, std::cout, std::cerr);
    if (bench->parsed()) return pcfr::cmd_bench(config, std::cout, std::cerr);
    if (scaling->parsed()) return pcfr::cmd_scaling(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
