#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "amoo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"aligned multi-objective optimization harness"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "config file path")->required();

  std::string target;
  std::string out_dir;
  CLI::App* repro =
      app.add_subcommand("reproduce", "run a canonical desk-scale reproduction");
  repro->add_option("name", target,
                    "lower-bound | bounds | p1 | p2 | p3 | throughput")
      ->required();
  repro->add_option("--out", out_dir, "output directory");

  CLI::App* list = app.add_subcommand("list-problems", "describe problem families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return amoo::run_experiment(config_path, std::cout);
    if (repro->parsed()) return amoo::reproduce(target, out_dir, std::cout);
    if (list->parsed()) return amoo::list_problems(std::cout);
  } catch (const amoo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
