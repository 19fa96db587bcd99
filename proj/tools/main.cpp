#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparselab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on lattice Schroedinger operators with sparse potentials"};
  app.require_subcommand(1);

  sparselab::cli::Overrides overrides;
  std::string config;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "TOML experiment config")->required();
    sub->add_option("--seed", overrides.seed, "master seed, replaces the config value");
    sub->add_option("--threads", overrides.threads, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", overrides.out, "output directory");
  };
  auto* run = app.add_subcommand("run", "run the experiment and write <out>/<experiment>.{json,csv}");
  add_common(run);
  auto* validate = app.add_subcommand("validate", "check the config and the hypotheses it is meant to satisfy");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sparselab::cli::exit_config;
  }

  if (run->parsed()) return sparselab::cli::run(config, overrides, std::cout, std::cerr);
  return sparselab::cli::validate(config, overrides, std::cout, std::cerr);
}
