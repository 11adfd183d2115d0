#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <chemohapto/commands.hpp>

int main(int argc, char** argv) {
  CLI::App app{"chemotaxis-haptotaxis solver and boundedness checker"};
  app.require_subcommand(1);

  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out, "output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized initial data");

  std::string config, suite;
  std::vector<std::string> axes;

  auto* run = app.add_subcommand("run", "simulate a configuration and write its artifacts");
  run->add_option("config", config, "config file")->required();
  auto* check = app.add_subcommand("check", "evaluate the boundedness condition for a configuration");
  check->add_option("config", config, "config file")->required();
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "operators | identity | iterlog | loggn")->required();
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("--axis", axes, "name=start:stop:steps[:log]")->required();

  // Global flags are accepted after the subcommand too.
  for (CLI::App* sub : {run, check, verify, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  chemohapto::CliOptions opts{out, threads, seed};
  if (*run) return chemohapto::cmd_run(config, opts, std::cout, std::cerr);
  if (*check) return chemohapto::cmd_check(config, opts, std::cout, std::cerr);
  if (*verify) return chemohapto::cmd_verify(suite, std::cout, std::cerr);
  return chemohapto::cmd_sweep(config, axes, opts, std::cout, std::cerr);
}
