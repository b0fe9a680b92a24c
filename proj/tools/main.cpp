#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "micromorph/runner.hpp"

namespace {

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot read config file '" + config_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  micromorph::RunConfig config = micromorph::parse_config(buffer.str());
  if (!config.command.empty() && config.command != command)
    throw std::runtime_error("config names command '" + config.command +
                             "' but the CLI invoked '" + command + "'");
  config.command = command;
  if (seed) config.seed = *seed;

  micromorph::run(config, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed micromorphic finite-element solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;

  for (const std::string& name : micromorph::known_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override for randomized runs");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    return run_command(command, config_path, out_dir, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
