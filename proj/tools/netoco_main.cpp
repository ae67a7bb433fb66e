#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netoco/config.hpp"
#include "netoco/experiments.hpp"

namespace {

// Exit codes: 0 success, 2 invalid config, 3 numerical abort / failed
// invariant, 4 IO failure.
int run_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                std::optional<std::string> out_dir, std::optional<std::string> kind) {
  try {
    netoco::harness::ExperimentConfig config =
        netoco::harness::parse_config_file(config_path);
    if (seed) config.master_seed = *seed;
    if (out_dir) config.out_dir = *out_dir;
    if (kind) config.kind = *kind;
    netoco::harness::validate(config);
    const auto artifacts = netoco::harness::run(config);
    std::cout << "wrote " << artifacts.trace_csv.string() << "\n";
    std::cout << "wrote " << artifacts.metadata_json.string() << "\n";
    if (!artifacts.params_bin.empty())
      std::cout << "wrote " << artifacts.params_bin.string() << "\n";
    return 0;
  } catch (const netoco::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const netoco::harness::NumericalAbort& e) {
    std::cerr << "numerical abort at round " << e.round() << ": " << e.what() << "\n";
    return 3;
  } catch (const netoco::harness::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online learning over neural networks and episodic neural control"};
  app.require_subcommand(1);

  std::string config_path;
  std::string inspect_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> kind;

  auto* run_cmd = app.add_subcommand("run", "execute the experiment named in the config");
  run_cmd->add_option("--config", config_path, "config file path")->required();
  run_cmd->add_option("--seed", seed, "master seed override");
  run_cmd->add_option("--out", out_dir, "output directory override");
  run_cmd->add_option("--kind", kind, "experiment kind override");

  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite");
  verify_cmd->add_option("--config", config_path, "config file path")->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "print artifact metadata");
  inspect_cmd->add_option("artifact", inspect_path, "artifact path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_command(config_path, seed, out_dir, kind);
  if (verify_cmd->parsed())
    return run_command(config_path, std::nullopt, std::nullopt, "invariant_suite");

  try {
    netoco::harness::inspect(inspect_path, std::cout);
    return 0;
  } catch (const netoco::harness::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
