// Command-line front end: simulate, verify, identities, sweep.
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "superint/commands.hpp"

namespace {

struct RunFlags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

superint::RunConfig load(const RunFlags& f) {
  using superint::ConfigError;
  if (f.config_path.empty() == f.preset.empty()) {
    throw ConfigError("give exactly one of --config or --preset");
  }
  superint::RunConfig c = f.config_path.empty() ? superint::preset_config(f.preset)
                                                : superint::load_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output_dir = *f.out;
  return c;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "flat JSON run configuration");
  cmd->add_option("--preset", f.preset, "embedded configuration")
      ->check(CLI::IsMember(superint::preset_names()));
  cmd->add_option("--seed", f.seed, "seed for random points and initial conditions");
  cmd->add_option("--out", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superintegrable Hamiltonians: trajectories and conservation checks"};
  app.require_subcommand(1);

  RunFlags sim_flags, verify_flags, sweep_flags;
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory; write trajectory.csv and summary.json");
  add_run_flags(simulate, sim_flags);
  auto* verify = app.add_subcommand("verify", "run the configured checks; write report.json");
  add_run_flags(verify, verify_flags);
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid; write sweep.csv");
  add_run_flags(sweep, sweep_flags);

  auto* identities = app.add_subcommand("identities", "check the potential identities; write identities.json");
  long long samples = 1000;
  std::uint64_t id_seed = 1;
  std::string id_out = "out";
  identities->add_option("--samples", samples, "random points per identity");
  identities->add_option("--seed", id_seed, "seed");
  identities->add_option("--out", id_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : superint::exit_config;
  }

  try {
    if (*simulate) return superint::cmd_simulate(load(sim_flags));
    if (*verify) return superint::cmd_verify(load(verify_flags));
    if (*sweep) return superint::cmd_sweep(load(sweep_flags));
    if (samples < 1) throw superint::ConfigError("--samples must be >= 1");
    return superint::cmd_identities(static_cast<std::size_t>(samples), id_seed, id_out);
  } catch (const superint::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return superint::exit_config;
  } catch (const superint::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", superint::to_string(e.kind()), e.what());
    return superint::exit_config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
