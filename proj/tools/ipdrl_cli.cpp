#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ipdrl/harness.hpp"
#include "ipdrl/kernels/step_kernel.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::int64_t> steps;
  std::optional<unsigned> workers;
  bool force = false;
};

void add_common_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("-c,--config", o.config, "INI configuration file (built-in defaults when omitted)");
  cmd.add_option("-o,--out", o.out, "base output directory [experiment.out]");
  cmd.add_option("--seed", o.seed, "master seed [experiment.seed]");
  cmd.add_option("--samples", o.samples, "Monte-Carlo samples [experiment.samples]");
  cmd.add_option("--steps", o.steps, "time steps per sample [experiment.steps]");
  cmd.add_option("--workers", o.workers, "worker threads, 0 = all cores [experiment.workers]");
  cmd.add_flag("--force", o.force, "write directly into --out, replacing files [experiment.force]");
}

ipdrl::ExperimentConfig resolve(const Overrides& o) {
  ipdrl::ExperimentConfig c = o.config.empty() ? ipdrl::ExperimentConfig{} : ipdrl::load_config(o.config);
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.samples) c.samples = *o.samples;
  if (o.steps) c.steps = *o.steps;
  if (o.workers) c.workers = *o.workers;
  if (o.force) c.force = true;
  ipdrl::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability, learnability and stochasticity of TD learning in the iterated Prisoner's Dilemma"};
  app.require_subcommand(1);
  Overrides o;
  const char* kinds[][2] = {
      {"phase", "stability regions on an (epsilon, delta) grid"},
      {"mbrn", "best-response network, equilibria and basin sizes"},
      {"learnability", "equilibrium selection of the deterministic dynamics"},
      {"online", "online learners, equilibrium fractions over time"},
      {"batch", "sample-batch learners, equilibrium fractions over time"},
      {"robustness", "batch learners over batch size, alpha and epsilon"},
  };
  for (const auto& k : kinds) add_common_flags(*app.add_subcommand(k[0], k[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  ipdrl::ExperimentConfig config;
  ipdrl::ExperimentKind kind{};
  try {
    kind = ipdrl::parse_experiment_kind(name);
    config = resolve(o);
  } catch (const ipdrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ipdrl::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto dir = ipdrl::prepare_output_dir(config.out, kind, config.force);
    std::cerr << name << ": seed " << config.seed << ", isa "
              << ipdrl::kernels::to_string(ipdrl::kernels::active_isa()) << ", writing " << dir.string()
              << '\n';
    const auto result = ipdrl::run_experiment(config, kind, dir);
    for (const auto& f : result.files) std::cout << (result.directory / f).string() << '\n';
  } catch (const ipdrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
