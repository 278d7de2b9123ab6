#include <CLI11.hpp>

#include <iostream>

#include "anderson_lab/cli/cli.hpp"

namespace cli = anderson_lab::cli;

int main(int argc, char** argv) {
  CLI::App app{"Anderson Hamiltonian, Gibbs measure and wave dynamics experiments"};
  app.require_subcommand(1, 1);

  cli::RunOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string outdir;
  unsigned threads = 0;

  for (const auto& name : cli::subcommands()) {
    auto* sub = app.add_subcommand(name, name == "validate" ? "check a configuration without running it"
                                                            : "run the " + name + " experiment");
    sub->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--outdir", outdir, "output root (default $ANDERSON_LAB_OUTDIR or ./runs)");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--set", opts.sets, "override key=value (repeatable)")->take_all();
    sub->callback([&, sub, name] {
      opts.subcommand = name;
      if (sub->count("--config")) opts.config_path = config;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--outdir")) opts.outdir = outdir;
      if (sub->count("--threads")) opts.threads = threads;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return cli::run(opts, std::cerr).exit_code;
}
