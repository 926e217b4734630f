// Command-line front-end: law, simulate, validate, meanvel.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "telegraph/cli.hpp"

namespace {

void add_common(CLI::App* sub, telegraph::cli::RunConfig& cfg) {
  sub->add_option("--scheme", cfg.schemes, "bernoulli:p=.. or polya:b=..,r=..,A=.. (repeat for a sweep)");
  sub->add_option("--intertimes", cfg.intertimes, "linexp:lambda=..,mu=.., gammaexp:lambda=..,mu=.. or exp:lambda=..,mu=..")
      ->capture_default_str();
  sub->add_option("--c", cfg.c, "forward speed")->capture_default_str();
  sub->add_option("--v", cfg.v, "backward speed")->capture_default_str();
  sub->add_option("--t", cfg.t, "time")->capture_default_str();
  sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
  sub->add_option("--out", cfg.out, "output file, or directory when sweeping");
}

void add_mc(CLI::App* sub, telegraph::cli::RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "seed (default from TELEGRAPH_SEED, else 1)");
  sub->add_option("--workers", cfg.workers, "threads; output does not depend on it (0 = all cores)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using telegraph::cli::RunConfig;
  RunConfig cfg;
  if (const char* env = std::getenv("TELEGRAPH_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "telegraph: TELEGRAPH_SEED is not an unsigned integer\n";
      return 2;
    }
  }

  CLI::App app{"Telegraph process driven by Bernoulli or Polya trials"};
  app.require_subcommand(1);
  bool schemes_given = false;

  auto* law = app.add_subcommand("law", "atoms and density of S_t on a grid");
  add_common(law, cfg);
  law->add_option("--grid", cfg.grid, "number of x midpoints")->capture_default_str();
  law->add_option("--method", cfg.method, "auto, closed or series")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo histogram of S_t");
  add_common(sim, cfg);
  add_mc(sim, cfg);
  sim->add_option("--paths", cfg.paths, "number of paths")->capture_default_str();
  sim->add_option("--bins", cfg.bins, "histogram bins")->capture_default_str();
  sim->add_option("--trace", cfg.trace, "also dump the first N paths");
  sim->add_option("--trace-out", cfg.trace_out, "file for the traces");

  auto* val = app.add_subcommand("validate", "default validation suite");
  add_common(val, cfg);
  add_mc(val, cfg);
  val->add_option("--paths", cfg.paths, "number of paths")->capture_default_str();
  val->add_option("--bins", cfg.bins, "histogram bins")->capture_default_str();
  val->add_flag("--negative-control", cfg.negative_control, "simulate a mismatched scheme; the suite must fail");

  auto* mv = app.add_subcommand("meanvel", "conditional mean velocity E[V_t | V_0]");
  add_common(mv, cfg);
  add_mc(mv, cfg);
  mv->add_option("--initial", cfg.initial, "c or -v")->capture_default_str();
  mv->add_option("--times", cfg.times, "comma-separated times (default: --t)")->delimiter(',');
  mv->add_option("--mc-paths", cfg.mc_paths, "Monte Carlo paths for a comparison column (0 = none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  for (auto* sub : {law, sim, val, mv})
    if (sub->parsed()) {
      cfg.command = sub->get_name();
      schemes_given = sub->count("--scheme") > 0;
    }
  if (!schemes_given) cfg.schemes = {"bernoulli:p=0.5"};

  try {
    return telegraph::cli::run(cfg, std::cout);
  } catch (const telegraph::cli::usage_error& e) {
    std::cerr << "telegraph: " << e.what() << '\n';
    return 2;
  } catch (const telegraph::domain_error& e) {
    std::cerr << "telegraph: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "telegraph: " << e.what() << '\n';
    return 1;
  }
}
