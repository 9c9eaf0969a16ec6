#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "axistable/errors.hpp"
#include "axistable/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "axistable: spectral-gap criteria, rate functions, drift checks and "
      "Monte Carlo decay experiments for axis-singular stable-like forms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  int threads = 1;

  const char* names[] = {"criteria", "rates",    "form",  "lyapunov",
                         "gap",      "simulate", "report"};
  for (const char* name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed override")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--tol", tol, "tolerance override");
    sub->add_option("--threads", threads, "worker threads");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    axistable::RunConfig rc = axistable::RunConfig::load(config_path, task);
    rc.out_dir = out_dir;
    if (seed_set) rc.seed = seed;
    if (tol > 0.0) rc.tol = tol;
    rc.threads = threads;
    axistable::run_task(rc);
    std::printf("wrote %s/summary.json\n", rc.out_dir.c_str());
    return 0;
  } catch (const axistable::gate_error& e) {
    std::fprintf(stderr, "hypothesis gate: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
