// Command-line front end for the DMCL library (links the C API only).
#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "dmcl.h"

namespace {

struct Common {
  std::string config;
  std::string out_dir = "out";
  unsigned seed = 0;
  int jobs = 1;
  double step = -1.0;
};

int fail(int rc) {
  std::fprintf(stderr, "error (%d): %s\n", rc, dmcl_last_error());
  return rc;
}

dmcl_session* open_session(const Common& c, int* rc) {
  dmcl_session* s = nullptr;
  *rc = dmcl_open(c.config.c_str(), &s);
  if (*rc == 0 && c.step > 0)
    *rc = dmcl_set_option(s, "horizon.step", std::to_string(c.step).c_str());
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized momentum-based concurrent learning toolkit"};
  app.require_subcommand(1);

  Common c;
  app.add_option("--config", c.config, "Config file (key = value lines)");
  app.add_option("--out-dir", c.out_dir, "Output directory");
  app.add_option("--seed", c.seed, "RNG seed for noise and fuzz checks");
  app.add_option("--jobs", c.jobs, "Worker threads for sweeps");
  app.add_option("--step", c.step, "Integrator step override");

  auto* analyze = app.add_subcommand(
      "analyze", "Spectral certificate and restart window for a config");
  auto* simulate =
      app.add_subcommand("simulate", "Simulate the configured hybrid system");
  auto* verify = app.add_subcommand(
      "verify", "Numerical verification suite for the configured instance");

  auto* reproduce =
      app.add_subcommand("reproduce", "Run a canned benchmark study");
  std::string preset;
  reproduce->add_option("preset", preset, "example1|estimation|mrac|feedopt")
      ->required();

  auto* sweep =
      app.add_subcommand("sweep", "Re-simulate over a list of parameter values");
  std::string sweep_param;
  std::vector<double> sweep_values;
  sweep->add_option("--param", sweep_param, "Parameter name, e.g. T")
      ->required();
  sweep->add_option("--values", sweep_values, "Values to sweep")
      ->required()
      ->delimiter(',');

  for (CLI::App* sub : {analyze, simulate, verify, reproduce, sweep})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  int rc = 0;
  if (reproduce->parsed()) {
    rc = dmcl_reproduce(preset.c_str(), c.out_dir.c_str(), c.step, c.jobs);
    if (rc != 0) return fail(rc);
    std::printf("reproduce %s: outputs in %s\n", preset.c_str(),
                c.out_dir.c_str());
    return 0;
  }

  if (c.config.empty()) {
    std::fprintf(stderr, "error (2): this subcommand needs --config\n");
    return 2;
  }
  dmcl_session* s = open_session(c, &rc);
  if (rc != 0) return fail(rc);

  if (analyze->parsed()) {
    char* json = nullptr;
    rc = dmcl_analyze(s, &json);
    if (rc == 0 && json) std::printf("%s\n", json);
    dmcl_string_free(json);
  } else if (simulate->parsed()) {
    rc = dmcl_simulate(s, c.out_dir.c_str(), c.seed);
    if (rc == 0) std::printf("simulate: arc written to %s\n", c.out_dir.c_str());
  } else if (verify->parsed()) {
    char* report = nullptr;
    rc = dmcl_verify(s, c.out_dir.c_str(), c.seed, &report);
    if (report) std::printf("%s\n", report);
    dmcl_string_free(report);
    if (rc == 1) std::fprintf(stderr, "verify: at least one check failed\n");
  } else if (sweep->parsed()) {
    rc = dmcl_sweep(s, sweep_param.c_str(), sweep_values.data(),
                    sweep_values.size(), c.out_dir.c_str(), c.seed, c.jobs);
    if (rc == 0) std::printf("sweep: outputs in %s\n", c.out_dir.c_str());
  }

  dmcl_close(s);
  return rc == 0 ? 0 : fail(rc);
}
