#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dmcl/apps.hpp"
#include "dmcl/certificate.hpp"
#include "dmcl/dmcl_system.hpp"

namespace dmcl {

// Flat "key = value" configuration ('#' starts a comment).
struct Config {
  std::map<std::string, std::string> kv;

  static Config load(const std::string& path);
  static Config parse(std::istream& in);

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { kv[key] = value; }
};

// Everything the runner needs for one configured experiment.
struct BuiltInstance {
  std::string preset;  // empty for plain graph+data configs
  Digraph graph;
  NetworkData data;
  DMCLParams params;
  RestartMode mode = RestartMode::Centralized;
  SolveOptions opts;
  Eigen::VectorXd theta_star;  // may be empty
  std::vector<Regressor> regs;
  double phi_bar = 0.0;
  double dist_amplitude = 0.0;
  std::string dist_kind = "none";
  std::string csv_name = "arc.csv";
};

BuiltInstance build_from_config(const Config& cfg);

// Assemble the DMCL system (graph + data + gains) for an estimation-style
// instance; applies theta_star and the configured disturbance.
std::unique_ptr<DmclSystem> make_system(const BuiltInstance& bi, unsigned seed);

SpectralCertificate certificate_of(const BuiltInstance& bi);

// Subcommand drivers. They throw GraphError / DataError / DivergenceError for
// structural problems and return 1 (verify) when a check fails, 0 otherwise.
int run_analyze(const Config& cfg, const std::string& out_dir,
                std::string* json_out);
int run_simulate(const Config& cfg, const std::string& out_dir, unsigned seed);
int run_verify(const Config& cfg, const std::string& out_dir, unsigned seed,
               std::string* report_out);
int run_reproduce(const std::string& preset, const std::string& out_dir,
                  double step_override, int jobs);
int run_sweep(const Config& cfg, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir,
              unsigned seed, int jobs);

}  // namespace dmcl
