#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dmcl/errors.hpp"

namespace dmcl {

struct HybridTime {
  double t = 0.0;
  int j = 0;
};

struct ArcSample {
  double t = 0.0;
  int j = 0;
  Eigen::VectorXd x;
  std::vector<double> diag;
};

struct HybridArc {
  std::vector<std::string> diag_names;
  std::vector<ArcSample> samples;
  std::vector<std::size_t> jump_indices;  // indices of post-jump samples

  const ArcSample& back() const { return samples.back(); }
  void write_csv(const std::string& path) const;
  // Checks t/j monotonicity rules; throws VerifyError when violated.
  void check_well_formed() const;
};

struct HybridSpec {
  // dx/dt = flow(x, t) while in the flow set.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> flow;
  std::function<bool(const Eigen::VectorXd&)> in_jump_set;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> jump;
  // Optional exact time-to-guard from the current state (constant-rate
  // timers). Return a negative value to fall back to bisection detection.
  std::function<double(const Eigen::VectorXd&)> time_to_guard;
  // Optional extra per-sample outputs.
  std::vector<std::string> diag_names;
  std::function<void(const Eigen::VectorXd&, double, std::vector<double>&)> diagnostics;
  int per_instant_jump_cap = 8;
};

struct SolveOptions {
  double t_max = 10.0;
  int j_max = 1 << 30;
  double step = 1e-3;
  // Keep every k-th flow sample (jumps are always recorded).
  int record_stride = 1;
};

// Exact time for a constant-rate timer to reach threshold T.
double guard_time(double tau, double omega, double T);

// Classical fixed-step RK4 between jumps; the last step of each flow
// interval is shortened to land on the guard (exactly via time_to_guard,
// otherwise by bisection on in_jump_set to 1e-12 time tolerance).
HybridArc solve(const HybridSpec& spec, const Eigen::VectorXd& x0,
                const SolveOptions& opts);

}  // namespace dmcl
