#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmcl/errors.hpp"

namespace dmcl {

// Time-indexed regressor with a sup-norm bound.
struct Regressor {
  int dim = 0;
  double phi_bar = 0.0;
  std::function<Eigen::VectorXd(double)> eval;
};

// The exponential basis used throughout the estimation examples:
// phi_i(s) = (1, 10 e^{-i s}, 100 e^{-2 i s}) for agent index i (1-based).
Regressor exp_regressor(int agent_id);

struct RecordedSample {
  double t = 0.0;
  Eigen::VectorXd phi;
  double psi = 0.0;
  double nu = 0.0;  // recorded measurement noise
};

struct AgentDataset {
  int agent_id = 0;  // 1-based
  std::vector<RecordedSample> samples;

  // Sum of phi phi^T over samples.
  Eigen::MatrixXd data_matrix() const;
};

struct NetworkData {
  std::vector<AgentDataset> agents;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int dim() const;
  int max_samples() const;

  // Block-diagonal stack of agent data matrices (Nn x Nn).
  Eigen::MatrixXd delta_block() const;
  // lambda_min of the summed data matrices (the cooperative richness level).
  double csr_level() const;
  // Max over agents of lambda_max(Delta_i).
  double sigma_delta_max() const;

  // Line format: "agent k t phi_0 .. phi_{n-1} psi nu".
  static NetworkData load(const std::string& path);
  static NetworkData read(std::istream& in);
  void save(const std::string& path) const;
  void write(std::ostream& out) const;
};

// Samples psi = phi(t)^T theta_star + nu at the given times.
AgentDataset synthesize_dataset(const Regressor& reg, int agent_id,
                                const Eigen::VectorXd& theta_star,
                                const std::vector<double>& sample_times,
                                const std::vector<double>& noise = {});

// Stacked disturbance vector entering the momentum error dynamics:
// block i = -2 tau k_t phi_i(t) upsilon_i(t) + k_rec * sum_k phi_i(t_k) nu_{i,k}.
// k_rec defaults to the consensus gain k_c at call sites.
Eigen::VectorXd assemble_U(const NetworkData& data,
                           const std::vector<Regressor>& regs,
                           const std::function<double(int, double)>& upsilon,
                           double tau, double k_t, double k_rec, double t);

}  // namespace dmcl
