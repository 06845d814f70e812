#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "dmcl/dataset.hpp"
#include "dmcl/graph.hpp"
#include "dmcl/hybrid.hpp"

namespace dmcl {

enum class RestartMode { Centralized, Decentralized, None, FirstOrder };

struct DMCLParams {
  double k_r = 1.0;   // recorded-data gain
  double k_t = 0.0;   // real-time gain
  double k_c = 1.0;   // consensus gain
  double T0 = 0.1;
  double T = 1.0;
  double omega = 0.5;              // timer rate, in (0,1)
  double k_a = 1.0;                // time-scale gain for interconnections
  std::vector<int> eta;            // restart policies, defaults to all-ones
  std::vector<double> r;           // decentralized coordination thresholds

  void validate(int n_agents, bool decentralized) const;
  // Midpoint of the valid threshold range (T0, T0 + (T-T0)/(N-1)).
  static std::vector<double> default_thresholds(double T0, double T, int n);
};

// Deterministic selection of the threshold reset map: T0 below r_j, T above,
// tie resolved to T0.
double coordination_reset(double tau_j, double r_j, double T0, double T);

// DMCL network in error-friendly form. Holds the graph, data, gains and
// (when real-time terms or synthetic disturbances are active) the regressors
// and true parameter.
class DmclSystem {
 public:
  DmclSystem(const Digraph& g, const NetworkData& data, const DMCLParams& prm);

  int num_agents() const { return n_agents_; }
  int dim() const { return dim_; }
  const DMCLParams& params() const { return prm_; }
  const Eigen::MatrixXd& laplacian() const { return L_; }
  const NetworkData& data() const { return data_; }

  // Optional pieces for real-time terms / diagnostics.
  void set_regressors(std::vector<Regressor> regs);
  void set_theta_star(const Eigen::VectorXd& theta_star);
  void set_upsilon(std::function<double(int, double)> upsilon);  // realtime noise
  // Additive input U(t) on the momentum dynamics: p_dot += 2 tau U(t).
  void set_disturbance(std::function<Eigen::VectorXd(double)> U);
  const std::optional<Eigen::VectorXd>& theta_star() const { return theta_star_; }

  // k_t Psi_i + k_r Phi_i for one agent (stacked over agents by callers).
  Eigen::VectorXd lambda_map(int agent, const Eigen::VectorXd& theta_i,
                             double s) const;
  // Stacked k_t Psi + k_r Phi + k_c L theta.
  Eigen::VectorXd learning_field(const Eigen::VectorXd& theta, double s) const;

  // State layouts:
  //   Centralized / None:  [theta(Nn), p(Nn), tau, s]
  //   Decentralized:       [theta(Nn), p(Nn), tau_1..tau_N, s]
  //   FirstOrder:          [theta(Nn), s]
  HybridSpec make_spec(RestartMode mode) const;
  int state_size(RestartMode mode) const;

  Eigen::VectorXd pack_state(RestartMode mode, const Eigen::VectorXd& theta0,
                             const Eigen::VectorXd& p0,
                             const Eigen::VectorXd& tau0, double s0) const;

  Eigen::VectorXd theta_of(RestartMode mode, const Eigen::VectorXd& x) const;
  Eigen::VectorXd p_of(RestartMode mode, const Eigen::VectorXd& x) const;
  Eigen::VectorXd tau_of(RestartMode mode, const Eigen::VectorXd& x) const;

  double error_norm(RestartMode mode, const Eigen::VectorXd& x) const;

  // Cached per-agent Delta_i and b_i = sum_k phi_k psi_k.
  const Eigen::MatrixXd& delta_block() const { return Delta_; }

 private:
  Eigen::VectorXd flow_centralized(const Eigen::VectorXd& x, double t,
                                   bool timer_active) const;
  Eigen::VectorXd flow_decentralized(const Eigen::VectorXd& x, double t) const;
  Eigen::VectorXd flow_first_order(const Eigen::VectorXd& x, double t) const;

  Eigen::VectorXd jump_centralized(const Eigen::VectorXd& x) const;
  Eigen::VectorXd jump_decentralized(const Eigen::VectorXd& x) const;

  int n_agents_ = 0;
  int dim_ = 0;
  DMCLParams prm_;
  Eigen::MatrixXd L_;      // N x N
  Eigen::MatrixXd Lbig_;   // Nn x Nn
  NetworkData data_;
  Eigen::MatrixXd Delta_;  // block-diagonal
  std::vector<Eigen::MatrixXd> Di_;
  std::vector<Eigen::VectorXd> bi_;
  std::vector<Regressor> regs_;
  std::optional<Eigen::VectorXd> theta_star_;
  std::function<double(int, double)> upsilon_;
  std::function<Eigen::VectorXd(double)> dist_;
};

// First hybrid time at which the timer vector is in the synchronization set
// A_sync = [T0,T]*1 union {T0,T}^N (and stays there through the arc's end).
struct SyncReport {
  bool synchronized = false;
  double t_sync = 0.0;
  int j_sync = 0;
  double worst_distance = 0.0;  // max distance to A_sync after sync
};
SyncReport sync_check(const HybridArc& arc, const DmclSystem& sys);
double dist_to_sync_set(const Eigen::VectorXd& tau, double T0, double T);

}  // namespace dmcl
