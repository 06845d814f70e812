#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dmcl/dmcl_system.hpp"

namespace dmcl {

// A parameter-estimation style instance: graph + recorded data + gains.
struct EstimationInstance {
  Digraph graph;
  NetworkData data;
  DMCLParams params;
  Eigen::VectorXd theta_star;
  std::vector<Regressor> regs;
  double phi_bar = 0.0;
  std::string name;
};

// Three-agent cycle showing the restart dichotomy: without restarts the
// momentum flow diverges, with an in-window T it converges.
EstimationInstance build_example1();

// Five-agent exponential-regressor benchmark; cooperative richness level 5.5.
// `complete` selects the all-to-all graph, otherwise the directed cycle.
EstimationInstance build_estimation(bool complete);

// Small complete-graph instance with identity data matrices, used for the
// per-period contraction study (T sweep against the tuning rule).
EstimationInstance build_contraction_instance();

// --- Adaptive-control application (reference-model tracking) ---
struct MracInstance {
  int n_agents = 5;
  Digraph graph;  // directed 5-cycle
  NetworkData data;
  DMCLParams params;
  Eigen::VectorXd theta_star;             // (-1, 1, 0.5)
  std::vector<Eigen::Vector2d> chi0;      // plant initial conditions
  std::vector<double> b;                  // input gains b_i = (2i-1)/(2i)
  double ic_scale = 0.0;
};
Eigen::Vector3d mrac_phi(const Eigen::Vector2d& chi);
MracInstance build_mrac();
// State layout, momentum: [chi(10), theta(15), p(15), tau, s];
// first-order baseline:    [chi(10), theta(15), s].
HybridSpec mrac_spec(const MracInstance& inst, bool momentum);
Eigen::VectorXd mrac_x0(const MracInstance& inst, bool momentum);

// --- Cooperative feedback-optimization application ---
struct FeedoptInstance {
  int n_agents = 5;
  Digraph graph;  // directed 5-cycle
  NetworkData data;
  DMCLParams params;
  Eigen::VectorXd theta_star;             // quadratic payoff coefficients
  std::vector<Eigen::Vector2d> xi;        // input-set centers, radius 2
  std::vector<Eigen::Vector2d> u_star;    // constrained maximizers
  double eps_u = 0.01;
  double probe_rho = 0.0;
};
Eigen::VectorXd feedopt_phi(const Eigen::Vector2d& u);
// Gradient of u -> phi(u)^T theta.
Eigen::Vector2d feedopt_grad(const Eigen::Vector2d& u,
                             const Eigen::VectorXd& theta);
FeedoptInstance build_feedopt();
// State layout, momentum: [u(10), chi(10), theta(30), p(30), tau, s];
// first-order baseline:    [u(10), chi(10), theta(30), s].
HybridSpec feedopt_spec(const FeedoptInstance& inst, bool momentum);
Eigen::VectorXd feedopt_x0(const FeedoptInstance& inst, bool momentum);

// Parameter-error norm helpers for the application arcs.
double mrac_theta_err(const MracInstance& inst, const Eigen::VectorXd& x);
double feedopt_theta_err(const FeedoptInstance& inst, const Eigen::VectorXd& x);

// Exact decay timing for the linear first-order baseline
// theta_err_dot = -(k_r Delta + k_c L) theta_err (uses a dense
// eigendecomposition; returns +inf if the level is never reached).
double first_order_time_to(const Eigen::MatrixXd& A,
                           const Eigen::VectorXd& err0, double level,
                           double t_max);

}  // namespace dmcl
