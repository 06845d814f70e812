#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "dmcl/dataset.hpp"
#include "dmcl/graph.hpp"

namespace dmcl {

// All scalar constants of the spectral analysis plus the restart window.
struct SpectralCertificate {
  int n_nodes = 0;
  int dim = 0;

  Eigen::VectorXd q;           // positive unit left null vector of L
  double sigma_q_min = 0.0;    // min_i q_i
  double sigma_q_max = 0.0;    // max_i q_i

  Eigen::MatrixXd Sigma;       // k_r Q Delta + (k_c/2)(QL + L^T Q), Nn x Nn
  Eigen::MatrixXd Omega;       // (k_c/2)(QL - L^T Q)
  double sigma_sigma_min = 0.0;          // exact lambda_min(Sigma)
  double sigma_sigma_max = 0.0;          // exact lambda_max(Sigma)
  double sigma_sigma_min_analytic = 0.0; // closed-form lower bound
  double sigma_sigma_min_analytic_scaled = 0.0;  // variant using alpha/N
  double sigma_omega = 0.0;    // largest singular value of Omega

  double lambda2 = 0.0;        // smallest nonzero eigenvalue of QL + L^T Q
  double lambdaN = 0.0;        // largest eigenvalue of QL + L^T Q

  double alpha = 0.0;          // cooperative richness level
  double phi_bar = 0.0;        // regressor sup bound
  double sigma_delta_max = 0.0;

  double k_r = 0.0, k_c = 0.0, k_t = 0.0;
  double chi_kt = 0.0;         // chi(k_t)

  double T0 = 0.0, omega = 0.0;
  double T_lower = 0.0;        // sqrt(sigma_q_max / (2 sigma_sigma_min) + T0^2)
  double T_upper = 0.0;        // +inf when the asymmetry terms vanish
  double T_star = 0.0;         // e * T_lower

  bool window_nonempty() const { return T_lower < T_upper; }
  bool in_window(double T) const { return T > T_lower && T < T_upper; }

  // (T_lower / T)^2; requires T > T_lower.
  double mu(double T) const;

  // Flat key-value export (matrices omitted).
  std::map<std::string, double> scalars() const;
  std::string to_json() const;
};

double chi_of(double k_t, double sigma_omega, double sigma_q_max, double phi_bar);

// Closed-form lower bound on lambda_min(Sigma).
// `alpha_eff` is either alpha or alpha/N depending on the variant.
double sigma_min_analytic(double alpha_eff, double k_r, double k_c,
                          double lambda2, double sigma_q_min,
                          double sigma_q_max, double sigma_delta_max);

SpectralCertificate build_certificate(const Digraph& g, const NetworkData& data,
                                      double k_r, double k_c, double k_t,
                                      double phi_bar, double T0, double omega);

}  // namespace dmcl
