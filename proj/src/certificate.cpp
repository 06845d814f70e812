#include "dmcl/certificate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dmcl {

double chi_of(double k_t, double sigma_omega, double sigma_q_max, double phi_bar) {
  const double p2 = phi_bar * phi_bar;
  return std::sqrt(2.0 * sigma_omega * sigma_q_max * p2 * k_t +
                   sigma_q_max * sigma_q_max * p2 * p2 * k_t * k_t);
}

double sigma_min_analytic(double alpha_eff, double k_r, double k_c,
                          double lambda2, double sigma_q_min,
                          double sigma_q_max, double sigma_delta_max) {
  // Intersection angle of the two trigonometric envelopes bounding the data
  // term and the symmetrized consensus term; the resulting lower bound is
  // (k_c lambda2 / 4)(1 + cos(th1* + th2*)).
  const double a = 2.0 * k_r * sigma_q_min * alpha_eff;
  const double b = k_c * lambda2;
  const double d = 4.0 * k_r * sigma_q_max * sigma_delta_max;
  auto clamp1 = [](double v) { return std::min(1.0, std::max(-1.0, v)); };
  const double th1 = std::acos(clamp1((a - b) / std::sqrt((a + b) * (a + b) + d * d)));
  const double th2 = std::atan(d / (a + b));
  return 0.25 * k_c * lambda2 * (1.0 + std::cos(th1 + th2));
}

double SpectralCertificate::mu(double T) const {
  if (T <= T_lower) throw VerifyError("mu(T) requires T > T_lower");
  const double r = T_lower / T;
  return r * r;
}

SpectralCertificate build_certificate(const Digraph& g, const NetworkData& data,
                                      double k_r, double k_c, double k_t,
                                      double phi_bar, double T0, double omega) {
  SpectralCertificate c;
  c.n_nodes = g.nodes();
  c.dim = data.dim();
  c.k_r = k_r;
  c.k_c = k_c;
  c.k_t = k_t;
  c.phi_bar = phi_bar;
  c.T0 = T0;
  c.omega = omega;

  if (!is_strongly_connected(g))
    throw GraphError("graph is not strongly connected");

  const Eigen::MatrixXd L = build_laplacian(g);
  c.q = left_perron_vector(L);
  c.sigma_q_min = c.q.minCoeff();
  c.sigma_q_max = c.q.maxCoeff();

  const int N = c.n_nodes;
  const int n = c.dim;
  const Eigen::MatrixXd Qs = c.q.asDiagonal();  // N x N
  const Eigen::MatrixXd QLsym = Qs * L + L.transpose() * Qs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esN(QLsym);
  const Eigen::VectorXd lam = esN.eigenvalues();
  c.lambdaN = lam(N - 1);
  c.lambda2 = lam(1);
  for (int i = 0; i < N; ++i) {
    if (lam(i) > 1e-9) {
      c.lambda2 = lam(i);
      break;
    }
  }

  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N * n, N * n);
  Eigen::MatrixXd Lbig = Eigen::MatrixXd::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    Q.block(i * n, i * n, n, n) = c.q(i) * In;
    for (int j = 0; j < N; ++j) Lbig.block(i * n, j * n, n, n) = L(i, j) * In;
  }
  const Eigen::MatrixXd Delta = data.delta_block();
  c.Sigma = k_r * Q * Delta + 0.5 * k_c * (Q * Lbig + Lbig.transpose() * Q);
  c.Omega = 0.5 * k_c * (Q * Lbig - Lbig.transpose() * Q);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esS(
      0.5 * (c.Sigma + c.Sigma.transpose()));
  c.sigma_sigma_min = esS.eigenvalues().minCoeff();
  c.sigma_sigma_max = esS.eigenvalues().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXd> svdO(c.Omega);
  c.sigma_omega = svdO.singularValues().maxCoeff();

  c.alpha = data.csr_level();
  if (c.alpha <= 0.0)
    throw DataError("data is not cooperatively sufficiently rich (alpha <= 0)");
  c.sigma_delta_max = data.sigma_delta_max();
  c.sigma_sigma_min_analytic =
      sigma_min_analytic(c.alpha, k_r, k_c, c.lambda2, c.sigma_q_min,
                         c.sigma_q_max, c.sigma_delta_max);
  c.sigma_sigma_min_analytic_scaled =
      sigma_min_analytic(c.alpha / N, k_r, k_c, c.lambda2, c.sigma_q_min,
                         c.sigma_q_max, c.sigma_delta_max);

  c.chi_kt = chi_of(k_t, c.sigma_omega, c.sigma_q_max, phi_bar);

  c.T_lower = std::sqrt(c.sigma_q_max / (2.0 * c.sigma_sigma_min) + T0 * T0);
  const double denom = c.sigma_omega * c.sigma_omega + c.chi_kt * c.chi_kt;
  c.T_upper = denom <= 0.0
                  ? std::numeric_limits<double>::infinity()
                  : std::sqrt(c.sigma_q_min * (1.0 - omega) * c.sigma_sigma_min / denom);
  c.T_star = std::exp(1.0) * c.T_lower;
  return c;
}

std::map<std::string, double> SpectralCertificate::scalars() const {
  std::map<std::string, double> m;
  m["n_nodes"] = n_nodes;
  m["dim"] = dim;
  m["sigma_q_min"] = sigma_q_min;
  m["sigma_q_max"] = sigma_q_max;
  m["sigma_sigma_min"] = sigma_sigma_min;
  m["sigma_sigma_max"] = sigma_sigma_max;
  m["sigma_sigma_min_analytic"] = sigma_sigma_min_analytic;
  m["sigma_sigma_min_analytic_scaled"] = sigma_sigma_min_analytic_scaled;
  m["sigma_omega"] = sigma_omega;
  m["sigma_omega_sq"] = sigma_omega * sigma_omega;
  m["lambda2"] = lambda2;
  m["lambdaN"] = lambdaN;
  m["alpha"] = alpha;
  m["phi_bar"] = phi_bar;
  m["sigma_delta_max"] = sigma_delta_max;
  m["k_r"] = k_r;
  m["k_c"] = k_c;
  m["k_t"] = k_t;
  m["chi_kt"] = chi_kt;
  m["T0"] = T0;
  m["omega"] = omega;
  m["T_lower"] = T_lower;
  m["T_upper"] = T_upper;
  m["T_star"] = T_star;
  m["mu_T_star"] = std::exp(-2.0);
  return m;
}

std::string SpectralCertificate::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{";
  bool first = true;
  for (const auto& [k, v] : scalars()) {
    if (!first) os << ",";
    first = false;
    os << "\n  \"" << k << "\": ";
    if (std::isinf(v))
      os << "\"inf\"";
    else
      os << v;
  }
  os << "\n}\n";
  return os.str();
}

}  // namespace dmcl
