#include <doctest.h>

#include <cmath>
#include <random>

#include "dmcl/apps.hpp"
#include "dmcl/lyapunov.hpp"

#include <nlohmann/json.hpp>

using namespace dmcl;

namespace {

Eigen::VectorXd randn(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

SpectralCertificate cert_of(const EstimationInstance& e) {
  return build_certificate(e.graph, e.data, e.params.k_r, e.params.k_c,
                           e.params.k_t, e.phi_bar, e.params.T0,
                           e.params.omega);
}

}  // namespace

TEST_CASE("sandwich bounds hold on random states") {
  const EstimationInstance e = build_estimation(false);
  const SpectralCertificate cert = cert_of(e);
  const double T = 2.70;
  const SandwichConstants sc = sandwich_constants(cert, T);
  REQUIRE(sc.c_lower > 0.0);
  REQUIRE(sc.c_upper > sc.c_lower);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ut(cert.T0, T);
  const int Nn = cert.n_nodes * cert.dim;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd th = randn(rng, Nn);
    const Eigen::VectorXd p = randn(rng, Nn);
    const double tau = ut(rng);
    const double V = lyapunov_value(cert, th, p, tau);
    const double z2 = th.squaredNorm() + p.squaredNorm();
    CHECK(V >= sc.c_lower * z2 * (1.0 - 1e-12));
    CHECK(V <= sc.c_upper * z2 * (1.0 + 1e-12));
  }
}

TEST_CASE("full restarts contract V by the window factor") {
  const EstimationInstance e = build_estimation(false);
  const SpectralCertificate cert = cert_of(e);
  const double T = 2.70;
  REQUIRE(cert.in_window(T));
  DMCLParams prm = e.params;
  prm.T = T;
  DmclSystem sys(e.graph, e.data, prm);
  const double mu = cert.mu(T);
  std::mt19937 rng(22);
  const int Nn = cert.n_nodes * cert.dim;
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd th = randn(rng, Nn);
    const Eigen::VectorXd p = randn(rng, Nn);
    CHECK(jump_ratio(cert, sys, th, p, T) <= mu + 1e-9);
  }
}

TEST_CASE("partial restarts never increase V") {
  const EstimationInstance e = build_estimation(false);
  const SpectralCertificate cert = cert_of(e);
  const double T = 2.70;
  std::mt19937 rng(23);
  std::bernoulli_distribution coin(0.5);
  const int Nn = cert.n_nodes * cert.dim;
  for (int k = 0; k < 100; ++k) {
    DMCLParams prm = e.params;
    prm.T = T;
    prm.eta.assign(cert.n_nodes, 0);
    for (int i = 0; i < cert.n_nodes; ++i) prm.eta[i] = coin(rng) ? 1 : 0;
    DmclSystem sys(e.graph, e.data, prm);
    const Eigen::VectorXd th = randn(rng, Nn);
    const Eigen::VectorXd p = randn(rng, Nn);
    CHECK(jump_ratio(cert, sys, th, p, T) <= 1.0 + 1e-9);
  }
}

TEST_CASE("reset identity residual vanishes for random weights") {
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> uq(0.1, 2.0);
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < 500; ++k) {
    const int N = 2 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 4);
    Eigen::VectorXd q(N);
    for (int i = 0; i < N; ++i) q(i) = uq(rng);
    std::vector<int> eta(N);
    for (int i = 0; i < N; ++i) eta[i] = coin(rng) ? 1 : 0;
    const Eigen::VectorXd th = randn(rng, N * n);
    const Eigen::VectorXd p = randn(rng, N * n);
    CHECK(reset_identity_residual(th, p, q, eta) <= 1e-10);
  }
}

TEST_CASE("flow constants are positive inside the window and flagged outside") {
  const EstimationInstance e = build_estimation(false);
  const SpectralCertificate cert = cert_of(e);
  const FlowConstants in = flow_constants(cert, 2.70);
  CHECK(in.applicable);
  CHECK(in.nu > 0.0);
  CHECK(in.rho > 0.0);
  CHECK(in.gamma > 0.0);
  const FlowConstants out = flow_constants(cert, 2.0 * cert.T_upper);
  CHECK_FALSE(out.applicable);
}

TEST_CASE("quadratic-form margin over the timer range") {
  const EstimationInstance e = build_estimation(false);
  const SpectralCertificate cert = cert_of(e);
  const VwReport rep = vw_margin(cert, {}, 2.70, 6, 1, 0.0);
  CHECK(rep.applicable);
  CHECK(rep.pass);
  CHECK(rep.worst_margin >= -1e-9);
}

TEST_CASE("block-triangular singular value bound") {
  std::mt19937 rng(25);
  for (int k = 0; k < 50; ++k) {
    const int m = 2 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd B(m, m);
    std::normal_distribution<double> g;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        A(i, j) = g(rng);
        D(i, j) = g(rng);
        B(i, j) = g(rng);
      }
    // Keep both diagonal blocks comfortably invertible.
    A += 4.0 * Eigen::MatrixXd::Identity(m, m);
    D += 4.0 * Eigen::MatrixXd::Identity(m, m);
    const BlockSvCheck c = block_triangular_sv_bound(A, B, D);
    CHECK(c.pass);
    CHECK(c.sigma_min >= c.bound * (1.0 - 1e-9));
  }
}

TEST_CASE("verification report serializes to flat JSON") {
  std::vector<CheckResult> checks;
  checks.push_back({"alpha_check", true, true, 0.5, "ok"});
  checks.push_back({"window", false, true, -0.1, "outside"});
  const std::string s = report_to_json(checks);
  const auto j = nlohmann::json::parse(s);
  REQUIRE(j.is_array());
  CHECK(j.size() == 2);
  CHECK(j[0]["name"] == "alpha_check");
  CHECK(j[1]["pass"] == false);
}
