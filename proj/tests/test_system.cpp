#include <doctest.h>

#include <random>

#include "dmcl/apps.hpp"
#include "dmcl/dmcl_system.hpp"
#include "dmcl/errors.hpp"

using namespace dmcl;

namespace {

Eigen::VectorXd randn(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("stacked learning field equals the per-agent assembly") {
  const EstimationInstance e = build_estimation(false);
  DmclSystem sys(e.graph, e.data, e.params);
  const int N = sys.num_agents();
  const int n = sys.dim();
  std::mt19937 rng(11);
  const Eigen::VectorXd theta = randn(rng, N * n);
  const Eigen::VectorXd stacked = sys.learning_field(theta, 0.3);

  const Eigen::MatrixXd L = build_laplacian(e.graph);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd manual = sys.lambda_map(i, theta.segment(i * n, n), 0.3);
    for (int j = 0; j < N; ++j)
      manual += e.params.k_c * L(i, j) * theta.segment(j * n, n);
    CHECK((stacked.segment(i * n, n) - manual).norm() <= 1e-10);
  }
}

TEST_CASE("noise-free recorded residual is linear in the parameter error") {
  const EstimationInstance e = build_estimation(false);
  DmclSystem sys(e.graph, e.data, e.params);
  const int N = sys.num_agents();
  const int n = sys.dim();
  std::mt19937 rng(12);
  const Eigen::VectorXd theta = randn(rng, N * n);
  Eigen::VectorXd star(N * n);
  for (int i = 0; i < N; ++i) star.segment(i * n, n) = e.theta_star;

  // learning_field(theta) = (k_r Delta + k_c L (x) I)(theta - 1 (x) theta*).
  const Eigen::MatrixXd L = build_laplacian(e.graph);
  Eigen::MatrixXd A = e.params.k_r * sys.delta_block();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      A.block(i * n, j * n, n, n) +=
          e.params.k_c * L(i, j) * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd expect = A * (theta - star);
  CHECK((sys.learning_field(theta, 0.0) - expect).norm() <=
        1e-10 * expect.norm());
}

TEST_CASE("centralized flow and jump layout") {
  const EstimationInstance e = build_contraction_instance();
  DMCLParams prm = e.params;
  prm.T = 1.0;
  DmclSystem sys(e.graph, e.data, prm);
  sys.set_theta_star(e.theta_star);
  const int Nn = sys.num_agents() * sys.dim();
  std::mt19937 rng(13);
  const Eigen::VectorXd theta = randn(rng, Nn);
  const Eigen::VectorXd p = randn(rng, Nn);
  const Eigen::VectorXd x = sys.pack_state(
      RestartMode::Centralized, theta, p,
      Eigen::VectorXd::Constant(sys.num_agents(), 0.4), 0.0);
  CHECK((sys.theta_of(RestartMode::Centralized, x) - theta).norm() == 0.0);
  CHECK((sys.p_of(RestartMode::Centralized, x) - p).norm() == 0.0);
  CHECK(sys.tau_of(RestartMode::Centralized, x)(2) == doctest::Approx(0.4));

  const HybridSpec spec = sys.make_spec(RestartMode::Centralized);
  const Eigen::VectorXd dx = spec.flow(x, 0.0);
  CHECK((dx.segment(0, Nn) - (2.0 / 0.4) * (p - theta)).norm() <= 1e-12);
  CHECK(dx(2 * Nn) == doctest::Approx(prm.omega));
  CHECK(dx(2 * Nn + 1) == doctest::Approx(1.0));

  // At the guard, the jump restarts momentum and timer.
  Eigen::VectorXd xg = x;
  xg(2 * Nn) = prm.T;
  REQUIRE(spec.in_jump_set(xg));
  const Eigen::VectorXd xp = spec.jump(xg);
  CHECK((xp.segment(Nn, Nn) - theta).norm() == 0.0);
  CHECK(xp(2 * Nn) == doctest::Approx(prm.T0));
  CHECK((xp.segment(0, Nn) - theta).norm() == 0.0);
}

TEST_CASE("selective restart policies keep unselected momenta") {
  const EstimationInstance e = build_contraction_instance();
  DMCLParams prm = e.params;
  prm.T = 1.0;
  prm.eta = {1, 0, 1};
  DmclSystem sys(e.graph, e.data, prm);
  const int n = sys.dim();
  const int Nn = sys.num_agents() * n;
  std::mt19937 rng(14);
  const Eigen::VectorXd theta = randn(rng, Nn);
  const Eigen::VectorXd p = randn(rng, Nn);
  Eigen::VectorXd x = sys.pack_state(
      RestartMode::Centralized, theta, p,
      Eigen::VectorXd::Constant(sys.num_agents(), prm.T), 0.0);
  const Eigen::VectorXd xp = sys.make_spec(RestartMode::Centralized).jump(x);
  CHECK((xp.segment(Nn, n) - theta.segment(0, n)).norm() == 0.0);
  CHECK((xp.segment(Nn + n, n) - p.segment(n, n)).norm() == 0.0);
  CHECK((xp.segment(Nn + 2 * n, n) - theta.segment(2 * n, n)).norm() == 0.0);
}

TEST_CASE("coordination reset map") {
  CHECK(coordination_reset(0.2, 0.3, 0.1, 1.0) == doctest::Approx(0.1));
  CHECK(coordination_reset(0.4, 0.3, 0.1, 1.0) == doctest::Approx(1.0));
  // A tie resolves to the fresh timer.
  CHECK(coordination_reset(0.3, 0.3, 0.1, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("threshold validation") {
  const EstimationInstance e = build_contraction_instance();
  DMCLParams prm = e.params;
  prm.T = 1.0;
  prm.r = {0.0, 0.0, 0.0};  // below T0: invalid
  DmclSystem sys(e.graph, e.data, prm);
  CHECK_THROWS_AS(sys.make_spec(RestartMode::Decentralized), ConfigError);
  prm.r = DMCLParams::default_thresholds(prm.T0, prm.T, 3);
  DmclSystem ok(e.graph, e.data, prm);
  CHECK_NOTHROW(ok.make_spec(RestartMode::Decentralized));
}

TEST_CASE("decentralized run from synchronized timers matches centralized") {
  const EstimationInstance e = build_contraction_instance();
  DMCLParams prm = e.params;
  prm.T = 1.23;
  prm.r = DMCLParams::default_thresholds(prm.T0, prm.T, 3);
  DmclSystem sys(e.graph, e.data, prm);
  sys.set_theta_star(e.theta_star);
  const int Nn = sys.num_agents() * sys.dim();
  Eigen::VectorXd theta0(Nn);
  for (int i = 0; i < sys.num_agents(); ++i)
    theta0.segment(i * sys.dim(), sys.dim()) =
        e.theta_star + Eigen::VectorXd::Ones(sys.dim());
  const Eigen::VectorXd tau0 =
      Eigen::VectorXd::Constant(sys.num_agents(), prm.T0);
  SolveOptions opts;
  opts.t_max = 8.0;
  opts.step = 1e-3;
  const HybridArc cen =
      solve(sys.make_spec(RestartMode::Centralized),
            sys.pack_state(RestartMode::Centralized, theta0, theta0, tau0, 0.0),
            opts);
  const HybridArc dec = solve(
      sys.make_spec(RestartMode::Decentralized),
      sys.pack_state(RestartMode::Decentralized, theta0, theta0, tau0, 0.0),
      opts);
  const Eigen::VectorXd tc = sys.theta_of(RestartMode::Centralized, cen.back().x);
  const Eigen::VectorXd td =
      sys.theta_of(RestartMode::Decentralized, dec.back().x);
  CHECK((tc - td).norm() <= 1e-8);
  // One cascade per restart instant: N jumps for every centralized jump.
  CHECK(dec.back().j == sys.num_agents() * cen.back().j);
}

TEST_CASE("distance to the synchronization set") {
  const double T0 = 0.1, T = 1.0;
  Eigen::VectorXd tau(3);
  tau << 0.5, 0.5, 0.5;
  CHECK(dist_to_sync_set(tau, T0, T) == doctest::Approx(0.0));
  tau << T0, T, T0;
  CHECK(dist_to_sync_set(tau, T0, T) == doctest::Approx(0.0));
  tau << 0.5, 0.6, 0.5;
  CHECK(dist_to_sync_set(tau, T0, T) > 0.01);
}
