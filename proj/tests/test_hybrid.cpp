#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dmcl/hybrid.hpp"

using namespace dmcl;

namespace {

HybridSpec decay_spec() {
  HybridSpec spec;
  spec.flow = [](const Eigen::VectorXd& x, double) {
    return Eigen::VectorXd(-x);
  };
  return spec;
}

}  // namespace

TEST_CASE("integrator reproduces exp(-t) and shows fourth-order convergence") {
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  SolveOptions opts;
  opts.t_max = 1.0;

  opts.step = 1e-3;
  const HybridArc fine = solve(decay_spec(), x0, opts);
  CHECK(std::abs(fine.back().x(0) - std::exp(-1.0)) <= 1e-8);

  opts.step = 0.1;
  const double e1 = std::abs(solve(decay_spec(), x0, opts).back().x(0) -
                             std::exp(-1.0));
  opts.step = 0.05;
  const double e2 = std::abs(solve(decay_spec(), x0, opts).back().x(0) -
                             std::exp(-1.0));
  // Halving the step must reduce the error by at least 2^3.5.
  CHECK(e1 / e2 >= std::pow(2.0, 3.5));
}

TEST_CASE("timer guard produces the closed-form jump count") {
  const double T0 = 0.1, T = 0.7, om = 0.5, t_max = 10.0;
  HybridSpec spec;
  spec.flow = [om](const Eigen::VectorXd&, double) {
    Eigen::VectorXd d(1);
    d << om;
    return d;
  };
  spec.in_jump_set = [T](const Eigen::VectorXd& x) { return x(0) >= T - 1e-9; };
  spec.jump = [T0](const Eigen::VectorXd&) {
    Eigen::VectorXd x(1);
    x << T0;
    return x;
  };
  spec.time_to_guard = [&](const Eigen::VectorXd& x) {
    return guard_time(x(0), om, T);
  };
  Eigen::VectorXd x0(1);
  x0 << T0;
  SolveOptions opts;
  opts.t_max = t_max;
  opts.step = 1e-2;
  const HybridArc arc = solve(spec, x0, opts);
  // tau runs T0 -> T in (T - T0)/om seconds, repeatedly.
  const int expected = static_cast<int>(std::floor(om * t_max / (T - T0)));
  CHECK(arc.back().j == expected);
  CHECK_NOTHROW(arc.check_well_formed());

  // j_max truncates the arc.
  opts.j_max = 3;
  CHECK(solve(spec, x0, opts).back().j == 3);
}

TEST_CASE("guard landing is exact, not step-quantized") {
  const double T0 = 0.1, T = 0.30001, om = 1.0;
  HybridSpec spec;
  spec.flow = [](const Eigen::VectorXd&, double) {
    Eigen::VectorXd d(1);
    d << 1.0;
    return d;
  };
  spec.in_jump_set = [T](const Eigen::VectorXd& x) { return x(0) >= T - 1e-9; };
  spec.jump = [T0](const Eigen::VectorXd&) {
    Eigen::VectorXd x(1);
    x << T0;
    return x;
  };
  spec.time_to_guard = [&](const Eigen::VectorXd& x) {
    return guard_time(x(0), om, T);
  };
  Eigen::VectorXd x0(1);
  x0 << T0;
  SolveOptions opts;
  opts.t_max = 0.5;
  opts.step = 1e-2;  // the period is not a multiple of the step
  const HybridArc arc = solve(spec, x0, opts);
  REQUIRE(!arc.jump_indices.empty());
  REQUIRE(arc.jump_indices[0] >= 1);
  // jump_indices point at post-jump samples; the pre-jump one precedes it.
  const auto& pre = arc.samples[arc.jump_indices[0] - 1];
  CHECK(pre.x(0) == doctest::Approx(T).epsilon(1e-12));
  CHECK(pre.t == doctest::Approx(T - T0).epsilon(1e-12));
}

TEST_CASE("stationary jump cascades raise a divergence error") {
  HybridSpec spec;
  spec.flow = [](const Eigen::VectorXd& x, double) {
    return Eigen::VectorXd::Zero(x.size()).eval();
  };
  spec.in_jump_set = [](const Eigen::VectorXd&) { return true; };
  spec.jump = [](const Eigen::VectorXd& x) { return x; };
  Eigen::VectorXd x0(1);
  x0 << 0.0;
  SolveOptions opts;
  CHECK_THROWS_AS(solve(spec, x0, opts), DivergenceError);
}

TEST_CASE("non-finite states raise a divergence error") {
  HybridSpec spec;
  spec.flow = [](const Eigen::VectorXd& x, double) {
    return Eigen::VectorXd(100.0 * x);
  };
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  SolveOptions opts;
  opts.t_max = 100.0;
  opts.step = 1.0;  // wildly unstable on purpose
  CHECK_THROWS_AS(solve(spec, x0, opts), DivergenceError);
}

TEST_CASE("solutions are deterministic") {
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  SolveOptions opts;
  opts.t_max = 2.0;
  opts.step = 1e-3;
  const HybridArc a = solve(decay_spec(), x0, opts);
  const HybridArc b = solve(decay_spec(), x0, opts);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(a.samples[i].x == b.samples[i].x);
  }
}

TEST_CASE("CSV export carries header, states and diagnostics") {
  HybridSpec spec = decay_spec();
  spec.diag_names = {"norm"};
  spec.diagnostics = [](const Eigen::VectorXd& x, double,
                        std::vector<double>& d) { d[0] = x.norm(); };
  Eigen::VectorXd x0(2);
  x0 << 1.0, -1.0;
  SolveOptions opts;
  opts.t_max = 0.1;
  opts.step = 1e-2;
  const HybridArc arc = solve(spec, x0, opts);
  const std::string path = "test_arc.csv";
  arc.write_csv(path);
  std::ifstream f(path);
  std::string header;
  REQUIRE(std::getline(f, header));
  CHECK(header == "t,j,state_0,state_1,diag_norm");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == arc.samples.size());
  std::remove(path.c_str());
}
