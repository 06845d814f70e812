#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "dmcl/apps.hpp"
#include "dmcl/dataset.hpp"

using namespace dmcl;

TEST_CASE("exponential regressor values and bound") {
  const Regressor r2 = exp_regressor(2);
  const Eigen::VectorXd v = r2.eval(0.5);
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(v(1) == doctest::Approx(10.0 * std::exp(-1.0)));
  CHECK(v(2) == doctest::Approx(100.0 * std::exp(-2.0)));
  CHECK(r2.phi_bar == doctest::Approx(std::sqrt(10101.0)));
  CHECK(r2.eval(0.0).norm() <= r2.phi_bar + 1e-12);
}

TEST_CASE("synthesized measurements and richness quantities") {
  const Eigen::Vector3d star(1.0, -2.0, 1.0);
  NetworkData data;
  for (int i = 1; i <= 3; ++i)
    data.agents.push_back(synthesize_dataset(exp_regressor(i), i, star,
                                             {0.0, 0.5, 1.0, 1.5, 2.0}));
  CHECK(data.num_agents() == 3);
  CHECK(data.dim() == 3);
  CHECK(data.max_samples() == 5);
  for (const auto& ag : data.agents)
    for (const auto& s : ag.samples)
      CHECK(s.psi == doctest::Approx(s.phi.dot(star)));

  // csr level equals lambda_min of the summed data matrices.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 3);
  for (const auto& ag : data.agents) S += ag.data_matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  CHECK(data.csr_level() == doctest::Approx(es.eigenvalues().minCoeff()));

  // block structure
  const Eigen::MatrixXd D = data.delta_block();
  CHECK(D.rows() == 9);
  CHECK((D.block(0, 0, 3, 3) - data.agents[0].data_matrix()).norm() <= 1e-14);
  CHECK(D.block(0, 3, 3, 3).norm() == 0.0);
}

TEST_CASE("dataset file round trip is exact") {
  const NetworkData data = build_estimation(false).data;
  const std::string tmp = "test_roundtrip.data";
  data.save(tmp);
  const NetworkData back = NetworkData::load(tmp);
  REQUIRE(back.num_agents() == data.num_agents());
  for (int i = 0; i < data.num_agents(); ++i) {
    REQUIRE(back.agents[i].samples.size() == data.agents[i].samples.size());
    for (std::size_t k = 0; k < data.agents[i].samples.size(); ++k) {
      const auto& a = data.agents[i].samples[k];
      const auto& b = back.agents[i].samples[k];
      CHECK(a.t == b.t);
      CHECK((a.phi - b.phi).norm() == 0.0);
      CHECK(a.psi == b.psi);
      CHECK(a.nu == b.nu);
    }
  }
  std::remove(tmp.c_str());
}

TEST_CASE("checked-in data files match the generators") {
  REQUIRE(std::filesystem::exists("configs/data/estimation.data"));
  const NetworkData file = NetworkData::load("configs/data/estimation.data");
  const NetworkData gen = build_estimation(false).data;
  REQUIRE(file.num_agents() == gen.num_agents());
  CHECK((file.delta_block() - gen.delta_block()).norm() <= 1e-12);
  CHECK(file.csr_level() == doctest::Approx(5.5).epsilon(1e-9));

  const NetworkData mfile = NetworkData::load("configs/data/mrac.data");
  const NetworkData mgen = build_mrac().data;
  CHECK((mfile.delta_block() - mgen.delta_block()).norm() <= 1e-12);
}

TEST_CASE("malformed data lines are rejected") {
  std::istringstream bad("1 1 0.0 1.0 2.0\n");  // too few fields for any dim
  CHECK_THROWS_AS(NetworkData::read(bad), DataError);
}
