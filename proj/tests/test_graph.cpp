#include <doctest.h>

#include <sstream>

#include "dmcl/graph.hpp"

using namespace dmcl;

TEST_CASE("cycle and complete laplacians") {
  const Digraph c = Digraph::cycle(4);
  const Eigen::MatrixXd L = build_laplacian(c);
  CHECK(L(0, 0) == doctest::Approx(1.0));
  CHECK(L(0, 1) == doctest::Approx(-1.0));
  CHECK(L(0, 2) == doctest::Approx(0.0));
  CHECK(L.rowwise().sum().norm() == doctest::Approx(0.0));

  const Digraph k = Digraph::complete(3, 2.0);
  const Eigen::MatrixXd Lk = build_laplacian(k);
  CHECK(Lk(0, 0) == doctest::Approx(4.0));
  CHECK(Lk(1, 0) == doctest::Approx(-2.0));
}

TEST_CASE("validation rejects malformed graphs") {
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(g.validate(), GraphError);
  g.adj = Eigen::MatrixXd::Zero(2, 2);
  g.adj(0, 1) = -1.0;
  CHECK_THROWS_AS(g.validate(), GraphError);
  g.adj(0, 1) = 1.0;
  g.adj(0, 0) = 0.5;
  CHECK_THROWS_AS(g.validate(), GraphError);
}

TEST_CASE("edge list parsing, 1-based, accumulating duplicates") {
  std::istringstream in(
      "# a comment\n"
      "1 2 1.0\n"
      "\n"
      "2 3 0.5\n"
      "3 1 2.0\n"
      "1 2 1.0\n");
  const Digraph g = Digraph::from_edge_list(in);
  CHECK(g.nodes() == 3);
  CHECK(g.adj(0, 1) == doctest::Approx(2.0));  // duplicate edge accumulated
  CHECK(g.adj(1, 2) == doctest::Approx(0.5));
  CHECK(g.adj(2, 0) == doctest::Approx(2.0));

  std::istringstream bad("0 2 1.0\n");
  CHECK_THROWS_AS(Digraph::from_edge_list(bad), GraphError);
}

TEST_CASE("strong connectivity detection") {
  CHECK(is_strongly_connected(Digraph::cycle(5)));
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(3, 3);
  g.adj(0, 1) = 1.0;
  g.adj(1, 2) = 1.0;  // no path back to node 0
  CHECK_FALSE(is_strongly_connected(g));
}

TEST_CASE("left null vector vs an independent kernel computation") {
  // Weighted strongly connected digraph.
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(3, 3);
  g.adj(0, 1) = 2.0;
  g.adj(1, 2) = 0.7;
  g.adj(2, 0) = 1.3;
  g.adj(2, 1) = 0.4;
  const Eigen::MatrixXd L = build_laplacian(g);
  const Eigen::VectorXd q = left_perron_vector(L);
  CHECK(q.minCoeff() > 0.0);
  CHECK(q.norm() == doctest::Approx(1.0));
  CHECK((q.transpose() * L).norm() <= 1e-10);

  // Independent method: LU kernel of L^T.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L.transpose());
  lu.setThreshold(1e-10);
  const Eigen::MatrixXd ker = lu.kernel();
  REQUIRE(ker.cols() == 1);
  Eigen::VectorXd q2 = ker.col(0).normalized();
  if (q2(0) < 0) q2 = -q2;
  CHECK((q - q2).norm() <= 1e-9);

  // Unit-weight cycle: uniform vector.
  const Eigen::VectorXd qc =
      left_perron_vector(build_laplacian(Digraph::cycle(5)));
  CHECK((qc - Eigen::VectorXd::Constant(5, 1.0 / std::sqrt(5.0))).norm() <=
        1e-12);
}
