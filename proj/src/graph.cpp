#include "dmcl/graph.hpp"

#include <Eigen/SVD>
#include <fstream>
#include <sstream>
#include <vector>

namespace dmcl {

void Digraph::validate() const {
  const int n = nodes();
  if (n < 2) throw GraphError("digraph needs at least 2 nodes");
  if (adj.cols() != n) throw GraphError("adjacency matrix must be square");
  for (int i = 0; i < n; ++i) {
    if (adj(i, i) != 0.0) throw GraphError("self-arcs are not allowed");
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) < 0.0) throw GraphError("edge weights must be nonnegative");
    }
  }
}

Digraph Digraph::cycle(int n, double weight) {
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) g.adj(i, (i + 1) % n) = weight;
  g.validate();
  return g;
}

Digraph Digraph::complete(int n, double weight) {
  Digraph g;
  g.adj = Eigen::MatrixXd::Constant(n, n, weight);
  g.adj.diagonal().setZero();
  g.validate();
  return g;
}

Digraph Digraph::from_edge_list(std::istream& in) {
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  int max_node = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Edge e{};
    if (!(ls >> e.i >> e.j >> e.w)) throw GraphError("bad edge-list line: " + line);
    if (e.i < 1 || e.j < 1) throw GraphError("edge-list indices are 1-based");
    max_node = std::max(max_node, std::max(e.i, e.j));
    edges.push_back(e);
  }
  if (max_node < 2) throw GraphError("edge list describes fewer than 2 nodes");
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(max_node, max_node);
  for (const auto& e : edges) g.adj(e.i - 1, e.j - 1) += e.w;
  g.validate();
  return g;
}

Digraph Digraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file: " + path);
  return from_edge_list(in);
}

Eigen::MatrixXd build_laplacian(const Digraph& g) {
  g.validate();
  Eigen::MatrixXd L = -g.adj;
  for (int i = 0; i < g.nodes(); ++i) L(i, i) = g.adj.row(i).sum();
  return L;
}

namespace {
void reach(const Eigen::MatrixXd& adj, int start, bool transpose,
           std::vector<bool>& seen) {
  std::vector<int> stack{start};
  seen.assign(adj.rows(), false);
  seen[start] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < adj.rows(); ++w) {
      const double a = transpose ? adj(w, v) : adj(v, w);
      if (a > 0.0 && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
}
}  // namespace

bool is_strongly_connected(const Digraph& g) {
  g.validate();
  std::vector<bool> seen;
  reach(g.adj, 0, false, seen);
  for (bool b : seen)
    if (!b) return false;
  reach(g.adj, 0, true, seen);
  for (bool b : seen)
    if (!b) return false;
  return true;
}

Eigen::VectorXd left_perron_vector(const Eigen::MatrixXd& L) {
  const int n = static_cast<int>(L.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.transpose(),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (n >= 2 && sv(n - 1) > 1e-10 * std::max(1.0, sv(0)))
    throw GraphError("Laplacian has no left null vector (graph error)");
  if (n >= 2 && sv(n - 2) <= 1e-10 * std::max(1.0, sv(0)))
    throw GraphError("left null space is not one-dimensional (graph not strongly connected)");
  Eigen::VectorXd q = svd.matrixV().col(n - 1);
  if (q.sum() < 0) q = -q;
  q.normalize();
  for (int i = 0; i < n; ++i) {
    if (q(i) <= 1e-12)
      throw GraphError("left Perron vector has a non-positive entry");
  }
  const double resid = (q.transpose() * L).norm();
  if (resid > 1e-10)
    throw GraphError("left null vector residual too large");
  return q;
}

}  // namespace dmcl
