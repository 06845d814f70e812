#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "dmcl/errors.hpp"

namespace dmcl {

// Weighted digraph without self-arcs. adj(i, j) is the weight of the edge
// from node i to node j (zero when absent).
struct Digraph {
  Eigen::MatrixXd adj;

  int nodes() const { return static_cast<int>(adj.rows()); }

  void validate() const;

  static Digraph cycle(int n, double weight = 1.0);
  static Digraph complete(int n, double weight = 1.0);

  // Text format: one "i j weight" triple per line, 1-based indices.
  // Lines starting with '#' and blank lines are ignored.
  static Digraph from_edge_list(std::istream& in);
  static Digraph load(const std::string& path);
};

// L with l_ij = -a_ij off-diagonal and zero row sums.
Eigen::MatrixXd build_laplacian(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

// Positive unit left null vector of L (smallest left singular vector of L,
// sign-normalized). Throws GraphError when the null space is not
// one-dimensional or an entry is numerically non-positive.
Eigen::VectorXd left_perron_vector(const Eigen::MatrixXd& L);

}  // namespace dmcl
