#include "dmcl/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dmcl {

Regressor exp_regressor(int agent_id) {
  Regressor r;
  r.dim = 3;
  // sup over s >= 0 of |(1, 10 e^{-is}, 100 e^{-2is})| is attained at s = 0.
  r.phi_bar = std::sqrt(1.0 + 100.0 + 10000.0);
  r.eval = [agent_id](double s) {
    Eigen::VectorXd v(3);
    v << 1.0, 10.0 * std::exp(-agent_id * s), 100.0 * std::exp(-2.0 * agent_id * s);
    return v;
  };
  return r;
}

Eigen::MatrixXd AgentDataset::data_matrix() const {
  if (samples.empty()) return Eigen::MatrixXd::Zero(0, 0);
  const int n = static_cast<int>(samples.front().phi.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : samples) {
    if (s.phi.size() != n) throw DataError("inconsistent regressor dimension");
    D.noalias() += s.phi * s.phi.transpose();
  }
  return D;
}

int NetworkData::dim() const {
  for (const auto& a : agents)
    if (!a.samples.empty()) return static_cast<int>(a.samples.front().phi.size());
  throw DataError("dataset has no samples");
}

int NetworkData::max_samples() const {
  int m = 0;
  for (const auto& a : agents) m = std::max(m, static_cast<int>(a.samples.size()));
  return m;
}

Eigen::MatrixXd NetworkData::delta_block() const {
  const int n = dim();
  const int N = num_agents();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    const Eigen::MatrixXd Di = agents[i].data_matrix();
    if (Di.rows() == n) D.block(i * n, i * n, n, n) = Di;
  }
  return D;
}

double NetworkData::csr_level() const {
  const int n = dim();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : agents) {
    const Eigen::MatrixXd Di = a.data_matrix();
    if (Di.rows() == n) S += Di;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return es.eigenvalues().minCoeff();
}

double NetworkData::sigma_delta_max() const {
  double m = 0.0;
  for (const auto& a : agents) {
    const Eigen::MatrixXd Di = a.data_matrix();
    if (Di.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Di);
      m = std::max(m, es.eigenvalues().maxCoeff());
    }
  }
  return m;
}

NetworkData NetworkData::read(std::istream& in) {
  NetworkData d;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    int agent, k;
    if (!(ls >> agent >> k)) throw DataError("bad dataset line: " + line);
    while (ls >> v) vals.push_back(v);
    if (vals.size() < 4) throw DataError("dataset line too short: " + line);
    RecordedSample s;
    s.t = vals[0];
    const int n = static_cast<int>(vals.size()) - 3;
    s.phi = Eigen::Map<Eigen::VectorXd>(vals.data() + 1, n);
    s.psi = vals[vals.size() - 2];
    s.nu = vals[vals.size() - 1];
    while (static_cast<int>(d.agents.size()) < agent) {
      AgentDataset a;
      a.agent_id = static_cast<int>(d.agents.size()) + 1;
      d.agents.push_back(a);
    }
    d.agents[agent - 1].samples.push_back(std::move(s));
  }
  if (d.agents.empty()) throw DataError("empty dataset");
  return d;
}

NetworkData NetworkData::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return read(in);
}

void NetworkData::write(std::ostream& out) const {
  out << "# agent k t phi... psi nu\n";
  out << std::setprecision(17);
  for (const auto& a : agents) {
    int k = 1;
    for (const auto& s : a.samples) {
      out << a.agent_id << ' ' << k++ << ' ' << s.t;
      for (int i = 0; i < s.phi.size(); ++i) out << ' ' << s.phi(i);
      out << ' ' << s.psi << ' ' << s.nu << '\n';
    }
  }
}

void NetworkData::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path);
  write(out);
}

AgentDataset synthesize_dataset(const Regressor& reg, int agent_id,
                                const Eigen::VectorXd& theta_star,
                                const std::vector<double>& sample_times,
                                const std::vector<double>& noise) {
  if (theta_star.size() != reg.dim)
    throw DataError("theta_star dimension does not match regressor");
  AgentDataset a;
  a.agent_id = agent_id;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    RecordedSample s;
    s.t = sample_times[k];
    s.phi = reg.eval(s.t);
    s.nu = k < noise.size() ? noise[k] : 0.0;
    s.psi = s.phi.dot(theta_star) + s.nu;
    a.samples.push_back(std::move(s));
  }
  return a;
}

Eigen::VectorXd assemble_U(const NetworkData& data,
                           const std::vector<Regressor>& regs,
                           const std::function<double(int, double)>& upsilon,
                           double tau, double k_t, double k_rec, double t) {
  const int n = data.dim();
  const int N = data.num_agents();
  Eigen::VectorXd U = Eigen::VectorXd::Zero(N * n);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd block = Eigen::VectorXd::Zero(n);
    if (k_t != 0.0 && upsilon) {
      if (static_cast<int>(regs.size()) <= i) throw DataError("missing regressor");
      block.noalias() += -2.0 * tau * k_t * upsilon(i + 1, t) * regs[i].eval(t);
    }
    for (const auto& s : data.agents[i].samples)
      block.noalias() += k_rec * s.nu * s.phi;
    U.segment(i * n, n) = block;
  }
  return U;
}

}  // namespace dmcl
