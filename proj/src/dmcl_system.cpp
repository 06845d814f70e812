#include "dmcl/dmcl_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmcl {

void DMCLParams::validate(int n_agents, bool decentralized) const {
  if (!(T0 > 0.0) || !(T > T0)) throw ConfigError("need 0 < T0 < T");
  if (!(omega > 0.0 && omega < 1.0)) throw ConfigError("omega must be in (0,1)");
  if (k_r <= 0.0) throw ConfigError("k_r must be positive");
  if (k_t < 0.0) throw ConfigError("k_t must be nonnegative");
  if (k_c <= 0.0) throw ConfigError("k_c must be positive");
  if (k_a <= 0.0) throw ConfigError("k_a must be positive");
  if (!eta.empty() && static_cast<int>(eta.size()) != n_agents)
    throw ConfigError("eta length must equal the agent count");
  if (decentralized) {
    if (static_cast<int>(r.size()) != n_agents)
      throw ConfigError("decentralized mode needs one threshold r_i per agent");
    const double hi = T0 + (T - T0) / std::max(1, n_agents - 1);
    for (double ri : r)
      if (!(ri > T0 && ri < hi))
        throw ConfigError("thresholds must satisfy T0 < r_i < T0 + (T-T0)/(N-1)");
  }
}

std::vector<double> DMCLParams::default_thresholds(double T0, double T, int n) {
  const double hi = T0 + (T - T0) / std::max(1, n - 1);
  return std::vector<double>(n, 0.5 * (T0 + hi));
}

double coordination_reset(double tau_j, double r_j, double T0, double T) {
  if (tau_j > r_j) return T;
  return T0;  // tau_j < r_j, and the tie resolves to T0
}

DmclSystem::DmclSystem(const Digraph& g, const NetworkData& data,
                       const DMCLParams& prm)
    : n_agents_(g.nodes()), dim_(data.dim()), prm_(prm), data_(data) {
  if (data.num_agents() != n_agents_)
    throw DataError("dataset agent count does not match the graph");
  L_ = build_laplacian(g);
  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(dim_, dim_);
  Lbig_ = Eigen::MatrixXd::Zero(n_agents_ * dim_, n_agents_ * dim_);
  for (int i = 0; i < n_agents_; ++i)
    for (int j = 0; j < n_agents_; ++j)
      Lbig_.block(i * dim_, j * dim_, dim_, dim_) = L_(i, j) * In;
  Delta_ = data.delta_block();
  for (int i = 0; i < n_agents_; ++i) {
    Di_.push_back(Delta_.block(i * dim_, i * dim_, dim_, dim_));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_);
    for (const auto& s : data.agents[i].samples) b.noalias() += s.phi * s.psi;
    bi_.push_back(b);
  }
  if (prm_.eta.empty()) prm_.eta.assign(n_agents_, 1);
}

void DmclSystem::set_regressors(std::vector<Regressor> regs) { regs_ = std::move(regs); }
void DmclSystem::set_theta_star(const Eigen::VectorXd& theta_star) {
  theta_star_ = theta_star;
}
void DmclSystem::set_upsilon(std::function<double(int, double)> upsilon) {
  upsilon_ = std::move(upsilon);
}
void DmclSystem::set_disturbance(std::function<Eigen::VectorXd(double)> U) {
  dist_ = std::move(U);
}

Eigen::VectorXd DmclSystem::lambda_map(int agent, const Eigen::VectorXd& theta_i,
                                       double s) const {
  // k_r Phi_i: recorded-data residual sum, cached as Delta_i theta - b_i.
  Eigen::VectorXd out = prm_.k_r * (Di_[agent] * theta_i - bi_[agent]);
  if (prm_.k_t != 0.0) {
    // k_t Psi_i: real-time residual; needs the regressor and true psi*.
    if (static_cast<int>(regs_.size()) <= agent || !theta_star_)
      throw DataError("real-time term needs regressors and theta_star");
    const Eigen::VectorXd phi = regs_[agent].eval(s);
    double psi_star = phi.dot(theta_star_->segment(0, dim_));
    if (upsilon_) psi_star += upsilon_(agent + 1, s);
    out.noalias() += prm_.k_t * phi * (phi.dot(theta_i) - psi_star);
  }
  return out;
}

Eigen::VectorXd DmclSystem::learning_field(const Eigen::VectorXd& theta,
                                           double s) const {
  Eigen::VectorXd out(n_agents_ * dim_);
  for (int i = 0; i < n_agents_; ++i)
    out.segment(i * dim_, dim_) = lambda_map(i, theta.segment(i * dim_, dim_), s);
  out.noalias() += prm_.k_c * (Lbig_ * theta);
  return out;
}

int DmclSystem::state_size(RestartMode mode) const {
  const int Nn = n_agents_ * dim_;
  switch (mode) {
    case RestartMode::Centralized:
    case RestartMode::None:
      return 2 * Nn + 2;
    case RestartMode::Decentralized:
      return 2 * Nn + n_agents_ + 1;
    case RestartMode::FirstOrder:
      return Nn + 1;
  }
  return 0;
}

Eigen::VectorXd DmclSystem::pack_state(RestartMode mode,
                                       const Eigen::VectorXd& theta0,
                                       const Eigen::VectorXd& p0,
                                       const Eigen::VectorXd& tau0,
                                       double s0) const {
  const int Nn = n_agents_ * dim_;
  Eigen::VectorXd x(state_size(mode));
  x.segment(0, Nn) = theta0;
  if (mode == RestartMode::FirstOrder) {
    x(Nn) = s0;
    return x;
  }
  x.segment(Nn, Nn) = p0;
  if (mode == RestartMode::Decentralized) {
    x.segment(2 * Nn, n_agents_) = tau0;
    x(2 * Nn + n_agents_) = s0;
  } else {
    x(2 * Nn) = tau0(0);
    x(2 * Nn + 1) = s0;
  }
  return x;
}

Eigen::VectorXd DmclSystem::theta_of(RestartMode, const Eigen::VectorXd& x) const {
  return x.segment(0, n_agents_ * dim_);
}

Eigen::VectorXd DmclSystem::p_of(RestartMode mode, const Eigen::VectorXd& x) const {
  const int Nn = n_agents_ * dim_;
  if (mode == RestartMode::FirstOrder) return Eigen::VectorXd::Zero(Nn);
  return x.segment(Nn, Nn);
}

Eigen::VectorXd DmclSystem::tau_of(RestartMode mode, const Eigen::VectorXd& x) const {
  const int Nn = n_agents_ * dim_;
  switch (mode) {
    case RestartMode::Decentralized:
      return x.segment(2 * Nn, n_agents_);
    case RestartMode::Centralized:
    case RestartMode::None:
      return Eigen::VectorXd::Constant(n_agents_, x(2 * Nn));
    case RestartMode::FirstOrder:
      return Eigen::VectorXd::Zero(n_agents_);
  }
  return {};
}

double DmclSystem::error_norm(RestartMode mode, const Eigen::VectorXd& x) const {
  if (!theta_star_) throw DataError("error_norm needs theta_star");
  const int Nn = n_agents_ * dim_;
  Eigen::VectorXd err = x.segment(0, Nn);
  for (int i = 0; i < n_agents_; ++i) err.segment(i * dim_, dim_) -= *theta_star_;
  return err.norm();
}

Eigen::VectorXd DmclSystem::flow_centralized(const Eigen::VectorXd& x, double t,
                                             bool timer_active) const {
  const int Nn = n_agents_ * dim_;
  const Eigen::VectorXd theta = x.segment(0, Nn);
  const Eigen::VectorXd p = x.segment(Nn, Nn);
  const double tau = x(2 * Nn);
  const double s = x(2 * Nn + 1);
  Eigen::VectorXd dx(x.size());
  dx.segment(0, Nn) = (2.0 / tau) * (p - theta);
  dx.segment(Nn, Nn) = -2.0 * tau * learning_field(theta, s);
  if (dist_) dx.segment(Nn, Nn).noalias() += 2.0 * tau * dist_(t);
  dx(2 * Nn) = prm_.omega;
  (void)timer_active;
  dx(2 * Nn + 1) = 1.0;
  dx *= prm_.k_a;
  return dx;
}

Eigen::VectorXd DmclSystem::flow_decentralized(const Eigen::VectorXd& x,
                                               double t) const {
  const int Nn = n_agents_ * dim_;
  const Eigen::VectorXd theta = x.segment(0, Nn);
  const Eigen::VectorXd p = x.segment(Nn, Nn);
  const double s = x(2 * Nn + n_agents_);
  Eigen::VectorXd dx(x.size());
  const Eigen::VectorXd field = learning_field(theta, s);
  for (int i = 0; i < n_agents_; ++i) {
    const double tau_i = x(2 * Nn + i);
    dx.segment(i * dim_, dim_) =
        (2.0 / tau_i) * (p.segment(i * dim_, dim_) - theta.segment(i * dim_, dim_));
    dx.segment(Nn + i * dim_, dim_) = -2.0 * tau_i * field.segment(i * dim_, dim_);
    dx(2 * Nn + i) = prm_.omega;
  }
  dx(2 * Nn + n_agents_) = 1.0;
  dx *= prm_.k_a;
  return dx;
}

Eigen::VectorXd DmclSystem::flow_first_order(const Eigen::VectorXd& x,
                                             double t) const {
  const int Nn = n_agents_ * dim_;
  const Eigen::VectorXd theta = x.segment(0, Nn);
  const double s = x(Nn);
  Eigen::VectorXd dx(x.size());
  dx.segment(0, Nn) = -learning_field(theta, s);
  dx(Nn) = 1.0;
  dx *= prm_.k_a;
  return dx;
}

Eigen::VectorXd DmclSystem::jump_centralized(const Eigen::VectorXd& x) const {
  const int Nn = n_agents_ * dim_;
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n_agents_; ++i) {
    if (prm_.eta[i] == 1)
      xp.segment(Nn + i * dim_, dim_) = x.segment(i * dim_, dim_);
  }
  xp(2 * Nn) = prm_.T0;
  return xp;
}

Eigen::VectorXd DmclSystem::jump_decentralized(const Eigen::VectorXd& x) const {
  const int Nn = n_agents_ * dim_;
  // Lowest-index agent at the threshold triggers.
  int trig = -1;
  for (int i = 0; i < n_agents_; ++i) {
    if (x(2 * Nn + i) >= prm_.T - 1e-9) {
      trig = i;
      break;
    }
  }
  if (trig < 0) throw VerifyError("decentralized jump called off the jump set");
  Eigen::VectorXd xp = x;
  xp.segment(Nn + trig * dim_, dim_) = x.segment(trig * dim_, dim_);  // p_i+ = theta_i
  xp(2 * Nn + trig) = prm_.T0;
  for (int jn = 0; jn < n_agents_; ++jn) {
    if (jn == trig) continue;
    if (L_(trig, jn) != 0.0)  // out-neighbor of the trigger
      xp(2 * Nn + jn) = coordination_reset(x(2 * Nn + jn), prm_.r[jn], prm_.T0, prm_.T);
  }
  return xp;
}

HybridSpec DmclSystem::make_spec(RestartMode mode) const {
  prm_.validate(n_agents_, mode == RestartMode::Decentralized);
  const int Nn = n_agents_ * dim_;
  HybridSpec spec;
  spec.per_instant_jump_cap = n_agents_ + 1;
  switch (mode) {
    case RestartMode::Centralized:
      spec.flow = [this](const Eigen::VectorXd& x, double t) {
        return flow_centralized(x, t, true);
      };
      spec.in_jump_set = [this, Nn](const Eigen::VectorXd& x) {
        return x(2 * Nn) >= prm_.T - 1e-9;
      };
      spec.jump = [this](const Eigen::VectorXd& x) { return jump_centralized(x); };
      spec.time_to_guard = [this, Nn](const Eigen::VectorXd& x) {
        return guard_time(x(2 * Nn), prm_.omega * prm_.k_a, prm_.T);
      };
      break;
    case RestartMode::None:
      spec.flow = [this](const Eigen::VectorXd& x, double t) {
        return flow_centralized(x, t, true);
      };
      break;
    case RestartMode::Decentralized:
      spec.flow = [this](const Eigen::VectorXd& x, double t) {
        return flow_decentralized(x, t);
      };
      spec.in_jump_set = [this, Nn](const Eigen::VectorXd& x) {
        return x.segment(2 * Nn, n_agents_).maxCoeff() >= prm_.T - 1e-9;
      };
      spec.jump = [this](const Eigen::VectorXd& x) { return jump_decentralized(x); };
      spec.time_to_guard = [this, Nn](const Eigen::VectorXd& x) {
        return guard_time(x.segment(2 * Nn, n_agents_).maxCoeff(),
                          prm_.omega * prm_.k_a, prm_.T);
      };
      break;
    case RestartMode::FirstOrder:
      spec.flow = [this](const Eigen::VectorXd& x, double t) {
        return flow_first_order(x, t);
      };
      break;
  }
  if (theta_star_) {
    spec.diag_names = {"err_norm"};
    spec.diagnostics = [this, mode](const Eigen::VectorXd& x, double,
                                    std::vector<double>& d) {
      d[0] = error_norm(mode, x);
    };
  }
  return spec;
}

double dist_to_sync_set(const Eigen::VectorXd& tau, double T0, double T) {
  // Branch 1: all timers equal, each in [T0, T].
  double mean = tau.mean();
  const double clamped = std::min(T, std::max(T0, mean));
  double d1 = (tau.array() - clamped).matrix().norm();
  // Branch 2: each timer at an endpoint.
  double d2sq = 0.0;
  for (int i = 0; i < tau.size(); ++i) {
    const double d = std::min(std::abs(tau(i) - T0), std::abs(tau(i) - T));
    d2sq += d * d;
  }
  return std::min(d1, std::sqrt(d2sq));
}

SyncReport sync_check(const HybridArc& arc, const DmclSystem& sys) {
  const double T0 = sys.params().T0;
  const double T = sys.params().T;
  SyncReport rep;
  const double tol = 1e-7;
  // Find the first sample from which the timers stay in A_sync.
  std::size_t first_good = arc.samples.size();
  for (std::size_t i = arc.samples.size(); i-- > 0;) {
    const Eigen::VectorXd tau =
        sys.tau_of(RestartMode::Decentralized, arc.samples[i].x);
    if (dist_to_sync_set(tau, T0, T) <= tol)
      first_good = i;
    else
      break;
  }
  if (first_good < arc.samples.size()) {
    rep.synchronized = true;
    rep.t_sync = arc.samples[first_good].t;
    rep.j_sync = arc.samples[first_good].j;
    double worst = 0.0;
    for (std::size_t i = first_good; i < arc.samples.size(); ++i) {
      const Eigen::VectorXd tau =
          sys.tau_of(RestartMode::Decentralized, arc.samples[i].x);
      worst = std::max(worst, dist_to_sync_set(tau, T0, T));
    }
    rep.worst_distance = worst;
  }
  return rep;
}

}  // namespace dmcl
