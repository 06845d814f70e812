#include "dmcl/lyapunov.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmcl {

namespace {

// diag(q) otimes I_n as an Nn-vector of diagonal entries.
Eigen::VectorXd q_diag(const Eigen::VectorXd& q, int dim) {
  Eigen::VectorXd d(q.size() * dim);
  for (int i = 0; i < q.size(); ++i) d.segment(i * dim, dim).setConstant(q(i));
  return d;
}

double quad_q(const Eigen::VectorXd& v, const Eigen::VectorXd& qd) {
  return (v.array().square() * qd.array()).sum();
}

}  // namespace

double lyapunov_value(const SpectralCertificate& cert,
                      const Eigen::VectorXd& theta_err,
                      const Eigen::VectorXd& p_err, double tau) {
  const Eigen::VectorXd qd = q_diag(cert.q, cert.dim);
  const Eigen::VectorXd x1 = p_err - theta_err;
  return 0.25 * quad_q(x1, qd) + 0.25 * quad_q(p_err, qd) +
         0.5 * tau * tau * theta_err.dot(cert.Sigma * theta_err);
}

SandwichConstants sandwich_constants(const SpectralCertificate& cert, double T) {
  SandwichConstants c;
  c.c_lower = 0.25 * std::min(cert.sigma_q_min,
                              2.0 * cert.sigma_sigma_min * cert.T0 * cert.T0);
  const double growth =
      T * T * (2.0 * cert.k_r * cert.sigma_q_max * cert.sigma_delta_max +
               cert.k_c * cert.lambdaN) +
      2.0 * cert.sigma_q_max;
  c.c_upper = 0.25 * std::max(3.0 * cert.sigma_q_max, growth);
  return c;
}

FlowConstants flow_constants(const SpectralCertificate& cert, double T,
                             double epsilon) {
  FlowConstants f;
  f.epsilon = epsilon;
  const double asym =
      cert.sigma_omega * cert.sigma_omega + cert.chi_kt * cert.chi_kt;
  const double num =
      (1.0 - cert.omega) * cert.sigma_sigma_min * cert.sigma_q_min -
      T * T * asym;
  const double den =
      T * T * (1.0 - cert.omega) * cert.sigma_sigma_min + cert.sigma_q_min;
  f.nu = num / den;
  f.applicable = f.nu > 0.0;
  if (!f.applicable) return f;
  const double c_bar = sandwich_constants(cert, T).c_upper;
  f.rho = (epsilon / (1.0 + epsilon)) * f.nu * cert.T0 / (3.0 * c_bar);
  const double g = cert.sigma_q_max * cert.phi_bar * T;
  f.gamma = (1.0 + epsilon) * (6.0 / (f.nu * cert.T0)) * g * g;
  return f;
}

double vw_lambda_min(const SpectralCertificate& cert,
                     const std::vector<Regressor>& regs, double tau, double s) {
  const int N = cert.n_nodes;
  const int n = cert.dim;
  const int Nn = N * n;
  Eigen::MatrixXd QA = Eigen::MatrixXd::Zero(Nn, Nn);
  if (cert.k_t != 0.0) {
    if (static_cast<int>(regs.size()) != N)
      throw DataError("vw_lambda_min needs one regressor per agent");
    for (int i = 0; i < N; ++i) {
      const Eigen::VectorXd phi = regs[i].eval(s);
      QA.block(i * n, i * n, n, n) = cert.q(i) * (phi * phi.transpose());
    }
  }
  const Eigen::VectorXd qd = q_diag(cert.q, n);
  Eigen::MatrixXd M(2 * Nn, 2 * Nn);
  M.topLeftCorner(Nn, Nn) =
      (qd / (tau * tau)).asDiagonal().toDenseMatrix();
  const Eigen::MatrixXd Ohat = cert.Omega + cert.k_t * QA;
  M.topRightCorner(Nn, Nn) = Ohat;
  M.bottomLeftCorner(Nn, Nn) = Ohat.transpose();
  M.bottomRightCorner(Nn, Nn) =
      (1.0 - cert.omega) * cert.Sigma + cert.k_t * QA;
  const Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ms);
  return es.eigenvalues().minCoeff();
}

VwReport vw_margin(const SpectralCertificate& cert,
                   const std::vector<Regressor>& regs, double T,
                   int tau_points, int s_points, double s_max) {
  VwReport rep;
  const FlowConstants f = flow_constants(cert, T);
  rep.applicable = f.applicable;
  rep.nu = f.nu;
  if (!rep.applicable) return rep;
  double worst = std::numeric_limits<double>::infinity();
  for (int a = 0; a < tau_points; ++a) {
    const double tau =
        cert.T0 + (T - cert.T0) * a / std::max(1, tau_points - 1);
    for (int b = 0; b < s_points; ++b) {
      const double s = s_max * b / std::max(1, s_points - 1);
      worst = std::min(worst, vw_lambda_min(cert, regs, tau, s) - f.nu);
      if (cert.k_t == 0.0) break;  // no s dependence without real-time terms
    }
  }
  rep.worst_margin = worst;
  rep.pass = worst >= -1e-9;
  return rep;
}

FlowCheckReport flow_decrease_check(const HybridArc& arc, const DmclSystem& sys,
                                    const SpectralCertificate& cert,
                                    double u_norm, double epsilon) {
  FlowCheckReport rep;
  const FlowConstants fc = flow_constants(cert, sys.params().T, epsilon);
  rep.applicable = fc.applicable;
  if (!rep.applicable) return rep;

  if (!sys.theta_star()) throw DataError("flow check needs theta_star");
  const int N = sys.num_agents();
  const int n = sys.dim();
  const int Nn = N * n;
  Eigen::VectorXd star(Nn);
  for (int i = 0; i < N; ++i) star.segment(i * n, n) = *sys.theta_star();

  const HybridSpec spec = sys.make_spec(RestartMode::Centralized);
  const Eigen::VectorXd qd = q_diag(cert.q, n);

  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> v_vals(arc.samples.size());
  for (std::size_t k = 0; k < arc.samples.size(); ++k) {
    const Eigen::VectorXd& x = arc.samples[k].x;
    const Eigen::VectorXd te = x.segment(0, Nn) - star;
    const Eigen::VectorXd pe = x.segment(Nn, Nn) - star;
    const double tau = x(2 * Nn);
    v_vals[k] = lyapunov_value(cert, te, pe, tau);
  }
  for (std::size_t k = 0; k < arc.samples.size(); ++k) {
    // Skip the pre-jump sample: the inequality is a flow property.
    if (k + 1 < arc.samples.size() &&
        arc.samples[k + 1].j != arc.samples[k].j)
      continue;
    const Eigen::VectorXd& x = arc.samples[k].x;
    const double t = arc.samples[k].t;
    const Eigen::VectorXd te = x.segment(0, Nn) - star;
    const Eigen::VectorXd pe = x.segment(Nn, Nn) - star;
    const double tau = x(2 * Nn);
    const Eigen::VectorXd dx = spec.flow(x, t);

    const Eigen::VectorXd x1 = pe - te;
    const Eigen::VectorXd dte = dx.segment(0, Nn);
    const Eigen::VectorXd dpe = dx.segment(Nn, Nn);
    const double dtau = dx(2 * Nn);
    const Eigen::VectorXd sigma_te = cert.Sigma * te;
    double vdot = 0.5 * (qd.array() * x1.array()).matrix().dot(dpe - dte) +
                  0.5 * (qd.array() * pe.array()).matrix().dot(dpe) +
                  tau * tau * sigma_te.dot(dte) +
                  tau * dtau * te.dot(sigma_te);

    // Central-difference cross-check within the same flow interval; keep the
    // worse (larger) of the two derivatives.
    if (k > 0 && k + 1 < arc.samples.size() &&
        arc.samples[k - 1].j == arc.samples[k + 1].j) {
      const double dt = arc.samples[k + 1].t - arc.samples[k - 1].t;
      if (dt > 0) {
        const double fd = (v_vals[k + 1] - v_vals[k - 1]) / dt;
        vdot = std::max(vdot, fd);
      }
    }

    const double V = v_vals[k];
    const double margin =
        (vdot + fc.rho * V - fc.gamma * u_norm * u_norm) / std::max(1.0, V);
    worst = std::max(worst, margin);
    ++rep.samples;
  }
  rep.worst_margin = worst;
  rep.pass = worst <= 1e-8;
  return rep;
}

double jump_ratio(const SpectralCertificate& cert, const DmclSystem& sys,
                  const Eigen::VectorXd& theta_err, const Eigen::VectorXd& p_err,
                  double T) {
  const int n = sys.dim();
  const std::vector<int>& eta = sys.params().eta;
  Eigen::VectorXd p_plus = p_err;
  for (int i = 0; i < sys.num_agents(); ++i)
    if (eta.empty() || eta[i] == 1)
      p_plus.segment(i * n, n) = theta_err.segment(i * n, n);
  const double v_minus = lyapunov_value(cert, theta_err, p_err, T);
  const double v_plus = lyapunov_value(cert, theta_err, p_plus, cert.T0);
  return v_plus / v_minus;
}

double reset_identity_residual(const Eigen::VectorXd& theta_err,
                               const Eigen::VectorXd& p_err,
                               const Eigen::VectorXd& q,
                               const std::vector<int>& eta) {
  const int N = static_cast<int>(q.size());
  const int n = static_cast<int>(theta_err.size()) / N;
  const Eigen::VectorXd qd = q_diag(q, n);
  Eigen::VectorXd rd(N * n);  // diag(R)
  for (int i = 0; i < N; ++i)
    rd.segment(i * n, n).setConstant(static_cast<double>(eta[i]));
  const Eigen::VectorXd mix =
      rd.array() * theta_err.array() +
      (1.0 - rd.array()) * p_err.array();
  const double lhs = quad_q(mix - theta_err, qd) + quad_q(mix, qd) -
                     quad_q(p_err, qd) - quad_q(p_err - theta_err, qd);
  const Eigen::VectorXd rq = rd.array() * qd.array();
  const double rhs = quad_q(theta_err, rq) - quad_q(p_err, rq) -
                     quad_q(theta_err - p_err, rq);
  return std::abs(lhs - rhs);
}

BlockSvCheck block_triangular_sv_bound(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& D) {
  const int ra = static_cast<int>(A.rows());
  const int rd = static_cast<int>(D.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ra + rd, A.cols() + D.cols());
  M.topLeftCorner(ra, A.cols()) = A;
  M.topRightCorner(ra, D.cols()) = B;
  M.bottomRightCorner(rd, D.cols()) = D;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_m(M);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_a(A);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_d(D);
  const double inv_a = 1.0 / svd_a.singularValues().minCoeff();
  const double inv_d = 1.0 / svd_d.singularValues().minCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_bd(
      B * D.inverse());
  const double bd = svd_bd.singularValues().maxCoeff();
  BlockSvCheck out;
  out.sigma_min = svd_m.singularValues().minCoeff();
  out.bound = 1.0 / std::sqrt(inv_a * inv_a * (1.0 + bd * bd) + inv_d * inv_d);
  out.pass = out.sigma_min + 1e-12 >= out.bound;
  return out;
}

std::vector<IssPoint> iss_profile(const DmclSystem& base,
                                  const Eigen::VectorXd& noise_pattern,
                                  const std::vector<double>& amplitudes,
                                  double t_max, double step) {
  if (!base.theta_star()) throw DataError("iss_profile needs theta_star");
  const Eigen::VectorXd star = *base.theta_star();
  // Recover the graph from the stored Laplacian.
  const int N = base.num_agents();
  const int n = base.dim();
  Digraph g;
  g.adj = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j) g.adj(i, j) = -base.laplacian()(i, j);

  // Unit recorded-noise input: block i = k_c * sum_k pattern_{i,k} phi_{i,k}.
  Eigen::VectorXd u_unit = Eigen::VectorXd::Zero(N * n);
  {
    int idx = 0;
    for (int i = 0; i < N; ++i)
      for (const auto& s : base.data().agents[i].samples) {
        if (idx >= noise_pattern.size())
          throw DataError("noise pattern shorter than the dataset");
        u_unit.segment(i * n, n) +=
            base.params().k_c * noise_pattern(idx++) * s.phi;
      }
  }

  std::vector<IssPoint> out;
  for (double amp : amplitudes) {
    DmclSystem sys(g, base.data(), base.params());
    sys.set_theta_star(star);
    const Eigen::VectorXd u_amp = amp * u_unit;
    sys.set_disturbance([u_amp](double) { return u_amp; });
    const int Nn = N * n;
    const Eigen::VectorXd x0 = sys.pack_state(
        RestartMode::Centralized, Eigen::VectorXd::Zero(Nn),
        Eigen::VectorXd::Zero(Nn),
        Eigen::VectorXd::Constant(N, base.params().T0), 0.0);
    SolveOptions opts;
    opts.t_max = t_max;
    opts.step = step;
    opts.record_stride = 10;
    const HybridArc arc = solve(sys.make_spec(RestartMode::Centralized), x0, opts);
    double sup_err = 0.0;
    for (const auto& s : arc.samples)
      if (s.t >= 0.8 * t_max)
        sup_err = std::max(sup_err,
                           sys.error_norm(RestartMode::Centralized, s.x));
    out.push_back({amp, sup_err});
  }
  return out;
}

std::string report_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"applicable", c.applicable},
                   {"margin", c.margin},
                   {"detail", c.detail}});
  }
  return arr.dump(2);
}

}  // namespace dmcl
