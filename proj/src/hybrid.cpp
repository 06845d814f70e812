#include "dmcl/hybrid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dmcl {

double guard_time(double tau, double omega, double T) {
  if (omega <= 0.0) throw VerifyError("guard_time requires omega > 0");
  return (T - tau) / omega;
}

namespace {

Eigen::VectorXd rk4_step(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& f,
    const Eigen::VectorXd& x, double t, double h) {
  const Eigen::VectorXd k1 = f(x, t);
  const Eigen::VectorXd k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
  const Eigen::VectorXd k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
  const Eigen::VectorXd k4 = f(x + h * k3, t + h);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_finite(const Eigen::VectorXd& x, double t, int j) {
  if (!x.allFinite()) {
    std::ostringstream os;
    os << "non-finite state at hybrid time (" << t << ", " << j << ")";
    throw DivergenceError(os.str());
  }
}

}  // namespace

HybridArc solve(const HybridSpec& spec, const Eigen::VectorXd& x0,
                const SolveOptions& opts) {
  if (opts.step <= 0.0) throw VerifyError("step must be positive");
  HybridArc arc;
  arc.diag_names = spec.diag_names;

  Eigen::VectorXd x = x0;
  double t = 0.0;
  int j = 0;
  long flow_samples = 0;

  auto record = [&](bool force) {
    if (!force && opts.record_stride > 1 &&
        (flow_samples % opts.record_stride) != 0)
      return;
    ArcSample s;
    s.t = t;
    s.j = j;
    s.x = x;
    if (spec.diagnostics) {
      s.diag.resize(spec.diag_names.size(), 0.0);
      spec.diagnostics(x, t, s.diag);
    }
    arc.samples.push_back(std::move(s));
  };

  auto apply_jumps = [&]() {
    int cascade = 0;
    while (spec.in_jump_set && spec.in_jump_set(x) && j < opts.j_max) {
      if (++cascade > spec.per_instant_jump_cap) {
        std::ostringstream os;
        os << "Zeno: more than " << spec.per_instant_jump_cap
           << " jumps at t = " << t << " (j = " << j << ")";
        throw DivergenceError(os.str());
      }
      x = spec.jump(x);
      ++j;
      check_finite(x, t, j);
      record(true);
      arc.jump_indices.push_back(arc.samples.size() - 1);
    }
  };

  auto in_jump = [&](const Eigen::VectorXd& y) {
    return spec.in_jump_set && spec.in_jump_set(y);
  };

  check_finite(x, t, j);
  record(true);
  apply_jumps();

  const double t_tol = 1e-12;
  while (t < opts.t_max - t_tol) {
    if (in_jump(x)) {
      if (j >= opts.j_max) break;  // jump budget exhausted on the guard
      apply_jumps();
      continue;
    }

    double h = std::min(opts.step, opts.t_max - t);
    bool expect_guard = false;
    if (spec.time_to_guard && j < opts.j_max) {
      const double tg = spec.time_to_guard(x);
      if (tg >= 0.0 && tg <= h) {
        h = tg;
        expect_guard = true;
      }
    }

    if (h > t_tol) {
      Eigen::VectorXd x_next = rk4_step(spec.flow, x, t, h);
      if (!expect_guard && !spec.time_to_guard && in_jump(x_next) &&
          j < opts.j_max) {
        // Bisection on the crossing time to 1e-12.
        double lo = 0.0, hi = h;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          if (in_jump(rk4_step(spec.flow, x, t, mid)))
            hi = mid;
          else
            lo = mid;
        }
        h = hi;
        x_next = rk4_step(spec.flow, x, t, h);
      }
      x = x_next;
      t += h;
      ++flow_samples;
      check_finite(x, t, j);
      record(expect_guard || in_jump(x));
    }
  }
  if (arc.samples.empty() || arc.samples.back().t != t ||
      arc.samples.back().j != j)
    record(true);
  return arc;
}

void HybridArc::check_well_formed() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    if (b.j == a.j) {
      if (b.t <= a.t) throw VerifyError("arc time not increasing within a flow interval");
    } else if (b.j == a.j + 1) {
      if (b.t != a.t) throw VerifyError("jump changed continuous time");
    } else {
      throw VerifyError("jump counter skipped");
    }
  }
}

void HybridArc::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw VerifyError("cannot write CSV: " + path);
  out << "t,j";
  const int d = samples.empty() ? 0 : static_cast<int>(samples.front().x.size());
  for (int i = 0; i < d; ++i) out << ",state_" << i;
  for (const auto& name : diag_names) out << ",diag_" << name;
  out << "\n";
  out << std::setprecision(17);
  for (const auto& s : samples) {
    out << s.t << ',' << s.j;
    for (int i = 0; i < d; ++i) out << ',' << s.x(i);
    for (double v : s.diag) out << ',' << v;
    out << "\n";
  }
}

}  // namespace dmcl
