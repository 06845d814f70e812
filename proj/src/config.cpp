#include "dmcl/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "dmcl/lyapunov.hpp"

namespace dmcl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::filesystem::path out_path(const std::string& out_dir,
                               const std::string& name) {
  std::filesystem::create_directories(out_dir);
  return std::filesystem::path(out_dir) / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse(f);
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed config line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in config line: " + line);
    cfg.kv[key] = val;
  }
  return cfg;
}

std::string Config::get(const std::string& key, const std::string& fb) const {
  auto it = kv.find(key);
  return it == kv.end() ? fb : it->second;
}

double Config::get_num(const std::string& key, double fb) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fb;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("not a number: " + key + " = " + it->second);
  }
}

int Config::get_int(const std::string& key, int fb) const {
  return static_cast<int>(get_num(key, fb));
}

std::vector<double> Config::get_list(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) return {};
  return parse_list(it->second);
}

namespace {

Digraph graph_from_preset(const std::string& preset) {
  const auto parts = split(preset, ':');
  if (parts.size() < 2) throw ConfigError("graph.preset wants name:count");
  const int n = std::stoi(parts[1]);
  const double w = parts.size() > 2 ? std::stod(parts[2]) : 1.0;
  if (parts[0] == "cycle") return Digraph::cycle(n, w);
  if (parts[0] == "complete") return Digraph::complete(n, w);
  throw ConfigError("unknown graph preset: " + parts[0]);
}

void apply_estimation(BuiltInstance& bi, const EstimationInstance& e) {
  bi.graph = e.graph;
  bi.data = e.data;
  bi.params = e.params;
  bi.theta_star = e.theta_star;
  bi.regs = e.regs;
  bi.phi_bar = e.phi_bar;
}

}  // namespace

BuiltInstance build_from_config(const Config& cfg) {
  BuiltInstance bi;
  bi.preset = cfg.get("preset");
  if (!bi.preset.empty()) {
    if (bi.preset == "example1") {
      apply_estimation(bi, build_example1());
    } else if (bi.preset == "estimation" || bi.preset == "estimation_cycle") {
      apply_estimation(bi, build_estimation(false));
    } else if (bi.preset == "estimation_complete") {
      apply_estimation(bi, build_estimation(true));
    } else if (bi.preset == "contraction") {
      apply_estimation(bi, build_contraction_instance());
    } else if (bi.preset == "mrac") {
      const MracInstance m = build_mrac();
      bi.graph = m.graph;
      bi.data = m.data;
      bi.params = m.params;
      bi.theta_star = m.theta_star;
      bi.phi_bar = 0.0;  // no uniform regressor bound for state-dependent phi
    } else if (bi.preset == "feedopt") {
      const FeedoptInstance f = build_feedopt();
      bi.graph = f.graph;
      bi.data = f.data;
      bi.params = f.params;
      bi.theta_star = f.theta_star;
      bi.phi_bar = 0.0;
    } else {
      throw ConfigError("unknown preset: " + bi.preset);
    }
  } else {
    if (cfg.has("graph.path"))
      bi.graph = Digraph::load(cfg.get("graph.path"));
    else if (cfg.has("graph.preset"))
      bi.graph = graph_from_preset(cfg.get("graph.preset"));
    else
      throw ConfigError("config needs preset, graph.path or graph.preset");

    if (cfg.has("data.path")) {
      bi.data = NetworkData::load(cfg.get("data.path"));
    } else if (cfg.get("data.synthesize") == "exp") {
      const auto star = cfg.get_list("data.theta_star");
      if (star.size() != 3)
        throw ConfigError("data.theta_star wants three components");
      bi.theta_star = Eigen::Map<const Eigen::VectorXd>(star.data(), 3);
      const int N = bi.graph.nodes();
      std::vector<std::vector<double>> times(N);
      if (cfg.has("data.times")) {
        const auto groups = split(cfg.get("data.times"), ';');
        for (int i = 0; i < N; ++i)
          times[i] = parse_list(groups[groups.size() == 1 ? 0 : i]);
      } else {
        const double tmax = cfg.get_num("data.t_max", 2.0);
        const int k = cfg.get_int("data.samples", 5);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < k; ++j)
            times[i].push_back(tmax * j / (k - 1));
      }
      for (int i = 1; i <= N; ++i) {
        bi.regs.push_back(exp_regressor(i));
        bi.data.agents.push_back(synthesize_dataset(
            bi.regs.back(), i, bi.theta_star, times[i - 1]));
      }
      bi.phi_bar = bi.regs[0].phi_bar;
    } else {
      throw ConfigError("config needs data.path or data.synthesize = exp");
    }
  }

  // Gain / timer overrides.
  bi.params.k_r = cfg.get_num("params.k_r", bi.params.k_r);
  bi.params.k_t = cfg.get_num("params.k_t", bi.params.k_t);
  bi.params.k_c = cfg.get_num("params.k_c", bi.params.k_c);
  bi.params.T0 = cfg.get_num("params.T0", bi.params.T0);
  bi.params.T = cfg.get_num("params.T", bi.params.T);
  bi.params.omega = cfg.get_num("params.omega", bi.params.omega);
  bi.params.k_a = cfg.get_num("params.k_a", bi.params.k_a);

  const std::string mode = cfg.get("restart.mode", "centralized");
  if (mode == "centralized")
    bi.mode = RestartMode::Centralized;
  else if (mode == "decentralized")
    bi.mode = RestartMode::Decentralized;
  else if (mode == "none")
    bi.mode = RestartMode::None;
  else if (mode == "first_order")
    bi.mode = RestartMode::FirstOrder;
  else
    throw ConfigError("unknown restart.mode: " + mode);

  if (cfg.has("restart.eta")) {
    bi.params.eta.clear();
    for (double v : cfg.get_list("restart.eta"))
      bi.params.eta.push_back(v != 0.0 ? 1 : 0);
  }
  if (bi.mode == RestartMode::Decentralized) {
    if (cfg.has("restart.r") && cfg.get("restart.r") != "default") {
      bi.params.r = cfg.get_list("restart.r");
    } else {
      bi.params.r = DMCLParams::default_thresholds(bi.params.T0, bi.params.T,
                                                   bi.graph.nodes());
    }
  }

  bi.dist_kind = cfg.get("disturbance.kind", "none");
  bi.dist_amplitude = cfg.get_num("disturbance.amplitude", 0.0);
  if (bi.dist_kind != "none" && bi.dist_kind != "recorded")
    throw ConfigError("unknown disturbance.kind: " + bi.dist_kind);

  bi.opts.t_max = cfg.get_num("horizon.t_max", 10.0);
  bi.opts.j_max = cfg.get_int("horizon.j_max", 1 << 30);
  bi.opts.step = cfg.get_num("horizon.step", 1e-3);
  bi.csv_name = cfg.get("output.csv", "arc.csv");
  return bi;
}

std::unique_ptr<DmclSystem> make_system(const BuiltInstance& bi, unsigned seed) {
  auto sys = std::make_unique<DmclSystem>(bi.graph, bi.data, bi.params);
  if (bi.theta_star.size() > 0) sys->set_theta_star(bi.theta_star);
  if (!bi.regs.empty()) sys->set_regressors(bi.regs);
  if (bi.dist_kind == "recorded" && bi.dist_amplitude != 0.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    const int n = sys->dim();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(sys->num_agents() * n);
    for (int i = 0; i < sys->num_agents(); ++i)
      for (const auto& s : bi.data.agents[i].samples)
        u.segment(i * n, n) += bi.params.k_c * gauss(rng) * s.phi;
    u *= bi.dist_amplitude;
    sys->set_disturbance([u](double) { return u; });
  }
  return sys;
}

SpectralCertificate certificate_of(const BuiltInstance& bi) {
  double phi_bar = bi.phi_bar;
  if (phi_bar <= 0.0) {
    // Fall back to the largest recorded regressor norm.
    for (const auto& ag : bi.data.agents)
      for (const auto& s : ag.samples)
        phi_bar = std::max(phi_bar, s.phi.norm());
  }
  return build_certificate(bi.graph, bi.data, bi.params.k_r, bi.params.k_c,
                           bi.params.k_t, phi_bar, bi.params.T0,
                           bi.params.omega);
}

namespace {

Eigen::VectorXd initial_state(const BuiltInstance& bi, const DmclSystem& sys) {
  const int Nn = sys.num_agents() * sys.dim();
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(Nn);
  if (bi.theta_star.size() > 0)
    for (int i = 0; i < sys.num_agents(); ++i)
      theta0.segment(i * sys.dim(), sys.dim()) =
          bi.theta_star + Eigen::VectorXd::Ones(sys.dim());
  Eigen::VectorXd tau0 =
      Eigen::VectorXd::Constant(sys.num_agents(), bi.params.T0);
  return sys.pack_state(bi.mode, theta0, theta0, tau0, 0.0);
}

// One estimation-style simulation: returns the arc.
HybridArc simulate_instance(const BuiltInstance& bi, unsigned seed,
                            HybridArc* arc_out = nullptr) {
  auto sys = make_system(bi, seed);
  SolveOptions opts = bi.opts;
  const double span = opts.t_max / std::max(opts.step, 1e-12);
  opts.record_stride = std::max(1, static_cast<int>(span / 2000.0));
  HybridArc arc = solve(sys->make_spec(bi.mode), initial_state(bi, *sys), opts);
  if (arc_out) *arc_out = arc;
  return arc;
}

struct AppRun {
  HybridArc arc;
  double final_theta_err = 0.0;
  double time_to_01 = std::numeric_limits<double>::infinity();
};

AppRun run_mrac_arc(const MracInstance& inst, bool momentum, double t_max,
                    double step) {
  HybridSpec spec = mrac_spec(inst, momentum);
  spec.diag_names = {"theta_err", "tracking_err"};
  spec.diagnostics = [&inst](const Eigen::VectorXd& x, double,
                             std::vector<double>& d) {
    d[0] = mrac_theta_err(inst, x);
    double emax = 0.0;
    for (int i = 0; i < inst.n_agents; ++i)
      emax = std::max(emax, x.segment(2 * i, 2).norm());
    d[1] = emax;
  };
  SolveOptions opts;
  opts.t_max = t_max;
  opts.step = step;
  opts.record_stride = 50;
  AppRun run;
  run.arc = solve(spec, mrac_x0(inst, momentum), opts);
  run.final_theta_err = mrac_theta_err(inst, run.arc.back().x);
  for (const auto& s : run.arc.samples)
    if (mrac_theta_err(inst, s.x) <= 0.1) {
      run.time_to_01 = s.t;
      break;
    }
  return run;
}

AppRun run_feedopt_arc(const FeedoptInstance& inst, bool momentum, double t_max,
                       double step) {
  HybridSpec spec = feedopt_spec(inst, momentum);
  spec.diag_names = {"theta_err", "u_dev"};
  spec.diagnostics = [&inst](const Eigen::VectorXd& x, double,
                             std::vector<double>& d) {
    d[0] = feedopt_theta_err(inst, x);
    double dev = 0.0;
    for (int i = 0; i < inst.n_agents; ++i)
      dev = std::max(dev,
                     (x.segment(2 * i, 2) - inst.u_star[i]).norm());
    d[1] = dev;
  };
  SolveOptions opts;
  opts.t_max = t_max;
  opts.step = step;
  opts.record_stride = 200;
  AppRun run;
  run.arc = solve(spec, feedopt_x0(inst, momentum), opts);
  run.final_theta_err = feedopt_theta_err(inst, run.arc.back().x);
  for (const auto& s : run.arc.samples)
    if (feedopt_theta_err(inst, s.x) <= 0.1) {
      run.time_to_01 = s.t;
      break;
    }
  return run;
}

}  // namespace

int run_analyze(const Config& cfg, const std::string& out_dir,
                std::string* json_out) {
  const BuiltInstance bi = build_from_config(cfg);
  const SpectralCertificate cert = certificate_of(bi);
  const std::string json = cert.to_json();
  if (json_out) *json_out = json;
  if (!out_dir.empty())
    write_text(out_path(out_dir, "certificate.json"), json + "\n");
  return 0;
}

int run_simulate(const Config& cfg, const std::string& out_dir, unsigned seed) {
  const BuiltInstance bi = build_from_config(cfg);
  HybridArc arc;
  if (bi.preset == "mrac") {
    arc = run_mrac_arc(build_mrac(), bi.mode != RestartMode::FirstOrder,
                       bi.opts.t_max, bi.opts.step)
              .arc;
  } else if (bi.preset == "feedopt") {
    arc = run_feedopt_arc(build_feedopt(), bi.mode != RestartMode::FirstOrder,
                          bi.opts.t_max, bi.opts.step)
              .arc;
  } else {
    arc = simulate_instance(bi, seed);
  }
  arc.write_csv(out_path(out_dir.empty() ? "." : out_dir, bi.csv_name)
                    .string());
  return 0;
}

int run_verify(const Config& cfg, const std::string& out_dir, unsigned seed,
               std::string* report_out) {
  const BuiltInstance bi = build_from_config(cfg);
  const SpectralCertificate cert = certificate_of(bi);
  const int N = cert.n_nodes;
  const int n = cert.dim;
  const int Nn = N * n;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  auto randv = [&](int k) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = gauss(rng);
    return v;
  };
  std::vector<CheckResult> checks;

  {
    CheckResult c{"perron_residual"};
    const Eigen::MatrixXd L = build_laplacian(bi.graph);
    c.margin = (cert.q.transpose() * L).norm();
    c.pass = c.margin <= 1e-10 && cert.q.minCoeff() > 0.0;
    checks.push_back(c);
  }
  {
    CheckResult c{"window_formulas"};
    const double tl = std::sqrt(cert.sigma_q_max / (2.0 * cert.sigma_sigma_min) +
                                cert.T0 * cert.T0);
    c.margin = std::abs(tl - cert.T_lower) +
               std::abs(std::numbers::e * tl - cert.T_star);
    c.pass = c.margin <= 1e-12;
    checks.push_back(c);
  }
  {
    CheckResult c{"analytic_sigma_bound"};
    c.margin = cert.sigma_sigma_min -
               std::max(cert.sigma_sigma_min_analytic,
                        cert.sigma_sigma_min_analytic_scaled);
    c.pass = cert.sigma_sigma_min_analytic <= cert.sigma_sigma_min + 1e-12 &&
             cert.sigma_sigma_min_analytic_scaled <=
                 cert.sigma_sigma_min + 1e-12;
    checks.push_back(c);
  }
  {
    CheckResult c{"reset_identity"};
    std::uniform_int_distribution<int> coin(0, 1);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      std::vector<int> eta(N);
      for (auto& e : eta) e = coin(rng);
      worst = std::max(worst, reset_identity_residual(randv(Nn), randv(Nn),
                                                      cert.q, eta));
    }
    c.margin = worst;
    c.pass = worst <= 1e-10;
    checks.push_back(c);
  }
  {
    CheckResult c{"sandwich"};
    const SandwichConstants sc = sandwich_constants(cert, bi.params.T);
    std::uniform_real_distribution<double> utau(cert.T0, bi.params.T);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd te = randv(Nn);
      const Eigen::VectorXd pe = randv(Nn);
      const double tau = utau(rng);
      const double z2 = te.squaredNorm() + pe.squaredNorm();
      const double v = lyapunov_value(cert, te, pe, tau);
      worst = std::min({worst, v - sc.c_lower * z2, sc.c_upper * z2 - v});
    }
    c.margin = worst;
    c.pass = worst >= -1e-9;
    checks.push_back(c);
  }
  {
    CheckResult c{"jump_contraction"};
    c.applicable = bi.params.T > cert.T_lower;
    if (c.applicable) {
      DMCLParams prm = bi.params;
      prm.eta.assign(N, 1);
      DmclSystem sys(bi.graph, bi.data, prm);
      const double mu = cert.mu(bi.params.T);
      double worst = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < 100; ++k)
        worst = std::max(worst, jump_ratio(cert, sys, randv(Nn), randv(Nn),
                                           bi.params.T) -
                                    mu);
      c.margin = worst;
      c.pass = worst <= 1e-9;
    }
    checks.push_back(c);
  }
  {
    CheckResult c{"vw_margin"};
    c.applicable = cert.in_window(bi.params.T) && !bi.regs.empty();
    if (c.applicable) {
      const VwReport rep = vw_margin(cert, bi.regs, bi.params.T);
      c.margin = rep.worst_margin;
      c.pass = rep.pass;
    }
    checks.push_back(c);
  }
  {
    CheckResult c{"block_sv_bound"};
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
      const int m = 2 + k % 4;
      Eigen::MatrixXd A(m, m), B(m, m), D(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          A(i, j) = gauss(rng);
          B(i, j) = gauss(rng);
          D(i, j) = gauss(rng);
        }
      A += 2.0 * m * Eigen::MatrixXd::Identity(m, m);
      D += 2.0 * m * Eigen::MatrixXd::Identity(m, m);
      const BlockSvCheck b = block_triangular_sv_bound(A, B, D);
      ok = ok && b.pass;
      worst = std::min(worst, b.sigma_min - b.bound);
    }
    c.margin = worst;
    c.pass = ok;
    checks.push_back(c);
  }

  const std::string report = report_to_json(checks);
  if (report_out) *report_out = report;
  if (!out_dir.empty())
    write_text(out_path(out_dir, "verify_report.json"), report + "\n");
  for (const auto& c : checks)
    if (c.applicable && !c.pass) return 1;
  return 0;
}

int run_sweep(const Config& cfg, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir,
              unsigned seed, int jobs) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const std::string key =
      param.find('.') == std::string::npos ? "params." + param : param;
  struct Row {
    double value = 0.0;
    double final_err = std::numeric_limits<double>::quiet_NaN();
    int jumps = 0;
    std::string csv;
  };
  std::vector<Row> rows(values.size());
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      try {
        Config local = cfg;
        local.set(key, std::to_string(values[i]));
        BuiltInstance bi = build_from_config(local);
        bi.csv_name = "sweep_" + param + "_" + std::to_string(i) + ".csv";
        HybridArc arc = simulate_instance(bi, seed);
        arc.write_csv(out_path(out_dir, bi.csv_name).string());
        Row& r = rows[i];
        r.value = values[i];
        r.jumps = arc.back().j;
        r.csv = bi.csv_name;
        if (!arc.diag_names.empty() && arc.diag_names[0] == "err_norm")
          r.final_err = arc.back().diag[0];
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int nthreads =
      std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : rows)
    summary.push_back({{"value", r.value},
                       {"final_err", r.final_err},
                       {"jumps", r.jumps},
                       {"csv", r.csv}});
  write_text(out_path(out_dir, "sweep.json"), summary.dump(2) + "\n");
  return 0;
}

namespace {

int reproduce_example1(const std::string& out_dir, double step) {
  const EstimationInstance inst = build_example1();
  Config cfg;
  cfg.set("preset", "example1");
  std::string cert_json;
  run_analyze(cfg, out_dir, &cert_json);

  BuiltInstance bi = build_from_config(cfg);
  bi.opts.t_max = 60.0;
  bi.opts.step = step > 0 ? step : 1e-3;

  bi.mode = RestartMode::None;
  HybridArc arc_none = simulate_instance(bi, 0);
  double max_err = 0.0;
  for (const auto& s : arc_none.samples) max_err = std::max(max_err, s.diag[0]);
  arc_none.write_csv(out_path(out_dir, "arc_no_restart.csv").string());

  bi.mode = RestartMode::Centralized;
  HybridArc arc_r = simulate_instance(bi, 0);
  arc_r.write_csv(out_path(out_dir, "arc_restart.csv").string());

  const double err0 = std::sqrt(3.0 * inst.theta_star.size());
  nlohmann::json summary = {
      {"no_restart_max_err", max_err},
      {"no_restart_growth", max_err / err0},
      {"restart_final_err", arc_r.back().diag[0]},
      {"restart_T", inst.params.T},
      {"jumps", arc_r.back().j}};
  write_text(out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  return 0;
}

int reproduce_estimation(const std::string& out_dir, double step) {
  const double h = step > 0 ? step : 2e-4;
  nlohmann::json summary;
  // Complete graph: run at the tuning-rule T, compare with the first-order
  // baseline (computed from the exact linear solution).
  {
    Config cfg;
    cfg.set("preset", "estimation_complete");
    BuiltInstance bi = build_from_config(cfg);
    const SpectralCertificate cert = certificate_of(bi);
    bi.params.T = cert.T_star;
    bi.opts.t_max = 30.0;
    bi.opts.step = h;
    auto sys = make_system(bi, 0);
    HybridArc arc = solve(sys->make_spec(RestartMode::Centralized),
                          initial_state(bi, *sys), bi.opts);
    arc.write_csv(out_path(out_dir, "arc_complete.csv").string());
    double t_mom = std::numeric_limits<double>::infinity();
    for (const auto& s : arc.samples)
      if (s.diag[0] <= 1e-4) {
        t_mom = s.t;
        break;
      }
    const int Nn = sys->num_agents() * sys->dim();
    const Eigen::MatrixXd L = build_laplacian(bi.graph);
    Eigen::MatrixXd A = bi.params.k_r * sys->delta_block();
    const int n = sys->dim();
    for (int i = 0; i < sys->num_agents(); ++i)
      for (int j = 0; j < sys->num_agents(); ++j)
        A.block(i * n, j * n, n, n) +=
            bi.params.k_c * L(i, j) * Eigen::MatrixXd::Identity(n, n);
    const double t_fo = first_order_time_to(
        A, Eigen::VectorXd::Ones(Nn), 1e-4, 400.0);
    summary["complete"] = {{"T", bi.params.T},
                           {"final_err", arc.back().diag[0]},
                           {"t_to_1e-4_momentum", t_mom},
                           {"t_to_1e-4_first_order", t_fo}};
  }
  // Cycle graph: four-point T sweep across the certified window.
  {
    Config cfg;
    cfg.set("preset", "estimation_cycle");
    BuiltInstance bi = build_from_config(cfg);
    const SpectralCertificate cert = certificate_of(bi);
    nlohmann::json sweep = nlohmann::json::array();
    for (int k = 0; k < 4; ++k) {
      const double lo = cert.T_lower + 0.08 * (cert.T_upper - cert.T_lower);
      const double hi = cert.T_upper - 0.08 * (cert.T_upper - cert.T_lower);
      const double T = lo + (hi - lo) * k / 3.0;
      bi.params.T = T;
      bi.opts.t_max = 60.0;
      bi.opts.step = h;
      auto sys = make_system(bi, 0);
      HybridArc arc = solve(sys->make_spec(RestartMode::Centralized),
                            initial_state(bi, *sys), bi.opts);
      arc.write_csv(
          out_path(out_dir, "arc_cycle_T" + std::to_string(k) + ".csv")
              .string());
      double t_mom = std::numeric_limits<double>::infinity();
      for (const auto& s : arc.samples)
        if (s.diag[0] <= 1e-4) {
          t_mom = s.t;
          break;
        }
      sweep.push_back({{"T", T},
                       {"final_err", arc.back().diag[0]},
                       {"t_to_1e-4", t_mom}});
    }
    summary["cycle"] = {{"window_lower", cert.T_lower},
                        {"window_upper", cert.T_upper},
                        {"sweep", sweep}};
  }
  write_text(out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  return 0;
}

int reproduce_mrac(const std::string& out_dir, double step) {
  const MracInstance inst = build_mrac();
  const double h = step > 0 ? step : 5e-4;
  const AppRun mom = run_mrac_arc(inst, true, 60.0, h);
  const AppRun fo = run_mrac_arc(inst, false, 60.0, h);
  mom.arc.write_csv(out_path(out_dir, "arc_momentum.csv").string());
  fo.arc.write_csv(out_path(out_dir, "arc_first_order.csv").string());
  nlohmann::json summary = {
      {"momentum",
       {{"final_theta_err", mom.final_theta_err},
        {"final_tracking_err", mom.arc.back().diag[1]},
        {"t_to_0.1", mom.time_to_01}}},
      {"first_order",
       {{"final_theta_err", fo.final_theta_err},
        {"final_tracking_err", fo.arc.back().diag[1]},
        {"t_to_0.1", fo.time_to_01}}}};
  write_text(out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  return 0;
}

int reproduce_feedopt(const std::string& out_dir, double step) {
  const FeedoptInstance inst = build_feedopt();
  const double h = step > 0 ? step : 2e-3;
  const AppRun mom = run_feedopt_arc(inst, true, 900.0, h);
  const AppRun fo = run_feedopt_arc(inst, false, 900.0, h);
  mom.arc.write_csv(out_path(out_dir, "arc_momentum.csv").string());
  fo.arc.write_csv(out_path(out_dir, "arc_first_order.csv").string());
  nlohmann::json summary = {
      {"momentum",
       {{"final_theta_err", mom.final_theta_err},
        {"final_u_dev", mom.arc.back().diag[1]},
        {"t_to_0.1", mom.time_to_01}}},
      {"first_order",
       {{"final_theta_err", fo.final_theta_err},
        {"final_u_dev", fo.arc.back().diag[1]},
        {"t_to_0.1", fo.time_to_01}}}};
  write_text(out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_reproduce(const std::string& preset, const std::string& out_dir,
                  double step_override, int jobs) {
  (void)jobs;  // the canned runs are sequential
  if (preset == "example1") return reproduce_example1(out_dir, step_override);
  if (preset == "estimation") return reproduce_estimation(out_dir, step_override);
  if (preset == "mrac") return reproduce_mrac(out_dir, step_override);
  if (preset == "feedopt") return reproduce_feedopt(out_dir, step_override);
  throw ConfigError("unknown reproduce preset: " + preset);
}

}  // namespace dmcl
