#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dmcl.h"
#include "dmcl/config.hpp"
#include "dmcl/errors.hpp"

#include <nlohmann/json.hpp>

using namespace dmcl;

TEST_CASE("config parser: comments, whitespace, malformed lines") {
  std::istringstream in(
      "# leading comment\n"
      "params.k_r = 5.0\n"
      "  graph.preset = cycle:3   # trailing comment\n"
      "\n"
      "params.T = 0.575\n");
  const Config cfg = Config::parse(in);
  CHECK(cfg.get_num("params.k_r", 0.0) == doctest::Approx(5.0));
  CHECK(cfg.get("graph.preset") == "cycle:3");
  CHECK(cfg.get_num("params.T", 0.0) == doctest::Approx(0.575));

  std::istringstream bad("params.k_r 5.0\n");
  CHECK_THROWS_AS(Config::parse(bad), ConfigError);
}

TEST_CASE("value lists") {
  std::istringstream in("sweep.values = 1.0, 2.5,3\n");
  const Config cfg = Config::parse(in);
  const auto v = cfg.get_list("sweep.values");
  REQUIRE(v.size() == 3);
  CHECK(v[1] == doctest::Approx(2.5));
}

TEST_CASE("preset configs build and overrides apply") {
  Config cfg = Config::load("configs/estimation_cycle.cfg");
  cfg.set("params.T", "2.80");
  cfg.set("horizon.t_max", "12");
  const BuiltInstance bi = build_from_config(cfg);
  CHECK(bi.graph.nodes() == 5);
  CHECK(bi.params.T == doctest::Approx(2.80));
  CHECK(bi.opts.t_max == doctest::Approx(12.0));
  CHECK(bi.theta_star.size() == 3);
}

TEST_CASE("graph and data files load through the config layer") {
  const Config cfg = Config::load("configs/estimation_from_files.cfg");
  const BuiltInstance bi = build_from_config(cfg);
  CHECK(bi.graph.nodes() == 5);
  CHECK(bi.data.agents.size() == 5);
  const SpectralCertificate cert = certificate_of(bi);
  CHECK(cert.alpha == doctest::Approx(5.5).epsilon(1e-6));
}

TEST_CASE("C API: analyze returns the flat certificate") {
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open("configs/estimation_cycle.cfg", &s) == 0);
  char* json = nullptr;
  REQUIRE(dmcl_analyze(s, &json) == 0);
  REQUIRE(json != nullptr);
  const auto j = nlohmann::json::parse(json);
  CHECK(j["alpha"].get<double>() == doctest::Approx(5.5).epsilon(1e-6));
  CHECK(j["T_lower"].get<double>() > 0.0);
  dmcl_string_free(json);
  dmcl_close(s);
}

TEST_CASE("C API: weakly connected graph maps to code 2") {
  const char* text =
      "graph.preset = cycle:3\n"
      "data.synthesize = exp\n"
      "data.theta_star = 1, -2, 1\n";
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open_text(text, &s) == 0);
  // Break strong connectivity by pointing at a one-way chain edge list.
  REQUIRE(dmcl_set_option(s, "graph.preset", "") == 0);
  REQUIRE(dmcl_set_option(s, "graph.path", "/tmp/dmcl_chain.edges") == 0);
  {
    std::ofstream f("/tmp/dmcl_chain.edges");
    f << "1 2 1.0\n2 3 1.0\n";
  }
  char* json = nullptr;
  CHECK(dmcl_analyze(s, &json) == 2);
  CHECK(std::string(dmcl_last_error()).size() > 0);
  dmcl_close(s);
}

TEST_CASE("C API: rank-deficient data maps to code 3") {
  const char* text =
      "graph.preset = cycle:3\n"
      "data.path = /tmp/dmcl_rank1.data\n";
  {
    // Every sample is the same rank-one regressor: not collectively rich.
    std::ofstream f("/tmp/dmcl_rank1.data");
    for (int a = 1; a <= 3; ++a)
      for (int k = 0; k < 2; ++k)
        f << a << " " << k << " " << 0.1 * k << " 1.0 0.0 1.0 0.0\n";
  }
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open_text(text, &s) == 0);
  char* json = nullptr;
  CHECK(dmcl_analyze(s, &json) == 3);
  dmcl_close(s);
}

TEST_CASE("C API: coarse step on a stiff instance maps to code 4") {
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open("configs/estimation_cycle.cfg", &s) == 0);
  REQUIRE(dmcl_set_option(s, "horizon.step", "0.01") == 0);
  REQUIRE(dmcl_set_option(s, "horizon.t_max", "30") == 0);
  CHECK(dmcl_simulate(s, "/tmp/dmcl_div_out", 1) == 4);
  dmcl_close(s);
}

TEST_CASE("C API: simulate writes the arc CSV") {
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open("configs/contraction.cfg", &s) == 0);
  REQUIRE(dmcl_set_option(s, "horizon.t_max", "3") == 0);
  REQUIRE(dmcl_set_option(s, "output.csv", "arc.csv") == 0);
  REQUIRE(dmcl_simulate(s, "/tmp/dmcl_sim_out", 1) == 0);
  std::ifstream f("/tmp/dmcl_sim_out/arc.csv");
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("t,j,state_0", 0) == 0);
  int rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows > 10);
  dmcl_close(s);
}

TEST_CASE("C API: verify passes on the cycle estimation preset") {
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open("configs/estimation_cycle.cfg", &s) == 0);
  char* report = nullptr;
  CHECK(dmcl_verify(s, "/tmp/dmcl_verify_out", 7, &report) == 0);
  REQUIRE(report != nullptr);
  const auto j = nlohmann::json::parse(report);
  REQUIRE(j.is_array());
  for (const auto& c : j)
    if (c["applicable"].get<bool>()) CHECK(c["pass"].get<bool>());
  dmcl_string_free(report);
  dmcl_close(s);
}

TEST_CASE("C API: parameter sweep writes per-value arcs and a summary") {
  dmcl_session* s = nullptr;
  REQUIRE(dmcl_open("configs/contraction.cfg", &s) == 0);
  REQUIRE(dmcl_set_option(s, "horizon.t_max", "3") == 0);
  const double values[2] = {1.0, 1.23};
  REQUIRE(dmcl_sweep(s, "T", values, 2, "/tmp/dmcl_sweep_out", 1, 2) == 0);
  std::ifstream summary("/tmp/dmcl_sweep_out/sweep.json");
  REQUIRE(summary.good());
  std::stringstream ss;
  ss << summary.rdbuf();
  const auto j = nlohmann::json::parse(ss.str());
  CHECK(j.size() >= 2);
  dmcl_close(s);
}
