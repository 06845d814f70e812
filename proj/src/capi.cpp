#include "dmcl.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dmcl/config.hpp"
#include "dmcl/errors.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const dmcl::GraphError& e) {
    g_last_error = e.what();
    return 2;
  } catch (const dmcl::ConfigError& e) {
    g_last_error = e.what();
    return 2;
  } catch (const dmcl::DataError& e) {
    g_last_error = e.what();
    return 3;
  } catch (const dmcl::DivergenceError& e) {
    g_last_error = e.what();
    return 4;
  } catch (const dmcl::VerifyError& e) {
    g_last_error = e.what();
    return 1;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return 2;
  }
}

}  // namespace

struct dmcl_session {
  dmcl::Config cfg;
};

extern "C" {

int dmcl_open(const char* config_path, dmcl_session** out) {
  return guarded([&] {
    if (!config_path || !out) throw dmcl::ConfigError("null argument");
    auto s = std::make_unique<dmcl_session>();
    s->cfg = dmcl::Config::load(config_path);
    *out = s.release();
    return 0;
  });
}

int dmcl_open_text(const char* config_text, dmcl_session** out) {
  return guarded([&] {
    if (!config_text || !out) throw dmcl::ConfigError("null argument");
    auto s = std::make_unique<dmcl_session>();
    std::istringstream in(config_text);
    s->cfg = dmcl::Config::parse(in);
    *out = s.release();
    return 0;
  });
}

void dmcl_close(dmcl_session* s) { delete s; }

int dmcl_set_option(dmcl_session* s, const char* key, const char* value) {
  return guarded([&] {
    if (!s || !key || !value) throw dmcl::ConfigError("null argument");
    s->cfg.set(key, value);
    return 0;
  });
}

int dmcl_analyze(dmcl_session* s, char** json_out) {
  return guarded([&] {
    if (!s) throw dmcl::ConfigError("null session");
    std::string json;
    const int rc = dmcl::run_analyze(s->cfg, "", &json);
    if (json_out) *json_out = dup_string(json);
    return rc;
  });
}

int dmcl_simulate(dmcl_session* s, const char* out_dir, unsigned seed) {
  return guarded([&] {
    if (!s) throw dmcl::ConfigError("null session");
    return dmcl::run_simulate(s->cfg, out_dir ? out_dir : ".", seed);
  });
}

int dmcl_verify(dmcl_session* s, const char* out_dir, unsigned seed,
                char** report_out) {
  return guarded([&] {
    if (!s) throw dmcl::ConfigError("null session");
    std::string report;
    const int rc =
        dmcl::run_verify(s->cfg, out_dir ? out_dir : "", seed, &report);
    if (report_out) *report_out = dup_string(report);
    return rc;
  });
}

int dmcl_reproduce(const char* preset, const char* out_dir, double step,
                   int jobs) {
  return guarded([&] {
    if (!preset) throw dmcl::ConfigError("null preset");
    return dmcl::run_reproduce(preset, out_dir ? out_dir : ".", step, jobs);
  });
}

int dmcl_sweep(dmcl_session* s, const char* param, const double* values,
               size_t n_values, const char* out_dir, unsigned seed, int jobs) {
  return guarded([&] {
    if (!s || !param || !values) throw dmcl::ConfigError("null argument");
    std::vector<double> vals(values, values + n_values);
    return dmcl::run_sweep(s->cfg, param, vals, out_dir ? out_dir : ".", seed,
                           jobs);
  });
}

const char* dmcl_last_error(void) { return g_last_error.c_str(); }

void dmcl_string_free(char* str) { std::free(str); }

}  // extern "C"
