// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include "chernlab/chernlab.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "chernlab/harness.hpp"

using chernlab::Json;

struct chl_instance {
  Json json;
};

struct chl_report {
  enum Kind { validation, suite, pair } kind;
  Json json;
};

namespace {

thread_local std::string last_error;

chl_status fail(chl_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

char* copy_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

chl_status put_string(const std::string& s, char** out) {
  *out = copy_string(s);
  return *out ? CHL_OK : fail(CHL_ERR_INTERNAL, "out of memory");
}

// Maps library exceptions onto status codes.
template <class F>
chl_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const Json::parse_error& e) {
    return fail(CHL_ERR_PARSE, e.what());
  } catch (const Json::exception& e) {
    return fail(CHL_ERR_CONFIG, e.what());
  } catch (const chernlab::ConfigError& e) {
    return fail(CHL_ERR_CONFIG, e.what());
  } catch (const chernlab::Error& e) {
    return fail(CHL_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(CHL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CHL_ERR_INTERNAL, "unknown exception");
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string validation_text(const Json& j) {
  std::ostringstream os;
  os << "instance kind: " << j["kind"].get<std::string>() << "\n";
  for (const auto& it : j["items"])
    os << "  " << (it["verdict"] == "pass" ? "PASS " : "FAIL ") << it["name"].get<std::string>() << "  "
       << fmt(it["residual"].get<double>()) << " <= " << fmt(it["tolerance"].get<double>()) << "\n";
  os << (j["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string pair_text(const Json& j) {
  std::ostringstream os;
  os << "pairing " << j["fixture"].get<std::string>() << " (m = " << j["m"] << ", N_used = " << j["N_used"]
     << ", s_nodes = " << j["s_nodes"] << ")\n";
  os << "   N  pairing_N                 sf_N                      residual\n";
  for (const auto& t : j["terms"]) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4d  %+.6e%+.6ei  %+.6e%+.6ei  %.2e\n", t["N"].get<int>(),
                  t["pairing_term"][0].get<double>(), t["pairing_term"][1].get<double>(),
                  t["sf_term"][0].get<double>(), t["sf_term"][1].get<double>(), t["residual"].get<double>());
    os << buf;
  }
  os << "pairing total      " << fmt(j["totals"]["pairing"][0].get<double>()) << "\n"
     << "sf integral        " << fmt(j["totals"]["sf_integral"][0].get<double>()) << "\n"
     << "sf residual        " << fmt(j["sf_residual"].get<double>()) << "\n"
     << "tail bound         " << fmt(j["tail_bound"].get<double>()) << "\n"
     << (j["verdict"] == "pass" ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace

extern "C" {

const char* chl_version(void) { return chernlab::kVersion; }

const char* chl_last_error(void) { return last_error.c_str(); }

void chl_string_free(char* s) { std::free(s); }

chl_status chl_instance_generate(const char* name, const char* params_json, uint64_t seed, chl_instance** out) {
  if (!name || !out) return fail(CHL_ERR_ARGUMENT, "chl_instance_generate: null argument");
  return guarded([&] {
    const Json params = params_json && *params_json ? Json::parse(params_json) : Json::object();
    *out = new chl_instance{chernlab::gen_fixture(name, params, seed)};
    return CHL_OK;
  });
}

chl_status chl_instance_parse(const char* json, chl_instance** out) {
  if (!json || !out) return fail(CHL_ERR_ARGUMENT, "chl_instance_parse: null argument");
  return guarded([&] {
    Json j = Json::parse(json);
    if (!j.is_object()) return fail(CHL_ERR_CONFIG, "instance must be a JSON object");
    *out = new chl_instance{std::move(j)};
    return CHL_OK;
  });
}

chl_status chl_instance_to_json(const chl_instance* inst, char** out) {
  if (!inst || !out) return fail(CHL_ERR_ARGUMENT, "chl_instance_to_json: null argument");
  return guarded([&] { return put_string(chernlab::dump_json(inst->json) + "\n", out); });
}

chl_status chl_instance_validate(const chl_instance* inst, chl_report** out) {
  if (!inst || !out) return fail(CHL_ERR_ARGUMENT, "chl_instance_validate: null argument");
  return guarded([&] {
    *out = new chl_report{chl_report::validation, chernlab::validate_instance(inst->json)};
    return CHL_OK;
  });
}

void chl_instance_free(chl_instance* inst) { delete inst; }

chl_status chl_suite_run(const char* config_json, const char* group, int64_t seed_override, int threads,
                         chl_report** out) {
  if (!config_json || !out) return fail(CHL_ERR_ARGUMENT, "chl_suite_run: null argument");
  return guarded([&] {
    Json j = Json::parse(config_json);
    if (j.is_object()) {
      if (seed_override >= 0) j["seed"] = static_cast<std::uint64_t>(seed_override);
      if (threads > 0) j["threads"] = threads;
      if (group && *group) j["groups"] = Json::array({group});
    }
    const chernlab::SuiteConfig cfg = chernlab::parse_config(j);
    *out = new chl_report{chl_report::suite, chernlab::run_suite(cfg)};
    return CHL_OK;
  });
}

chl_status chl_pair(const chl_instance* module, const chl_instance* g, int n_max, int s_nodes, double tail_tol,
                    int threads, chl_report** out) {
  if (!module || !g || !out) return fail(CHL_ERR_ARGUMENT, "chl_pair: null argument");
  if (n_max < 1) return fail(CHL_ERR_ARGUMENT, "chl_pair: n_max must be positive");
  return guarded([&] {
    chernlab::PairOptions opt;
    opt.N_max = n_max;
    opt.s_nodes = s_nodes;
    if (tail_tol > 0) opt.tail_tol = tail_tol;
    opt.threads = threads > 0 ? threads : 1;
    *out = new chl_report{chl_report::pair, chernlab::pair_report(module->json, g->json, opt)};
    return CHL_OK;
  });
}

chl_status chl_report_passed(const chl_report* r, int* passed) {
  if (!r || !passed) return fail(CHL_ERR_ARGUMENT, "chl_report_passed: null argument");
  switch (r->kind) {
    case chl_report::validation:
      *passed = r->json.value("pass", false);
      break;
    case chl_report::suite:
      *passed = chernlab::report_pass(r->json);
      break;
    case chl_report::pair:
      *passed = r->json.value("verdict", std::string()) == "pass";
      break;
  }
  return CHL_OK;
}

chl_status chl_report_to_json(const chl_report* r, char** out) {
  if (!r || !out) return fail(CHL_ERR_ARGUMENT, "chl_report_to_json: null argument");
  return guarded([&] { return put_string(chernlab::dump_json(r->json) + "\n", out); });
}

chl_status chl_report_to_text(const chl_report* r, char** out) {
  if (!r || !out) return fail(CHL_ERR_ARGUMENT, "chl_report_to_text: null argument");
  return guarded([&] {
    switch (r->kind) {
      case chl_report::validation:
        return put_string(validation_text(r->json), out);
      case chl_report::suite:
        return put_string(chernlab::report_text(r->json), out);
      case chl_report::pair:
        return put_string(pair_text(r->json), out);
    }
    return fail(CHL_ERR_INTERNAL, "unknown report kind");
  });
}

void chl_report_free(chl_report* r) { delete r; }

chl_status chl_explain(const char* report_json, const char* item_id, char** out) {
  if (!report_json || !item_id || !out) return fail(CHL_ERR_ARGUMENT, "chl_explain: null argument");
  return guarded([&] {
    const Json j = Json::parse(report_json);
    try {
      return put_string(chernlab::explain(j, item_id), out);
    } catch (const chernlab::ConfigError&) {
      throw;
    } catch (const chernlab::Error& e) {
      return fail(CHL_ERR_NOT_FOUND, e.what());
    }
  });
}

}  // extern "C"
