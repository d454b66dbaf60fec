// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chernlab/chernlab.h"

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct Freer {
  void operator()(char* s) const { chl_string_free(s); }
  void operator()(chl_instance* p) const { chl_instance_free(p); }
  void operator()(chl_report* p) const { chl_report_free(p); }
};
using Str = std::unique_ptr<char, Freer>;
using Inst = std::unique_ptr<chl_instance, Freer>;
using Report = std::unique_ptr<chl_report, Freer>;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

// Numeric failures are verification failures; everything else is usage.
int error_exit(chl_status s, const std::string& what) {
  std::cerr << "chernlab: " << what << ": " << chl_last_error() << "\n";
  return s == CHL_ERR_NUMERIC ? kFail : kUsage;
}

std::string take(char* s) { return Str(s).get(); }

int load_instance(const std::string& path, Inst& out) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "chernlab: cannot read " << path << "\n";
    return kUsage;
  }
  chl_instance* p = nullptr;
  if (chl_status s = chl_instance_parse(text.c_str(), &p)) return error_exit(s, path);
  out.reset(p);
  return kPass;
}

// Text to stdout, JSON to a file (or stdout with --json); exit by verdict.
int finish(const Report& r, const std::string& json_path, bool json_stdout) {
  char* json = nullptr;
  char* text = nullptr;
  if (chl_status s = chl_report_to_json(r.get(), &json)) return error_exit(s, "report");
  const std::string js = take(json);
  if (json_stdout) {
    std::cout << js;
  } else {
    if (chl_status s = chl_report_to_text(r.get(), &text)) return error_exit(s, "report");
    std::cout << take(text);
  }
  if (!json_path.empty() && !write_file(json_path, js)) {
    std::cerr << "chernlab: cannot write " << json_path << "\n";
    return kUsage;
  }
  int passed = 0;
  chl_report_passed(r.get(), &passed);
  return passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chernlab: finite-dimensional Chern character and spectral flow verification"};
  app.set_version_flag("--version", std::string(chl_version()));
  app.require_subcommand(1);

  std::string instance_path;
  bool json_stdout = false;
  auto* validate = app.add_subcommand("validate", "validate a serialized instance");
  validate->add_option("instance", instance_path, "instance JSON")->required();
  validate->add_flag("--json", json_stdout, "print the JSON report instead of text");

  std::string gen_name, gen_params, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a fixture instance");
  gen->add_option("name", gen_name,
                  "random_weak_cq, exterior_strong, discrete_circle, getzler_trivial or circle_g")
      ->required();
  gen->add_option("-p,--params", gen_params, "generator parameters as a JSON object");
  gen->add_option("-s,--seed", gen_seed, "seed")->required();
  gen->add_option("-o,--output", gen_out, "output file (default stdout)");

  std::string config_path, group, report_out, text_out;
  std::int64_t seed = -1;
  int jobs = 0;
  auto* suite = app.add_subcommand("suite", "run the verification suite");
  suite->add_option("-c,--config", config_path, "config JSON")->required();
  suite->add_option("--group", group, "run a single group");
  suite->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
  suite->add_option("-j,--jobs", jobs, "groups run in parallel (CHERNLAB_THREADS overrides)")
      ->check(CLI::PositiveNumber);
  suite->add_option("-o,--output", report_out, "report JSON path (default from config)");
  suite->add_option("--text", text_out, "plain-text summary path (default from config)");

  std::string module_path, g_path, pair_out;
  int nmax = 10, s_nodes = 0;
  double tail_tol = 1e-6;
  auto* pair = app.add_subcommand("pair", "pair Ch of an odd module with Ch(g)");
  pair->add_option("-m,--module", module_path, "odd module JSON")->required();
  pair->add_option("-g", g_path, "matrix element g JSON")->required();
  pair->add_option("--nmax", nmax, "truncation N_max")->check(CLI::PositiveNumber);
  pair->add_option("--s-nodes", s_nodes, "Gauss nodes in s (0: automatic)")->check(CLI::NonNegativeNumber);
  pair->add_option("--tail-tol", tail_tol, "required certified tail")->check(CLI::PositiveNumber);
  pair->add_option("-o,--output", pair_out, "report JSON path");
  pair->add_flag("--json", json_stdout, "print the JSON report instead of text");

  std::string explain_report, explain_id;
  auto* explain = app.add_subcommand("explain", "explain one check of a stored report");
  explain->add_option("report", explain_report, "report JSON")->required();
  explain->add_option("id", explain_id, "check id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  if (*validate) {
    Inst inst;
    if (int rc = load_instance(instance_path, inst)) return rc;
    chl_report* r = nullptr;
    if (chl_status s = chl_instance_validate(inst.get(), &r)) return error_exit(s, "validate");
    return finish(Report(r), "", json_stdout);
  }

  if (*gen) {
    chl_instance* p = nullptr;
    if (chl_status s = chl_instance_generate(gen_name.c_str(), gen_params.c_str(), gen_seed, &p))
      return error_exit(s, "gen " + gen_name);
    Inst inst(p);
    char* json = nullptr;
    if (chl_status s = chl_instance_to_json(inst.get(), &json)) return error_exit(s, "gen");
    const std::string js = take(json);
    if (gen_out.empty()) {
      std::cout << js;
    } else if (!write_file(gen_out, js)) {
      std::cerr << "chernlab: cannot write " << gen_out << "\n";
      return kUsage;
    }
    return kPass;
  }

  if (*suite) {
    std::string config;
    if (!read_file(config_path, config)) {
      std::cerr << "chernlab: cannot read " << config_path << "\n";
      return kUsage;
    }
    if (const char* env = std::getenv("CHERNLAB_THREADS")) {
      try {
        jobs = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "chernlab: CHERNLAB_THREADS must be a positive integer\n";
        return kUsage;
      }
      if (jobs < 1) {
        std::cerr << "chernlab: CHERNLAB_THREADS must be a positive integer\n";
        return kUsage;
      }
    }
    chl_report* r = nullptr;
    if (chl_status s = chl_suite_run(config.c_str(), group.empty() ? nullptr : group.c_str(), seed, jobs, &r))
      return error_exit(s, "suite");
    Report rep(r);
    // default output paths come from the config
    if (report_out.empty() || text_out.empty()) {
      char* json = nullptr;
      chl_report_to_json(rep.get(), &json);
      const std::string js = take(json);
      const auto out_key = [&](const std::string& key) {
        const auto pos = js.find("\"output\"");
        if (pos == std::string::npos) return std::string();
        const auto k = js.find("\"" + key + "\"", pos);
        const auto end = js.find('}', pos);
        if (k == std::string::npos || k > end) return std::string();
        const auto q1 = js.find('"', js.find(':', k) + 1);
        const auto q2 = js.find('"', q1 + 1);
        return js.substr(q1 + 1, q2 - q1 - 1);
      };
      if (report_out.empty()) report_out = out_key("json");
      if (text_out.empty()) text_out = out_key("text");
    }
    if (!text_out.empty()) {
      char* text = nullptr;
      chl_report_to_text(rep.get(), &text);
      if (!write_file(text_out, take(text))) {
        std::cerr << "chernlab: cannot write " << text_out << "\n";
        return kUsage;
      }
    }
    return finish(rep, report_out, false);
  }

  if (*pair) {
    Inst module, g;
    if (int rc = load_instance(module_path, module)) return rc;
    if (int rc = load_instance(g_path, g)) return rc;
    chl_report* r = nullptr;
    if (chl_status s = chl_pair(module.get(), g.get(), nmax, s_nodes, tail_tol, 1, &r))
      return error_exit(s, "pair");
    return finish(Report(r), pair_out, json_stdout);
  }

  if (*explain) {
    std::string text;
    if (!read_file(explain_report, text)) {
      std::cerr << "chernlab: cannot read " << explain_report << "\n";
      return kUsage;
    }
    char* out = nullptr;
    if (chl_status s = chl_explain(text.c_str(), explain_id.c_str(), &out)) return error_exit(s, "explain");
    std::cout << take(out);
    return kPass;
  }
  return kUsage;
}
