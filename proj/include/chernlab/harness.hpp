// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chernlab/serialize.hpp"
#include "chernlab/spectral.hpp"

namespace chernlab {

constexpr const char* kVersion = "1.0.0";

// Bad configuration or usage, as opposed to a failed verification.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Fixture generators: random_weak_cq, exterior_strong, discrete_circle,
// getzler_trivial, and circle_g for the loop g used by the pairing.
Json gen_fixture(const std::string& name, const Json& params, std::uint64_t seed);

// Validates any serialized instance (algebra, modules, matrix element).
Json validate_instance(const Json& instance);

struct FixtureSpec {
  std::string name, label;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> groups;  // empty: every applicable group
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::vector<FixtureSpec> fixtures;
  std::map<std::string, double> tol;
  std::map<std::string, int> budget;
  std::vector<std::string> groups;
  int threads = 1;
  bool timing = true;
  std::string json_out, text_out;
  Json echo;
};

const std::vector<std::string>& suite_groups();
std::map<std::string, double> default_tolerances();
std::map<std::string, int> default_budget();
// Throws ConfigError.
SuiteConfig parse_config(const Json& j);

// RunReport: {version, config, environment, groups: [{name, status, error,
// checks: [...], seconds}], summary, pass}. Groups run on up to
// cfg.threads threads; results do not depend on the thread count.
Json run_suite(const SuiteConfig& cfg);
std::string report_text(const Json& report);
bool report_pass(const Json& report);
// Throws Error for an unknown id.
std::string explain(const Json& report, const std::string& id);

// PairingReport as JSON, with verdict.
struct PairOptions {
  int N_max = 10;
  int s_nodes = 0;
  double tail_tol = 1e-6;
  double pairing_tol = 1e-6;
  double term_tol = 1e-7;
  int threads = 1;
};
Json pair_report(const Json& module, const Json& g, const PairOptions& opt);

}  // namespace chernlab
