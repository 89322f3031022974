// Copyright 2026 The dimdecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimdecomp/decomp.hpp"

namespace dimdecomp::cli {

/// Raised for any malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MarginalConfig {
  std::string kind = "uniform";  // "uniform" or "normal"
  double lo = -1.0;
  double hi = 1.0;
};

struct FunctionConfig {
  std::string name = "product_linear";
  std::vector<double> a;  // product_linear, sobol_g (empty: all ones / i)
  double ishigami_a = 7.0;
  double ishigami_b = 0.1;
  std::vector<PolyTerm> terms;  // polynomial
  double value = 0.0;           // constant
};

struct McConfig {
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  int streams = 8;
  int threads = 0;
};

struct Figure1Config {
  int N = 20;
  std::vector<double> p{5.0, 50.0};
  double C = 1.0;
  int n_min = 3;
  int n_max = 100;
};

struct VerifyConfig {
  int max_dim = 5;
};

struct RunConfig {
  FunctionConfig function;
  int N = 3;
  /// One entry broadcasts to all N coordinates. Empty picks the function's
  /// natural domain: uniform(0, 1) for sobol_g, uniform(-pi, pi) for ishigami,
  /// uniform(-1, 1) otherwise.
  std::vector<MarginalConfig> marginals;
  /// Unset: 24 for ishigami, one more than the largest power for polynomial,
  /// 3 for product_linear, 2 otherwise.
  std::optional<int> quad_order;
  /// Unset: two panels for sobol_g (kink at 1/2), one otherwise.
  std::optional<int> quad_panels;
  std::vector<int> S;  // empty: every S < N
  McConfig mc;
  std::string output = "out";
  Figure1Config figure1;
  VerifyConfig verify;
};

/// Parses a JSON document; unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Checks ranges and cross-field consistency.
void validate(const RunConfig& cfg);

ProblemSpec make_problem(const RunConfig& cfg);
/// Requested truncation orders, each checked against 0 <= S < N.
std::vector<int> truncation_orders(const RunConfig& cfg);

}  // namespace dimdecomp::cli
