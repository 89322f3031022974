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
#include <string>
#include <vector>

#include "dimdecomp/decomp.hpp"

namespace dimdecomp {

struct BuiltinCase {
  std::string name;
  ProblemSpec problem;
};

/// Builtin problems with min_dim <= N <= max_dim: product_linear (a = 1) on
/// uniform(-1, 1), product_linear (a_i = 0.5, -0.4, ...) on N(0, 1), sobol_g
/// (a_i = i) on uniform(0, 1) with two quadrature panels, and ishigami at N = 3.
std::vector<BuiltinCase> builtin_cases(int min_dim, int max_dim);

/// product_linear with a = 1 on uniform(-1, 1)^N, quadrature order 3.
ProblemSpec linear_product_problem(int N);

struct Violation {
  std::string where;
  double measured = 0.0;
};

struct CheckResult {
  std::string id;
  std::string title;
  bool pass = false;
  double measured = 0.0;   // worst statistic of the check
  double tolerance = 0.0;  // bound the statistic is compared against
  std::string detail;      // location of the worst case
  std::vector<Violation> violations;  // every failing item, at most kMaxViolations
};

inline constexpr std::size_t kMaxViolations = 64;

struct VerifyOptions {
  /// Samples per Monte Carlo gate in the acceptance checks.
  std::size_t n = 1000000;
  std::uint64_t seed = 42;
  /// Builtin analytic-vs-sampling gate: largest N and samples per (case, S).
  int builtin_max_dim = 5;
  std::size_t builtin_n = 100000;
  /// Shifts one stored ANOVA value before the structural checks.
  bool corrupt_table = false;
};

CheckResult check_coefficients();
CheckResult check_zero_order_rdd(const VerifyOptions& options);
CheckResult check_rdd_against_sampling(const VerifyOptions& options);
CheckResult check_add_against_sampling(const VerifyOptions& options);
CheckResult check_structure(const VerifyOptions& options);
CheckResult check_sobol_identity();
CheckResult check_bound_ordering();
CheckResult check_pmin();
CheckResult check_decay_shape();
CheckResult check_contrived();
CheckResult check_optimality(const VerifyOptions& options);
CheckResult check_limit();
/// Expected anchored error, analytic vs sampling, for every builtin case with
/// N <= builtin_max_dim and every S < N.
CheckResult check_builtin_agreement(const VerifyOptions& options);

/// Structural residuals of both decompositions plus analytic-vs-sampling
/// agreement of the expected anchored error at each S, for one problem.
CheckResult check_problem(const ProblemSpec& problem, const std::vector<int>& truncations,
                          const VerifyOptions& options);

/// The twelve acceptance checks AC1..AC12 in order.
std::vector<CheckResult> acceptance_suite(const VerifyOptions& options);

/// "PASS AC1 title (measured=..., tolerance=...) detail"
std::string format_result(const CheckResult& result);

}  // namespace dimdecomp
