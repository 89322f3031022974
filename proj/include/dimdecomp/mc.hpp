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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimdecomp/decomp.hpp"

namespace dimdecomp {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Plain Monte Carlo settings. The n samples are split into `streams`
/// contiguous blocks; block i draws from Rng(seed + i). Results depend only on
/// (n, seed, streams), never on the thread count.
struct McOptions {
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  int streams = 8;
  int threads = 0;  // 0 = hardware concurrency
};

/// Running mean/variance with pairwise merging.
class MeanAccumulator {
 public:
  void add(double v);
  void merge(const MeanAccumulator& other);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const;
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Mean of [y(x) - yhat_{S,A}(x)]^2 over i.i.d. x. Needs an interpolating
/// table and n >= 1000; 0 <= S <= N.
McEstimate mc_add_error(const ProblemSpec& problem, const AnovaTable& table, int S, const McOptions& options);

/// Mean of [y(x) - yhat_{S,R}(x; c)]^2 over i.i.d. x for a fixed anchor c,
/// using the direct anchored form. Needs n >= 1000 and 0 <= S < N.
McEstimate mc_rdd_error(const ProblemSpec& problem, int S, std::span<const double> anchor, const McOptions& options);

/// Same squared error averaged over independent pairs (x, c), both drawn from
/// the input measure (x first, then c). Needs n >= 10^4 and 0 <= S < N.
McEstimate mc_expected_rdd_error(const ProblemSpec& problem, int S, const McOptions& options);

struct PerturbationResult {
  double amplitude = 0.0;   // largest |alpha_u| used
  double error = 0.0;       // mean (y - yhat_S)^2
  double error_se = 0.0;
  double shift_sq = 0.0;    // mean (yhat_{S,A} - yhat_S)^2
  double cross = 0.0;       // mean 2 (y - yhat_{S,A}) (yhat_S - yhat_{S,A}), expectation 0
  double cross_se = 0.0;
  bool above_add_error = false;  // error >= e_add - 3 error_se
  bool split_holds = false;      // |error - (e_add_measured + shift_sq)| <= 3 cross_se
};

struct OptimalityReport {
  int S = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double e_add = 0.0;           // analytic, from the table's variance components
  double e_add_measured = 0.0;  // Monte Carlo on the same samples
  double e_add_measured_se = 0.0;
  std::vector<PerturbationResult> perturbations;  // entry 0 is the zero perturbation
  bool all_pass = false;
};

/// Compares the S-variate ANOVA truncation with n_perturb random S-variate
/// competitors yhat_{S,A} + sum_{|u| <= S} alpha_u prod_{i in u} cos(w_i x_i + phi_i)
/// on a shared sample of x. Needs an interpolating table and 0 <= S < N.
OptimalityReport optimality_probe(const ProblemSpec& problem, const AnovaTable& table, int S, int n_perturb,
                                  const McOptions& options);

/// {"op":..., "S":..., "n":..., "seed":..., "mean":..., "std_error":...}
std::string to_json_record(const McEstimate& estimate, std::string_view op, int S);

}  // namespace dimdecomp
