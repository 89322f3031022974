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

#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dimdecomp/variance.hpp"

namespace dimdecomp {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Largest dimension accepted by the cardinality-only error calculus.
inline constexpr long long kMaxErrorDim = 10000;

/// r(r-1)...(r-k+1)/k! for k > 0, 1 for k = 0 and 0 for k < 0, valid for any
/// real r. Integer r goes through exact integer arithmetic.
double generalized_binomial(double r, int k);
/// Exact generalized binomial for integer r (negative r allowed).
BigInt generalized_binomial_exact(long long r, int k);

/// Coefficient weighting order-s variance in the expected anchored error:
///   b_S(s) = sum_{k=0}^{S} C(s-S+k-1, k)^2 C(s, S-k).
/// Throws std::invalid_argument for negative S or s.
BigInt coeff_b_exact(int S, long long s);
double coeff_b(int S, long long s);

/// ANOVA truncation error sum_{s>S} V_s, where V[s] = sum_{|u|=s} sigma_u^2
/// and V has N+1 entries. Throws std::invalid_argument unless 0 <= S < N.
double add_error(int S, std::span<const double> V);
double add_error(int S, const VarianceMap& variances);

struct CardinalityTerm {
  int s = 0;
  double variance_sum = 0.0;  // V_s
  double coefficient = 0.0;   // 1 + b_S(s)
};

/// Error summary for one truncation order S.
struct ErrorBudget {
  int S = 0;
  int N = 0;
  double e_add = 0.0;           // ANOVA truncation error
  double e_rdd_expected = 0.0;  // expected anchored error, anchor ~ input law
  double lower_bound = 0.0;     // 2^{S+1} e_add
  double upper_bound = 0.0;     // (1 + b_S(N)) e_add
  double total_variance = 0.0;
  std::vector<CardinalityTerm> per_cardinality;  // s = S+1..N
};

/// E[e_{S,R}] = sum_{s=S+1}^{N} (1 + b_S(s)) V_s, plus the ANOVA error and
/// the bounds. Throws std::invalid_argument unless 0 <= S < N.
ErrorBudget rdd_expected_error(int S, std::span<const double> V);
ErrorBudget rdd_expected_error(int S, const VarianceMap& variances);

struct BoundCoefficients {
  double lower = 0.0;  // 1 + b_S(S+1) = 2^{S+1}
  double upper = 0.0;  // 1 + b_S(N)
};

/// Throws std::invalid_argument unless 0 <= S < N <= kMaxErrorDim. The upper
/// coefficient becomes +inf when it exceeds the double range.
BoundCoefficients error_bounds(int S, long long N);

/// Checks 2^{S+1} e_add <= E[e_{S,R}] <= (1 + b_S(N)) e_add in exact rational
/// arithmetic, taking the doubles in V as exact inputs.
struct ExactBoundCheck {
  bool lower_holds = false;
  bool upper_holds = false;
  bool add_positive = false;
};
ExactBoundCheck check_bounds_exact(int S, std::span<const double> V);

/// Pairs (S, s) with 1 + b_S(s+1) < 1 + b_S(s), for S <= max_S and s < max_s.
std::vector<std::pair<int, int>> coefficient_monotonicity_violations(int max_S, int max_s);

/// Geometric variance decay sigma_u^2 = C p^{-|u|}.
struct DecayModel {
  double C = 1.0;
  double p = 2.0;
  int N = 2;
  /// Throws std::invalid_argument unless C > 0, p > 1 and 1 <= N <= kMaxErrorDim.
  void validate() const;
  /// C [(1 + 1/p)^N - 1].
  double total_variance() const;
};

struct DecayRow {
  int S = 0;
  double e_add = 0.0;
  double e_rdd = 0.0;
  double e_add_norm = 0.0;  // e_add / sigma^2
  double e_rdd_norm = 0.0;  // e_rdd / sigma^2
};

struct DecayCurves {
  DecayModel model;
  double total_variance = 0.0;
  std::vector<DecayRow> rows;  // S = 0..N-1
};

/// Both error sums with the decay bound taken as an equality:
///   e_add(S) = C sum_{s>S} C(N,s) p^{-s},
///   e_rdd(S) = C sum_{s>S} (1 + b_S(s)) C(N,s) p^{-s}.
DecayCurves decay_curves(const DecayModel& model);

/// Principal branch of the Lambert W function, w e^w = x for x >= -1/e.
/// Halley iteration from a piecewise initial guess: the branch-point series
/// below x = -0.32, x - x^2 + 1.5 x^3 near zero, log1p(x) up to e, and the
/// asymptotic log x - log log x + log log x / log x beyond.
/// Throws std::domain_error for x < -1/e or NaN.
double lambert_w0(double x);

/// 2/p - (N-1)(1+1/p)^N / (1+p)^2; vanishes at the threshold rate.
double pmin_residual(double p, int N);
/// N as a function of the threshold rate p through the Lambert W closed form
///   N = 1 + W(2 (1+p) L) / L,  L = log(1 + 1/p).
double dimension_for_pmin(double p);

struct PminResult {
  int N = 0;
  double p_min = 0.0;              // bisection root of pmin_residual
  double residual = 0.0;           // pmin_residual at p_min
  double p_min_closed_form = 0.0;  // root of dimension_for_pmin(p) = N
  int iterations = 0;
  int sign_changes = 0;  // over a log-spaced scan of the bracket
};

/// Threshold decay rate above which the expected anchored error no longer
/// rises from S = 0 to S = 1. Brackets the root in (1 + 1e-9, 1e6]; throws
/// std::domain_error when no root is bracketed or the scan finds more than one
/// sign change. Requires N >= 2.
PminResult pmin_for_N(int N);

/// 100-variable example with V_1 = 0.999 and V_100 = 0.001 (units of sigma^2).
struct ContrivedReport {
  int N = 100;
  double e_add_1 = 0.0;
  double e_add_2 = 0.0;
  double coeff_1 = 0.0;  // 1 + b_1(N)
  double coeff_2 = 0.0;  // 1 + b_2(N)
  double e_rdd_1 = 0.0;
  double e_rdd_2 = 0.0;
  bool inversion = false;  // E[e_{2,R}] > E[e_{1,R}]
};
ContrivedReport contrived_example();

}  // namespace dimdecomp
