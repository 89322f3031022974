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

#include "dimdecomp/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/lambert_w.hpp>

namespace dimdecomp {

namespace {

constexpr int kBisectionMaxIterations = 200;
constexpr double kPminLow = 1.0 + 1e-9;
constexpr double kPminHigh = 1e6;
constexpr int kPminScanPoints = 4000;

void require_truncation(int S, long long N) {
  if (S < 0 || S >= N) throw std::invalid_argument("S must satisfy 0 ≤ S < N");
}

double to_double(const BigInt& v) {
  if (v == 0) return 0.0;
  if (boost::multiprecision::msb(abs(v)) < 1000) return v.convert_to<double>();
  return v > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

// log of a positive integer that may exceed the double range.
double log_big(const BigInt& v) {
  const auto bits = boost::multiprecision::msb(v);
  if (bits < 1000) return std::log(v.convert_to<double>());
  const unsigned shift = static_cast<unsigned>(bits - 60);
  const BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) + shift * std::numbers::ln2;
}

// Exact value of a finite double.
BigRational to_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite variance sum");
  if (x == 0.0) return BigRational(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  BigRational r{BigInt(scaled)};
  const int shift = exp - 53;
  if (shift >= 0)
    r *= BigRational(BigInt(1) << shift);
  else
    r /= BigRational(BigInt(1) << -shift);
  return r;
}

std::size_t checked_dim(std::span<const double> V) {
  if (V.size() < 2) throw std::invalid_argument("variance-by-cardinality vector needs N+1 >= 2 entries");
  const auto N = V.size() - 1;
  if (static_cast<long long>(N) > kMaxErrorDim) throw std::invalid_argument("dimension exceeds error-calculus cap");
  return N;
}

}  // namespace

BigInt generalized_binomial_exact(long long r, int k) {
  if (k < 0) return 0;
  BigInt result = 1;
  for (int j = 1; j <= k; ++j) {
    // After step j the value is C(r, j), an integer for integer r.
    result *= BigInt(r - j + 1);
    result /= j;
  }
  return result;
}

double generalized_binomial(double r, int k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (std::isfinite(r) && r == std::floor(r) && std::abs(r) < 0x1.0p53)
    return to_double(generalized_binomial_exact(static_cast<long long>(r), k));
  double result = 1.0;
  for (int j = 1; j <= k; ++j) result *= (r - j + 1) / j;
  return result;
}

BigInt coeff_b_exact(int S, long long s) {
  if (S < 0 || s < 0) throw std::invalid_argument("coeff_b needs S >= 0 and s >= 0");
  BigInt acc = 0;
  for (int k = 0; k <= S; ++k) {
    const BigInt a = generalized_binomial_exact(s - S + k - 1, k);
    acc += a * a * generalized_binomial_exact(s, S - k);
  }
  return acc;
}

double coeff_b(int S, long long s) { return to_double(coeff_b_exact(S, s)); }

double add_error(int S, std::span<const double> V) {
  const auto N = checked_dim(V);
  require_truncation(S, static_cast<long long>(N));
  double acc = 0.0;
  for (std::size_t s = static_cast<std::size_t>(S) + 1; s <= N; ++s) acc += V[s];
  return acc;
}

double add_error(int S, const VarianceMap& variances) {
  const auto V = variances.by_cardinality();
  return add_error(S, V);
}

ErrorBudget rdd_expected_error(int S, std::span<const double> V) {
  const auto N = checked_dim(V);
  require_truncation(S, static_cast<long long>(N));
  ErrorBudget b;
  b.S = S;
  b.N = static_cast<int>(N);
  for (std::size_t s = 1; s <= N; ++s) b.total_variance += V[s];
  for (std::size_t s = static_cast<std::size_t>(S) + 1; s <= N; ++s) {
    const double coeff = 1.0 + coeff_b(S, static_cast<long long>(s));
    b.per_cardinality.push_back({static_cast<int>(s), V[s], coeff});
    b.e_add += V[s];
    if (V[s] != 0.0) b.e_rdd_expected += coeff * V[s];
  }
  const BoundCoefficients c = error_bounds(S, static_cast<long long>(N));
  b.lower_bound = c.lower * b.e_add;
  b.upper_bound = b.e_add == 0.0 ? 0.0 : c.upper * b.e_add;
  return b;
}

ErrorBudget rdd_expected_error(int S, const VarianceMap& variances) {
  const auto V = variances.by_cardinality();
  return rdd_expected_error(S, V);
}

BoundCoefficients error_bounds(int S, long long N) {
  require_truncation(S, N);
  if (N > kMaxErrorDim) throw std::invalid_argument("dimension exceeds error-calculus cap");
  BoundCoefficients c;
  c.lower = to_double(1 + coeff_b_exact(S, S + 1));
  c.upper = to_double(1 + coeff_b_exact(S, N));
  return c;
}

ExactBoundCheck check_bounds_exact(int S, std::span<const double> V) {
  const auto N = checked_dim(V);
  require_truncation(S, static_cast<long long>(N));
  BigRational e_add = 0, e_rdd = 0;
  for (std::size_t s = static_cast<std::size_t>(S) + 1; s <= N; ++s) {
    const BigRational v = to_rational(V[s]);
    e_add += v;
    e_rdd += BigRational(1 + coeff_b_exact(S, static_cast<long long>(s))) * v;
  }
  ExactBoundCheck out;
  out.add_positive = e_add > 0;
  const BigRational lower = BigRational(BigInt(1) << (S + 1)) * e_add;
  const BigRational upper = BigRational(1 + coeff_b_exact(S, static_cast<long long>(N))) * e_add;
  out.lower_holds = lower <= e_rdd;
  out.upper_holds = e_rdd <= upper;
  return out;
}

std::vector<std::pair<int, int>> coefficient_monotonicity_violations(int max_S, int max_s) {
  std::vector<std::pair<int, int>> out;
  for (int S = 0; S <= max_S; ++S) {
    BigInt prev = coeff_b_exact(S, 0);
    for (int s = 1; s <= max_s; ++s) {
      BigInt cur = coeff_b_exact(S, s);
      if (cur < prev) out.emplace_back(S, s - 1);
      prev = std::move(cur);
    }
  }
  return out;
}

void DecayModel::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("decay model needs C > 0");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("decay model needs p > 1");
  if (N < 1 || N > kMaxErrorDim) throw std::invalid_argument("decay model dimension out of range");
}

double DecayModel::total_variance() const { return C * std::expm1(N * std::log1p(1.0 / p)); }

DecayCurves decay_curves(const DecayModel& model) {
  model.validate();
  DecayCurves out;
  out.model = model;
  out.total_variance = model.total_variance();
  const int N = model.N;
  const double log_p = std::log(model.p);

  std::vector<BigInt> choose(static_cast<std::size_t>(N) + 1);
  for (int s = 0; s <= N; ++s) choose[s] = generalized_binomial_exact(N, s);

  auto weighted = [&](const BigInt& coeff, int s) {
    const double c = to_double(coeff);
    if (std::isfinite(c) && c < 1e300) return c * std::pow(model.p, -s);
    return std::exp(log_big(coeff) - s * log_p);
  };

  for (int S = 0; S < N; ++S) {
    DecayRow row;
    row.S = S;
    for (int s = S + 1; s <= N; ++s) {
      row.e_add += weighted(choose[s], s);
      row.e_rdd += weighted((1 + coeff_b_exact(S, s)) * choose[s], s);
    }
    row.e_add *= model.C;
    row.e_rdd *= model.C;
    row.e_add_norm = row.e_add / out.total_variance;
    row.e_rdd_norm = row.e_rdd / out.total_variance;
    out.rows.push_back(row);
  }
  return out;
}

double lambert_w0(double x) {
  constexpr double kBranch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < kBranch) {
    std::ostringstream msg;
    msg << "lambert_w0 is defined for x >= -1/e, got " << x;
    throw std::domain_error(msg.str());
  }
  if (std::isinf(x)) return x;
  return boost::math::lambert_w0(x);
}

double pmin_residual(double p, int N) {
  return 2.0 / p - (N - 1.0) * std::pow(1.0 + 1.0 / p, N) / ((1.0 + p) * (1.0 + p));
}

double dimension_for_pmin(double p) {
  if (!(p > 1.0)) throw std::domain_error("threshold rate must exceed 1");
  const double L = std::log1p(1.0 / p);
  return 1.0 + lambert_w0(2.0 * (1.0 + p) * L) / L;
}

namespace {

template <class F>
std::pair<double, int> bisect(F&& f, double lo, double hi) {
  double f_lo = f(lo);
  int it = 0;
  for (; it < kBisectionMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return {mid, it + 1};
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return {std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi, it};
}

}  // namespace

PminResult pmin_for_N(int N) {
  if (N < 2) throw std::invalid_argument("pmin_for_N needs N >= 2");
  PminResult out;
  out.N = N;

  auto residual = [N](double p) { return pmin_residual(p, N); };
  const double r_lo = residual(kPminLow);
  const double r_hi = residual(kPminHigh);
  if ((r_lo < 0.0) == (r_hi < 0.0)) {
    std::ostringstream msg;
    msg << "no threshold root bracketed in (1, 1e6] for N = " << N;
    throw std::domain_error(msg.str());
  }

  // The residual is not assumed monotone; require a single sign change.
  const double log_lo = std::log(kPminLow), log_hi = std::log(kPminHigh);
  double prev = r_lo;
  for (int i = 1; i <= kPminScanPoints; ++i) {
    const double p = std::exp(log_lo + (log_hi - log_lo) * i / kPminScanPoints);
    const double r = residual(p);
    if (r != 0.0 && prev != 0.0 && (r < 0.0) != (prev < 0.0)) ++out.sign_changes;
    if (r != 0.0) prev = r;
  }
  if (out.sign_changes != 1) {
    std::ostringstream msg;
    msg << "threshold residual changes sign " << out.sign_changes << " times for N = " << N;
    throw std::domain_error(msg.str());
  }

  const auto [root, iters] = bisect(residual, kPminLow, kPminHigh);
  out.p_min = root;
  out.iterations = iters;
  out.residual = residual(root);

  auto closed = [N](double p) { return dimension_for_pmin(p) - N; };
  out.p_min_closed_form = bisect(closed, kPminLow, kPminHigh).first;
  return out;
}

ContrivedReport contrived_example() {
  ContrivedReport r;
  std::vector<double> V(static_cast<std::size_t>(r.N) + 1, 0.0);
  V[1] = 0.999;
  V[static_cast<std::size_t>(r.N)] = 0.001;
  const ErrorBudget b1 = rdd_expected_error(1, V);
  const ErrorBudget b2 = rdd_expected_error(2, V);
  r.e_add_1 = b1.e_add;
  r.e_add_2 = b2.e_add;
  r.coeff_1 = 1.0 + coeff_b(1, r.N);
  r.coeff_2 = 1.0 + coeff_b(2, r.N);
  r.e_rdd_1 = b1.e_rdd_expected;
  r.e_rdd_2 = b2.e_rdd_expected;
  r.inversion = r.e_rdd_2 > r.e_rdd_1;
  return r;
}

}  // namespace dimdecomp
