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

#include "dimdecomp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dimdecomp/errors.hpp"
#include "dimdecomp/mc.hpp"
#include "dimdecomp/variance.hpp"

namespace dimdecomp {

namespace {

// Tracks the worst statistic of a check and where it occurred.
class Worst {
 public:
  Worst(std::string id, std::string title, double tolerance) {
    r_.id = std::move(id);
    r_.title = std::move(title);
    r_.tolerance = tolerance;
    r_.pass = true;
  }

  void observe(double value, bool ok, const std::string& where) {
    if (!ok) {
      if (r_.violations.size() < kMaxViolations) r_.violations.push_back({where, value});
      if (r_.pass || value > r_.measured) r_.detail = where;
      r_.pass = false;
    } else if (r_.pass && value >= r_.measured) {
      r_.detail = where;
    }
    r_.measured = std::max(r_.measured, value);
  }
  void observe(double value, const std::string& where) { observe(value, value <= r_.tolerance, where); }
  void fail(const std::string& where) { observe(r_.measured, false, where); }

  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

std::string where(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : items) {
    out << (first ? "" : " ") << k << "=" << v;
    first = false;
  }
  return out.str();
}

// Distance from the target in standard errors, after removing a roundoff floor.
double z_distance(const McEstimate& e, double want, double floor) {
  const double gap = std::max(0.0, std::abs(e.mean - want) - floor);
  if (gap == 0.0) return 0.0;
  return e.std_error > 0.0 ? gap / e.std_error : INFINITY;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::vector<double> linear_product_V(int N) {
  std::vector<double> V(N + 1, 0.0);
  for (int s = 1; s <= N; ++s) V[s] = generalized_binomial(N, s) * std::pow(3.0, -s);
  return V;
}

}  // namespace

ProblemSpec linear_product_problem(int N) {
  return ProblemSpec{ProductMeasure::iid(Marginal::uniform(-1, 1), N), product_linear(std::vector<double>(N, 1.0)), 3};
}

std::vector<BuiltinCase> builtin_cases(int min_dim, int max_dim) {
  std::vector<BuiltinCase> out;
  for (int N = std::max(1, min_dim); N <= max_dim; ++N) {
    out.push_back({"product_linear/uniform N=" + std::to_string(N), linear_product_problem(N)});
    std::vector<double> a(N);
    for (int i = 0; i < N; ++i) a[i] = (i % 2 == 0 ? 0.5 : -0.4) / (1 + i / 2);
    out.push_back({"product_linear/normal N=" + std::to_string(N),
                   ProblemSpec{ProductMeasure::iid(Marginal::standard_normal(), N), product_linear(a), 3}});
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) g[i] = i;
    out.push_back({"sobol_g N=" + std::to_string(N),
                   ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), N), sobol_g(g), 2, 2}});
    if (N == 3) {
      const double pi = std::numbers::pi;
      out.push_back({"ishigami N=3", ProblemSpec{ProductMeasure::iid(Marginal::uniform(-pi, pi), 3), ishigami(), 24}});
    }
  }
  return out;
}

CheckResult check_coefficients() {
  Worst w("AC1", "coefficient closed forms (exact integers)", 0.0);
  for (long long s = 0; s <= 30; ++s) {
    if (coeff_b_exact(1, s) != s * s - s + 1) w.observe(1, where({{"S", 1}, {"s", double(s)}}));
    if (4 * coeff_b_exact(2, s) != s * s * s * s - 2 * s * s * s - s * s + 2 * s + 4)
      w.observe(1, where({{"S", 2}, {"s", double(s)}}));
  }
  for (int S = 0; S <= 15; ++S)
    for (int s = 0; s <= S; ++s)
      if (coeff_b_exact(S, s) != 1) w.observe(1, where({{"S", double(S)}, {"s", double(s)}}));
  for (int S = 0; S <= 20; ++S)
    if (1 + coeff_b_exact(S, S + 1) != BigInt(1) << (S + 1)) w.observe(1, where({{"S", double(S)}, {"s", S + 1.0}}));
  return w.result();
}

CheckResult check_zero_order_rdd(const VerifyOptions& options) {
  Worst w("AC2", "zero-order expected anchored error is twice the variance", 3.0);
  const auto p = linear_product_problem(3);
  const double want = 74.0 / 27.0;
  const auto budget = rdd_expected_error(0, variance_components(AnovaTable::build(p)));
  w.observe(rel(budget.e_rdd_expected, want) <= 1e-12 ? 0.0 : INFINITY, "analytic vs 74/27");
  w.observe(rel(budget.e_rdd_expected, 2.0 * budget.total_variance) <= 1e-12 ? 0.0 : INFINITY, "analytic vs 2 sigma^2");
  const auto e = mc_expected_rdd_error(p, 0, {.n = options.n, .seed = options.seed});
  w.observe(z_distance(e, want, 0.0), "sampling z-score");
  return w.result();
}

CheckResult check_rdd_against_sampling(const VerifyOptions& options) {
  Worst w("AC3", "expected anchored error, analytic vs sampling, product_linear N=3..6", 3.0);
  const auto b = rdd_expected_error(1, variance_components(AnovaTable::build(linear_product_problem(3))));
  w.observe(rel(b.e_rdd_expected, 44.0 / 27.0) <= 1e-12 ? 0.0 : INFINITY, "N=3 S=1 analytic vs 44/27");
  std::uint64_t seed = options.seed + 1000;
  for (int N = 3; N <= 6; ++N) {
    const auto p = linear_product_problem(N);
    const auto v = variance_components(AnovaTable::build(p));
    for (int S = 0; S < N; ++S) {
      const auto budget = rdd_expected_error(S, v);
      const auto e = mc_expected_rdd_error(p, S, {.n = options.n, .seed = seed});
      seed += 100;
      w.observe(z_distance(e, budget.e_rdd_expected, 1e-12 * budget.total_variance),
                where({{"N", double(N)}, {"S", double(S)}}));
    }
  }
  return w.result();
}

CheckResult check_add_against_sampling(const VerifyOptions& options) {
  Worst w("AC4", "ANOVA truncation error, analytic vs sampling", 3.0);
  std::uint64_t seed = options.seed + 2000;
  for (int N = 3; N <= 4; ++N) {
    const auto p = linear_product_problem(N);
    const auto t = AnovaTable::build(p, {.interpolate = true});
    const auto v = variance_components(t);
    for (int S = 0; S < N; ++S) {
      const double analytic = add_error(S, v);
      if (N == 3 && S == 1) w.observe(rel(analytic, 10.0 / 27.0) <= 1e-12 ? 0.0 : INFINITY, "N=3 S=1 analytic vs 10/27");
      const auto e = mc_add_error(p, t, S, {.n = options.n, .seed = seed});
      seed += 100;
      w.observe(z_distance(e, analytic, 1e-12 * v.total()), where({{"N", double(N)}, {"S", double(S)}}));
    }
  }
  return w.result();
}

CheckResult check_structure(const VerifyOptions& options) {
  // measured is the worst residual divided by its tolerance.
  Worst w("AC5", "structural properties of both decompositions", 1.0);
  bool corrupt = options.corrupt_table;
  for (const auto& c : builtin_cases(2, 5)) {
    auto t = AnovaTable::build(c.problem);
    if (corrupt) {
      t.perturb_for_testing(Subset::of({0}, c.problem.dim()), 0, 1e-3 * t.scale());
      corrupt = false;
    }
    const double s = t.scale();
    const auto zm = zero_mean_residual(t);
    w.observe(zm.value / (1e-10 * s), c.name + " zero-mean at " + zm.where.to_string());
    const auto orth = orthogonality_residual(t);
    w.observe(orth.value / (1e-10 * s * s),
              c.name + " orthogonality at " + orth.where.to_string() + "," + orth.other.to_string());
    w.observe(grid_exactness_residual(t) / (1e-10 * s), c.name + " full-sum exactness");

    Rng rng(options.seed);
    const AnchoredTable at(c.problem, sample(c.problem.measure, rng));
    std::vector<std::vector<double>> points;
    for (int k = 0; k < 20; ++k) points.push_back(sample(c.problem.measure, rng));
    const auto ann = annihilation_residual(at, points);
    w.observe(ann.value / (1e-12 * at.scale()), c.name + " annihilation at " + ann.where.to_string());
    double full = 0.0;
    for (const auto& x : points)
      full = std::max(full, std::abs(at.truncated(c.problem.dim(), x) - c.problem.y(x)) /
                                std::max(std::abs(c.problem.y(x)), at.scale()));
    w.observe(full / 1e-10, c.name + " anchored full-sum exactness");
  }

  for (const auto& c : builtin_cases(2, 8)) {
    const int N = c.problem.dim();
    Rng rng(options.seed + static_cast<std::uint64_t>(N));
    std::vector<double> scratch(N);
    for (int S = 0; S <= std::min(3, N - 1); ++S) {
      const RddDirect direct(N, S);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const auto anchor = sample(c.problem.measure, rng);
        const auto x = sample(c.problem.measure, rng);
        const AnchoredTable at(c.problem, anchor);
        const double rec = at.truncated(S, x);
        const double dir = direct(c.problem.y, anchor, x, scratch);
        worst = std::max(worst, std::abs(rec - dir) / std::max(std::abs(dir), at.scale()));
      }
      w.observe(worst / 1e-10, c.name + " direct vs recursive S=" + std::to_string(S));
    }
  }
  return w.result();
}

CheckResult check_sobol_identity() {
  Worst w("AC6", "Sobol identity D_u = sum of sigma_v^2 over nonempty v in u", 1e-8);
  for (int N = 1; N <= 5; ++N) {
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) g[i] = i;
    const std::vector<BuiltinCase> cases{
        {"product_linear N=" + std::to_string(N),
         ProblemSpec{ProductMeasure::iid(Marginal::uniform(-1, 1), N), product_linear(std::vector<double>(N, 1.0)), 2}},
        {"sobol_g N=" + std::to_string(N),
         ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), N), sobol_g(g), 2, 2}},
    };
    for (const auto& c : cases) {
      const auto v = variance_components(AnovaTable::build(c.problem));
      for (const auto& u : all_subsets_up_to(N, N)) {
        if (u.is_empty()) continue;
        double sum = 0.0;
        for_each_submask(u.mask(), [&](Subset::Mask m) { sum += v.values()[m]; });
        w.observe(rel(sobol_D(c.problem, u), sum), c.name + " u=" + u.to_string());
      }
    }
  }
  return w.result();
}

CheckResult check_bound_ordering() {
  Worst w("AC7", "lower <= expected anchored error <= upper (exact arithmetic)", 0.0);
  int checked = 0;
  for (const auto& c : builtin_cases(2, 6)) {
    const auto V = variance_components(AnovaTable::build(c.problem)).by_cardinality();
    for (int S = 0; S < c.problem.dim(); ++S) {
      const auto chk = check_bounds_exact(S, V);
      if (!chk.add_positive) continue;
      ++checked;
      if (!chk.lower_holds) w.fail(c.name + " lower bound S=" + std::to_string(S));
      if (!chk.upper_holds) w.fail(c.name + " upper bound S=" + std::to_string(S));
    }
  }
  if (checked == 0) w.fail("no case with positive ANOVA error");
  return w.result();
}

CheckResult check_pmin() {
  // measured is the worst ratio of a deviation to its tolerance.
  Worst w("AC8", "threshold decay rate p_min(N)", 1.0);
  const auto r20 = pmin_for_N(20);
  w.observe(std::abs(r20.p_min - 21.5187) / 5e-4, where({{"N=20 p_min", r20.p_min}}));
  double prev = 0.0;
  for (int N = 3; N <= 100; ++N) {
    const auto r = pmin_for_N(N);
    w.observe(std::abs(r.residual) / 1e-10, where({{"residual N", double(N)}}));
    w.observe(std::abs(dimension_for_pmin(r.p_min) - N) / 1e-6, where({{"round trip N", double(N)}}));
    if (r.sign_changes != 1) w.fail(where({{"sign changes N", double(N)}}));
    if (!(r.p_min > prev)) w.fail(where({{"not increasing at N", double(N)}}));
    prev = r.p_min;
  }
  return w.result();
}

CheckResult check_decay_shape() {
  Worst w("AC9", "decay curve shapes at N=20 for p=5 and p=50", 0.0);
  for (double p : {5.0, 50.0}) {
    const auto c = decay_curves({1.0, p, 20});
    for (int S = 1; S < 20; ++S) {
      if (!(c.rows[S].e_add_norm < c.rows[S - 1].e_add_norm)) w.fail(where({{"e_add rises p", p}, {"S", double(S)}}));
      if (p == 50.0 && !(c.rows[S].e_rdd_norm < c.rows[S - 1].e_rdd_norm))
        w.fail(where({{"e_rdd rises p", p}, {"S", double(S)}}));
    }
    if (p == 5.0 && !(c.rows[1].e_rdd_norm > c.rows[0].e_rdd_norm)) w.fail("p=5 e_rdd(1) <= e_rdd(0)");
  }
  return w.result();
}

CheckResult check_contrived() {
  Worst w("AC10", "100-variable example: 9.902 and 24497.552 sigma^2", 1e-9);
  const auto r = contrived_example();
  w.observe(rel(r.e_rdd_1, 9.902), "E[e_1,R]");
  w.observe(rel(r.e_rdd_2, 24497.552), "E[e_2,R]");
  w.observe(rel(r.e_add_1, 0.001), "e_1,A");
  w.observe(rel(r.e_add_2, 0.001), "e_2,A");
  if (!r.inversion) w.fail("inversion not flagged");
  return w.result();
}

CheckResult check_optimality(const VerifyOptions& options) {
  Worst w("AC11", "ANOVA truncation beats 50 perturbed competitors, product_linear N=4", 0.0);
  const auto p = linear_product_problem(4);
  const auto t = AnovaTable::build(p, {.interpolate = true});
  for (int S : {1, 2}) {
    const auto report = optimality_probe(p, t, S, 50, {.n = std::min<std::size_t>(options.n, 200000), .seed = options.seed});
    for (std::size_t k = 0; k < report.perturbations.size(); ++k) {
      const auto& q = report.perturbations[k];
      if (!q.above_add_error) w.fail("S=" + std::to_string(S) + " perturbation " + std::to_string(k) + " below e_add");
      if (!q.split_holds) w.fail("S=" + std::to_string(S) + " perturbation " + std::to_string(k) + " split fails");
    }
  }
  return w.result();
}

CheckResult check_limit() {
  Worst w("AC12", "E[e_{N-1,R}] = (2/3)^N decreasing for N=2..20", 1e-12);
  double prev = INFINITY;
  for (int N = 2; N <= 20; ++N) {
    const auto b = rdd_expected_error(N - 1, linear_product_V(N));
    w.observe(rel(b.e_rdd_expected, std::ldexp(std::pow(3.0, -N), N)), where({{"N", double(N)}}));
    if (!(b.e_rdd_expected < prev)) w.fail(where({{"not decreasing at N", double(N)}}));
    prev = b.e_rdd_expected;
  }
  return w.result();
}

CheckResult check_builtin_agreement(const VerifyOptions& options) {
  Worst w("MC", "expected anchored error, analytic vs sampling, builtin functions", 3.0);
  std::uint64_t seed = options.seed + 5000;
  for (const auto& c : builtin_cases(2, std::min(6, options.builtin_max_dim))) {
    const auto v = variance_components(AnovaTable::build(c.problem));
    for (int S = 0; S < c.problem.dim(); ++S) {
      const auto budget = rdd_expected_error(S, v);
      const auto e = mc_expected_rdd_error(c.problem, S, {.n = options.builtin_n, .seed = seed});
      seed += 100;
      w.observe(z_distance(e, budget.e_rdd_expected, 1e-12 * budget.total_variance),
                c.name + " S=" + std::to_string(S));
    }
  }
  return w.result();
}

CheckResult check_problem(const ProblemSpec& problem, const std::vector<int>& truncations,
                          const VerifyOptions& options) {
  Worst w("PROBLEM", "configured problem: structure and sampling agreement", 3.0);
  const int N = problem.dim();
  auto t = AnovaTable::build(problem);
  if (options.corrupt_table) t.perturb_for_testing(Subset::of({0}, N), 0, 1e-3 * t.scale());
  const double s = t.scale();
  // Structural residuals are rescaled so that 3 marks their tolerance.
  const auto zm = zero_mean_residual(t);
  w.observe(3.0 * zm.value / (1e-10 * s), "zero-mean at " + zm.where.to_string());
  if (N >= 2) {
    const auto orth = orthogonality_residual(t);
    w.observe(3.0 * orth.value / (1e-10 * s * s),
              "orthogonality at " + orth.where.to_string() + "," + orth.other.to_string());
  }
  w.observe(3.0 * grid_exactness_residual(t) / (1e-10 * s), "full-sum exactness");

  Rng rng(options.seed);
  const AnchoredTable at(problem, sample(problem.measure, rng));
  std::vector<std::vector<double>> points;
  for (int k = 0; k < 20; ++k) points.push_back(sample(problem.measure, rng));
  const auto ann = annihilation_residual(at, points);
  w.observe(3.0 * ann.value / (1e-12 * at.scale()), "annihilation at " + ann.where.to_string());

  const auto v = variance_components(t);
  std::uint64_t seed = options.seed + 7000;
  for (int S : truncations) {
    const auto budget = rdd_expected_error(S, v);
    const auto e = mc_expected_rdd_error(problem, S, {.n = options.builtin_n, .seed = seed});
    seed += 100;
    w.observe(z_distance(e, budget.e_rdd_expected, 1e-12 * budget.total_variance),
              "sampling S=" + std::to_string(S));
  }
  return w.result();
}

std::vector<CheckResult> acceptance_suite(const VerifyOptions& options) {
  return {check_coefficients(),
          check_zero_order_rdd(options),
          check_rdd_against_sampling(options),
          check_add_against_sampling(options),
          check_structure(options),
          check_sobol_identity(),
          check_bound_ordering(),
          check_pmin(),
          check_decay_shape(),
          check_contrived(),
          check_optimality(options),
          check_limit()};
}

std::string format_result(const CheckResult& r) {
  std::ostringstream out;
  out.precision(6);
  out << (r.pass ? "PASS " : "FAIL ") << r.id << " " << r.title << " (measured=" << r.measured
      << ", tolerance=" << r.tolerance << ")";
  if (!r.detail.empty()) out << " " << r.detail;
  return out.str();
}

}  // namespace dimdecomp
