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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dimdecomp/decomp.hpp"

using namespace dimdecomp;

namespace {

ProblemSpec uniform_problem(Function f, int N, double lo = -1.0, double hi = 1.0, int order = 10) {
  return ProblemSpec{ProductMeasure::iid(Marginal::uniform(lo, hi), N), std::move(f), order};
}

std::vector<double> random_point(const ProductMeasure& m, Rng& rng) { return sample(m, rng); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Sum of terms that each involve at most two of the four inputs.
Function bivariate_poly() {
  return polynomial({{1.5, {0, 0, 0, 0}},
                     {2.0, {1, 0, 0, 0}},
                     {-1.0, {0, 3, 0, 0}},
                     {0.5, {2, 1, 0, 0}},
                     {0.7, {0, 0, 1, 2}},
                     {-0.3, {1, 0, 0, 4}},
                     {1.1, {0, 2, 2, 0}}},
                    4);
}

}  // namespace

TEST_CASE("ANOVA of a constant") {
  const auto p = uniform_problem(constant(3.25), 3);
  const auto t = AnovaTable::build(p);
  CHECK(t.y_empty() == doctest::Approx(3.25).epsilon(1e-15));
  for (const auto& u : all_subsets_up_to(3, 3)) {
    if (u.is_empty()) continue;
    for (double v : t.component_values(u)) CHECK(std::abs(v) <= 1e-14);
  }
}

TEST_CASE("ANOVA of the linear product has monomial components") {
  // prod (1 + x_i) = sum_u prod_{i in u} x_i and each monomial already has zero
  // mean in every own coordinate, so y_u = prod_{i in u} x_i.
  const auto p = uniform_problem(product_linear({1, 1, 1}), 3);
  const auto t = AnovaTable::build(p);
  CHECK(t.y_empty() == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t f = 0; f < t.grid_size(); ++f) {
    const auto idx = t.unflatten(f);
    const auto x = t.grid_point(idx);
    for (const auto& u : all_subsets_up_to(3, 3)) {
      double mono = 1.0;
      for (int c : u.coords()) mono *= x[c];
      CHECK(t.component_at(u, idx) == doctest::Approx(mono).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("additive function has no interaction") {
  const auto p = uniform_problem(polynomial({{1, {1, 0}}, {1, {0, 1}}}, 2), 2);
  const auto t = AnovaTable::build(p);
  for (std::size_t f = 0; f < t.grid_size(); ++f) {
    const auto idx = t.unflatten(f);
    const auto x = t.grid_point(idx);
    CHECK(t.component_at(Subset::of({0}, 2), idx) == doctest::Approx(x[0]).scale(1.0).epsilon(1e-14));
    CHECK(t.component_at(Subset::of({1}, 2), idx) == doctest::Approx(x[1]).scale(1.0).epsilon(1e-14));
    CHECK(std::abs(t.component_at(Subset::full(2), idx)) <= 1e-14);
  }
}

TEST_CASE("ANOVA structural properties on builtin functions") {
  std::vector<std::pair<const char*, ProblemSpec>> cases;
  cases.emplace_back("product_linear N=4", uniform_problem(product_linear({1.0, 0.5, -2.0, 0.3}), 4));
  cases.emplace_back("sobol_g N=3",
                     ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), 3), sobol_g({0, 1, 2}), 10});
  cases.emplace_back(
      "ishigami", ProblemSpec{ProductMeasure::iid(Marginal::uniform(-std::numbers::pi, std::numbers::pi), 3),
                              ishigami(), 12});
  cases.emplace_back("poly N=4", uniform_problem(bivariate_poly(), 4, -1, 2, 6));
  cases.emplace_back("normal product N=5",
                     ProblemSpec{ProductMeasure::iid(Marginal::standard_normal(), 5),
                                 product_linear({0.4, 0.3, 0.2, 0.1, 0.5}), 6});
  for (auto& [name, p] : cases) {
    INFO(name);
    const auto t = AnovaTable::build(p);
    const double scale = t.scale();
    const auto zm = zero_mean_residual(t);
    CHECK(zm.value <= 1e-10 * scale);
    CHECK(orthogonality_residual(t).value <= 1e-10 * scale * scale);
    CHECK(grid_exactness_residual(t) <= 1e-10 * scale);
  }
}

TEST_CASE("fault injection is caught by the zero-mean check") {
  auto t = AnovaTable::build(uniform_problem(product_linear({1, 1, 1}), 3, -1, 1, 4));
  const Subset u = Subset::of({0, 2}, 3);
  t.perturb_for_testing(u, 5, 1e-3);
  const auto r = zero_mean_residual(t);
  CHECK(r.value > 1e-5);
  CHECK(r.where == u);
}

TEST_CASE("table limits") {
  const auto p = uniform_problem(product_linear(std::vector<double>(8, 1.0)), 8);
  CHECK_THROWS_AS(AnovaTable::build(p, {.grid_budget = 1000}), BudgetExceeded);

  auto bad = uniform_problem([](std::span<const double> x) { return x[0] > 0.9 ? INFINITY : 1.0; }, 2);
  CHECK_THROWS_AS(AnovaTable::build(bad), std::domain_error);
  CHECK_THROWS_AS(AnchoredTable(bad, {0.95, 0.0}), std::domain_error);

  auto zero_order = uniform_problem(product_linear({1, 1}), 2);
  zero_order.quad_order = 0;
  CHECK_THROWS_AS(AnovaTable::build(zero_order), std::invalid_argument);
}

TEST_CASE("truncated ANOVA evaluation") {
  const auto p = uniform_problem(product_linear({1, 2, 3}), 3, -1, 1, 4);
  const auto t = AnovaTable::build(p);
  const auto idx = std::vector<int>{1, 3, 0};
  const auto x = t.grid_point(idx);
  CHECK(t.truncated(3, x) == doctest::Approx(p.y(x)).epsilon(1e-13));
  CHECK(t.truncated(0, x) == t.y_empty());
  CHECK(eval_truncated(t, 2, x) == doctest::Approx(t.truncated_at(2, idx)).epsilon(1e-15));

  std::vector<double> off = x;
  off[1] = 0.123;
  CHECK_THROWS_AS(t.truncated(2, off), std::domain_error);
  CHECK_THROWS_AS(t.truncated(4, x), std::invalid_argument);
}

TEST_CASE("interpolated ANOVA reproduces polynomials off grid") {
  // Degree <= 4 per coordinate on a 6-point grid: interpolation is exact.
  const auto p = uniform_problem(bivariate_poly(), 4, -1, 2, 6);
  const auto t = AnovaTable::build(p, {.interpolate = true});
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(p.measure, rng);
    CHECK(rel(t.truncated(4, x), p.y(x)) <= 1e-10);
    // Every term involves at most two inputs.
    CHECK(rel(t.truncated(2, x), p.y(x)) <= 1e-10);
  }
}

TEST_CASE("S-variate exactness of ANOVA on grid points") {
  const auto p = uniform_problem(bivariate_poly(), 4, -1, 2, 6);
  const auto t = AnovaTable::build(p);
  for (std::size_t f = 0; f < t.grid_size(); f += 7) {
    const auto idx = t.unflatten(f);
    CHECK(rel(t.truncated_at(2, idx), p.y(t.grid_point(idx))) <= 1e-10);
  }
}

TEST_CASE("anchored components vanish at the anchor") {
  const auto p = uniform_problem(product_linear({1, -0.5, 2}), 3);
  const AnchoredTable t(p, {0.3, -0.2, 0.7});
  std::vector<double> x{0.3, 0.9, -0.4};
  CHECK(t.component(Subset::of({0}, 3), x) == 0.0);

  Rng rng(9);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(random_point(p.measure, rng));
  CHECK(annihilation_residual(t, pts).value <= 1e-12 * t.scale());
}

TEST_CASE("anchored components of the linear product at the origin") {
  const auto p = uniform_problem(product_linear({1, 1, 1}), 3);
  const AnchoredTable t(p, {0, 0, 0});
  CHECK(t.y_empty() == 1.0);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(p.measure, rng);
    for (int a = 0; a < 3; ++a) {
      CHECK(t.component(Subset::of({a}, 3), x) == doctest::Approx(x[a]).epsilon(1e-14));
      for (int b = a + 1; b < 3; ++b)
        CHECK(t.component(Subset::of({a, b}, 3), x) == doctest::Approx(x[a] * x[b]).epsilon(1e-14).scale(1.0));
    }
  }
}

TEST_CASE("full anchored sum is exact") {
  const auto p = ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), 4), sobol_g({0, 1, 4.5, 9}), 10};
  Rng rng(21);
  const AnchoredTable t(p, random_point(p.measure, rng));
  for (int i = 0; i < 100; ++i) {
    const auto x = random_point(p.measure, rng);
    CHECK(rel(t.truncated(4, x), p.y(x)) <= 1e-10);
  }
  CHECK(t.truncated(0, t.anchor()) == t.y_empty());
}

TEST_CASE("anchor validation") {
  const auto p = uniform_problem(product_linear({1, 1}), 2);
  CHECK_THROWS_AS(AnchoredTable(p, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(AnchoredTable(p, {0.0, 1.5}), std::invalid_argument);
}

TEST_CASE("explicit form of a bivariate anchored component") {
  const auto p = ProblemSpec{ProductMeasure::iid(Marginal::uniform(-std::numbers::pi, std::numbers::pi), 3),
                             ishigami(), 10};
  const std::vector<double> c{0.4, -1.0, 2.0}, x{1.3, 0.2, -0.5};
  const double expected = p.y(std::vector<double>{x[0], x[1], c[2]}) - p.y(std::vector<double>{x[0], c[1], c[2]}) -
                          p.y(std::vector<double>{c[0], x[1], c[2]}) + p.y(c);
  const Subset u = Subset::of({0, 1}, 3);
  CHECK(explicit_component(p, u, DecompositionKind::kAnchored, c, x) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(explicit_component(p, Subset::empty(3), DecompositionKind::kAnchored, c, x) == p.y(c));
}

TEST_CASE("explicit and recursive forms agree") {
  const auto p = uniform_problem(product_linear({1.0, -0.7, 0.4, 2.0}), 4, -1, 1, 4);
  const auto add = AnovaTable::build(p, {.interpolate = true});
  Rng rng(77);
  const auto c = random_point(p.measure, rng);
  const AnchoredTable rdd(p, c);
  for (int i = 0; i < 50; ++i) {
    const Subset u(static_cast<Subset::Mask>(rng.uniform01() * 16) & 0xF, 4);
    const auto x = random_point(p.measure, rng);
    const double scale = add.scale();
    CHECK(std::abs(explicit_component(p, u, DecompositionKind::kAnova, {}, x) - add.component(u, x)) <=
          1e-10 * scale);
    CHECK(std::abs(explicit_component(p, u, DecompositionKind::kAnchored, c, x) - rdd.component(u, x)) <=
          1e-10 * rdd.scale());
  }
  CHECK(explicit_component(p, Subset::empty(4), DecompositionKind::kAnova, {}, c) ==
        doctest::Approx(add.y_empty()).epsilon(1e-14));
  CHECK_THROWS_AS(explicit_component(p, Subset::empty(4), DecompositionKind::kAnchored, {}, c),
                  std::invalid_argument);
}

TEST_CASE("direct anchored form, univariate and bivariate") {
  const int N = 4;
  const auto p = uniform_problem(product_linear({1.0, 0.5, -0.8, 1.7}), N);
  const std::vector<double> c{0.1, -0.3, 0.6, 0.2}, x{-0.9, 0.4, 0.25, -0.5};
  auto at = [&](std::initializer_list<int> coords) {
    std::vector<double> pnt = c;
    for (int i : coords) pnt[i] = x[i];
    return p.y(pnt);
  };
  double uni = 0.0;
  for (int i = 0; i < N; ++i) uni += at({i});
  uni -= (N - 1) * at({});
  CHECK(rdd_direct(p, 1, c, x) == doctest::Approx(uni).epsilon(1e-14));

  double pairs = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) pairs += at({i, j});
  const double bi = pairs - (N - 2) * (uni + (N - 1) * at({})) + 0.5 * (N - 1) * (N - 2) * at({});
  CHECK(rdd_direct(p, 2, c, x) == doctest::Approx(bi).epsilon(1e-14));

  CHECK_THROWS_AS(rdd_direct(p, 4, c, x), std::invalid_argument);
  CHECK_THROWS_AS(rdd_direct(p, -1, c, x), std::invalid_argument);
}

TEST_CASE("direct form reproduces low-order polynomials") {
  const auto p = uniform_problem(bivariate_poly(), 4, -1, 2);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto c = random_point(p.measure, rng);
    const auto x = random_point(p.measure, rng);
    CHECK(rel(rdd_direct(p, 2, c, x), p.y(x)) <= 1e-10);
    CHECK(rel(rdd_direct(p, 3, c, x), p.y(x)) <= 1e-10);
  }
}

TEST_CASE("direct and recursive anchored truncations agree") {
  Rng rng(123);
  for (int N = 2; N <= 8; ++N) {
    std::vector<double> a(N);
    for (double& v : a) v = 2.0 * rng.uniform01() - 1.0;
    const auto p = uniform_problem(product_linear(a), N);
    for (int S = 0; S < N; ++S) {
      for (int i = 0; i < 100; ++i) {
        const auto c = random_point(p.measure, rng);
        const auto x = random_point(p.measure, rng);
        const AnchoredTable t(p, c);
        INFO("N=" << N << " S=" << S);
        CHECK(rel(rdd_direct(p, S, c, x), t.truncated(S, x)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("panelled tables interpolate piecewise") {
  const ProblemSpec p{ProductMeasure::iid(Marginal::uniform(0, 1), 3), sobol_g({0, 1, 2}), 2, 2};
  CHECK_THROWS_AS((ProblemSpec{ProductMeasure::iid(Marginal::standard_normal(), 2), constant(1), 2, 2}.validate()),
                  std::invalid_argument);
  const auto t = AnovaTable::build(p, {.interpolate = true});
  CHECK(t.order() == 4);
  // sobol_g is linear on each panel in every coordinate, so the full sum is exact everywhere.
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto x = sample(p.measure, rng);
    CHECK(t.truncated(3, x) == doctest::Approx(p.y(x)).epsilon(1e-12));
  }
}
