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

#include "dimdecomp/variance.hpp"

using namespace dimdecomp;

namespace {

ProblemSpec linear_product(int N, int order = 10) {
  return ProblemSpec{ProductMeasure::iid(Marginal::uniform(-1, 1), N), product_linear(std::vector<double>(N, 1.0)),
                     order};
}

}  // namespace

TEST_CASE("linear product variance components") {
  // E[x^2] = 1/3 under uniform(-1,1), so sigma_u^2 = 3^{-|u|}.
  const int N = 4;
  const auto t = AnovaTable::build(linear_product(N));
  const auto v = variance_components(t);
  for (const auto& u : all_subsets_up_to(N, N)) {
    if (u.is_empty()) continue;
    CHECK(v[u] == doctest::Approx(std::pow(3.0, -u.size())).epsilon(1e-13));
  }
  CHECK(v.total() == doctest::Approx(std::pow(4.0 / 3.0, N) - 1.0).epsilon(1e-13));
  CHECK(v.y_empty() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v.clamped() == 0.0);

  const auto V = v.by_cardinality();
  REQUIRE(V.size() == N + 1);
  CHECK(V[0] == 0.0);
  CHECK(V[2] == doctest::Approx(6.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("additive function has only first-order variance") {
  const ProblemSpec p{ProductMeasure::iid(Marginal::uniform(-1, 1), 3),
                      polynomial({{1, {1, 0, 0}}, {2, {0, 1, 0}}, {-1, {0, 0, 3}}}, 3), 6};
  const auto v = variance_components(AnovaTable::build(p));
  for (const auto& u : all_subsets_up_to(3, 3))
    if (u.size() >= 2) CHECK(std::abs(v[u]) <= 1e-15);
  CHECK(v[Subset::of({1}, 3)] == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(v[Subset::of({2}, 3)] == doctest::Approx(1.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("sobol_g variances") {
  // With t = |4x - 2| ~ uniform(0, 2): E[(t - 1)^2] = 1/3, so
  // sigma_u^2 = prod_{i in u} (1/3) / (1 + a_i)^2.
  const std::vector<double> a{0, 1, 2};
  const auto m = ProductMeasure::iid(Marginal::uniform(0, 1), 3);
  const auto v = variance_components(AnovaTable::build(ProblemSpec{m, sobol_g(a), 2, 2}));
  for (const auto& u : all_subsets_up_to(3, 3)) {
    if (u.is_empty()) continue;
    double expected = 1.0;
    for (int i : u.coords()) expected *= (1.0 / 3.0) / ((1 + a[i]) * (1 + a[i]));
    CHECK(v[u] == doctest::Approx(expected).epsilon(1e-13));
  }

  // A single Gauss panel does not resolve the kink at 1/2; the error decays like n^-2.
  const auto rough = variance_components(AnovaTable::build(ProblemSpec{m, sobol_g(a), 64}));
  CHECK(rough[Subset::of({0}, 3)] == doctest::Approx(1.0 / 3.0).epsilon(2e-3));
  CHECK(std::abs(rough[Subset::of({0}, 3)] - 1.0 / 3.0) > 1e-6);
}

TEST_CASE("ishigami variance components") {
  const double a = 7.0, b = 0.1, pi = std::numbers::pi;
  const ProblemSpec p{ProductMeasure::iid(Marginal::uniform(-pi, pi), 3), ishigami(a, b), 24};
  const auto v = variance_components(AnovaTable::build(p));
  const double pi4 = std::pow(pi, 4), pi8 = std::pow(pi, 8);
  const double v1 = 0.5 * std::pow(1 + b * pi4 / 5, 2);
  const double v2 = a * a / 8;
  const double v13 = b * b * pi8 * 8.0 / 225.0;
  CHECK(v[Subset::of({0}, 3)] == doctest::Approx(v1).epsilon(1e-9));
  CHECK(v[Subset::of({1}, 3)] == doctest::Approx(v2).epsilon(1e-9));
  CHECK(v[Subset::of({0, 2}, 3)] == doctest::Approx(v13).epsilon(1e-9));
  CHECK(std::abs(v[Subset::of({2}, 3)]) <= 1e-9);
  CHECK(v.total() == doctest::Approx(v1 + v2 + v13).epsilon(1e-9));
}

TEST_CASE("variance closure against the direct full-grid variance") {
  const std::vector<ProblemSpec> problems{
      linear_product(5, 6),
      ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), 4), sobol_g({0, 0.5, 3, 9}), 12},
      ProblemSpec{ProductMeasure::iid(Marginal::standard_normal(), 3), product_linear({0.5, -1.0, 0.25}), 8},
  };
  for (const auto& p : problems) {
    const auto t = AnovaTable::build(p);
    const auto v = variance_components(t);
    CHECK(v.total() == doctest::Approx(direct_variance(t)).epsilon(1e-9));
  }
}

TEST_CASE("Sobol indices") {
  const auto v2 = variance_components(AnovaTable::build(linear_product(2)));
  const auto s = sobol_indices(v2);
  CHECK(s[0b01] == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
  CHECK(s[0b10] == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
  CHECK(s[0b11] == doctest::Approx(1.0 / 7.0).epsilon(1e-13));

  const ProblemSpec add{ProductMeasure::iid(Marginal::uniform(-1, 1), 2),
                        polynomial({{1, {1, 0}}, {1, {0, 1}}}, 2), 4};
  const auto sa = sobol_indices(variance_components(AnovaTable::build(add)));
  CHECK(sa[0b01] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sa[0b10] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(sa[0b11]) <= 1e-15);

  const ProblemSpec flat{ProductMeasure::iid(Marginal::uniform(-1, 1), 2), constant(2.0), 4};
  CHECK_THROWS_WITH_AS(sobol_indices(variance_components(AnovaTable::build(flat))),
                       doctest::Contains("zero variance"), std::domain_error);
}

TEST_CASE("Sobol indices sum to one") {
  const ProblemSpec p{ProductMeasure::iid(Marginal::uniform(0, 1), 4), sobol_g({0, 1, 2, 5}), 10};
  const auto s = sobol_indices(variance_components(AnovaTable::build(p)));
  double total = 0.0;
  for (double v : s) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Sobol cross-covariance") {
  const auto p = linear_product(3, 4);
  CHECK(sobol_D(p, Subset::of({0}, 3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sobol_D(p, Subset::of({0, 1}, 3)) == doctest::Approx(7.0 / 9.0).epsilon(1e-12));
  CHECK(sobol_D(p, Subset::full(3)) == doctest::Approx(std::pow(4.0 / 3.0, 3) - 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(sobol_D(p, Subset::empty(3)), std::invalid_argument);
  CHECK_THROWS_AS(sobol_D(linear_product(5, 10), Subset::of({0}, 5), 1000), BudgetExceeded);
}

TEST_CASE("Sobol identity matches subset sums of variance components") {
  const std::vector<ProblemSpec> problems{
      linear_product(4, 4),
      ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), 4), sobol_g({0, 1, 2, 4}), 4},
  };
  for (const auto& p : problems) {
    const auto v = variance_components(AnovaTable::build(p));
    for (const auto& u : all_subsets_up_to(4, 4)) {
      if (u.is_empty()) continue;
      double sum = 0.0;
      for_each_submask(u.mask(), [&](Subset::Mask m) { sum += v.values()[m]; });
      CHECK(sobol_D(p, u) == doctest::Approx(sum).epsilon(1e-8));
    }
  }
}
