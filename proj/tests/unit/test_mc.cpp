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

#include <json.hpp>

#include "dimdecomp/errors.hpp"
#include "dimdecomp/mc.hpp"
#include "dimdecomp/variance.hpp"

using namespace dimdecomp;

namespace {

ProblemSpec linear_product(int N, int order = 6) {
  return ProblemSpec{ProductMeasure::iid(Marginal::uniform(-1, 1), N), product_linear(std::vector<double>(N, 1.0)),
                     order};
}

AnovaTable interpolating(const ProblemSpec& p) { return AnovaTable::build(p, {.interpolate = true}); }

bool within(const McEstimate& e, double want, double floor = 0.0) {
  return std::abs(e.mean - want) <= 3.0 * e.std_error + floor;
}

}  // namespace

TEST_CASE("accumulator merge equals sequential accumulation") {
  MeanAccumulator all, left, right;
  Rng rng(1);
  for (int i = 0; i < 5000; ++i) {
    const double v = rng.normal() * 3.0 + 1.0;
    all.add(v);
    (i < 1234 ? left : right).add(v);
  }
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));

  MeanAccumulator empty, one;
  one.add(2.0);
  empty.merge(one);
  CHECK(empty.mean() == 2.0);
  CHECK(empty.variance() == 0.0);
}

TEST_CASE("estimates depend on seed and streams but not on threads") {
  const auto p = linear_product(3);
  McOptions a{.n = 20000, .seed = 9, .streams = 5, .threads = 1};
  McOptions b = a;
  b.threads = 4;
  const auto ea = mc_expected_rdd_error(p, 1, a);
  const auto eb = mc_expected_rdd_error(p, 1, b);
  CHECK(ea.mean == eb.mean);
  CHECK(ea.std_error == eb.std_error);
  CHECK(ea.n == 20000);
  CHECK(ea.seed == 9);

  McOptions c = a;
  c.seed = 10;
  CHECK(mc_expected_rdd_error(p, 1, c).mean != ea.mean);
}

TEST_CASE("sample-count and order preconditions") {
  const auto p = linear_product(3);
  const auto t = interpolating(p);
  const std::vector<double> c(3, 0.0);
  CHECK_THROWS_AS(mc_add_error(p, t, 1, {.n = 999}), std::invalid_argument);
  CHECK_THROWS_AS(mc_rdd_error(p, 1, c, {.n = 999}), std::invalid_argument);
  CHECK_THROWS_AS(mc_expected_rdd_error(p, 1, {.n = 9999}), std::invalid_argument);
  CHECK_THROWS_AS(mc_rdd_error(p, 3, c, {.n = 1000}), std::invalid_argument);
  CHECK_THROWS_AS(mc_add_error(p, AnovaTable::build(p), 1, {.n = 1000}), std::invalid_argument);
  CHECK_THROWS_AS(mc_expected_rdd_error(p, 0, {.n = 10000, .streams = 0}), std::invalid_argument);
}

TEST_CASE("ANOVA truncation error by sampling") {
  const auto p = linear_product(3);
  const auto t = interpolating(p);
  const McOptions opt{.n = 200000, .seed = 3};
  CHECK(within(mc_add_error(p, t, 1, opt), 10.0 / 27.0));
  CHECK(within(mc_add_error(p, t, 2, opt), 1.0 / 27.0));
  CHECK(mc_add_error(p, t, 3, {.n = 2000}).mean <= 1e-24);

  const ProblemSpec additive{ProductMeasure::iid(Marginal::uniform(-1, 1), 3),
                             polynomial({{1, {1, 0, 0}}, {2, {0, 1, 0}}, {-1, {0, 0, 3}}}, 3), 4};
  CHECK(mc_add_error(additive, interpolating(additive), 1, {.n = 2000}).mean <= 1e-24);
}

TEST_CASE("zero-order anchored error at a fixed anchor") {
  // yhat_0 = y(c), so the error is sigma^2 + (y(c) - E[y])^2.
  const auto p = linear_product(3);
  const double var = std::pow(4.0 / 3.0, 3) - 1.0;
  const McOptions opt{.n = 200000, .seed = 5};
  const std::vector<double> origin(3, 0.0), half(3, 0.5);
  CHECK(within(mc_rdd_error(p, 0, origin, opt), var));
  CHECK(within(mc_rdd_error(p, 0, half, opt), var + std::pow(3.375 - 1.0, 2)));
}

TEST_CASE("anchored error never beats the ANOVA error") {
  const auto p = linear_product(4);
  const double e_add = add_error(2, variance_components(AnovaTable::build(p)));
  Rng anchors(77);
  for (int k = 0; k < 20; ++k) {
    const auto c = sample(p.measure, anchors);
    const auto e = mc_rdd_error(p, 2, c, {.n = 20000, .seed = 100 + static_cast<std::uint64_t>(k)});
    CHECK(e.mean >= e_add - 3.0 * e.std_error);
  }
}

TEST_CASE("expected anchored error by sampling") {
  const McOptions opt{.n = 400000, .seed = 21};
  const auto p3 = linear_product(3);
  CHECK(within(mc_expected_rdd_error(p3, 0, opt), 2.0 * (std::pow(4.0 / 3.0, 3) - 1.0)));
  CHECK(within(mc_expected_rdd_error(p3, 1, opt), 44.0 / 27.0));
  CHECK(within(mc_expected_rdd_error(p3, 2, opt), 8.0 / 27.0));
  // s = 3 and s = 4 with coefficients 8 and 16.
  CHECK(within(mc_expected_rdd_error(linear_product(4), 2, opt), 128.0 / 81.0));
}

TEST_CASE("analytic errors agree with sampling on builtin problems") {
  const double pi = std::numbers::pi;
  const std::vector<ProblemSpec> problems{
      ProblemSpec{ProductMeasure::iid(Marginal::uniform(-1, 1), 5), product_linear({1.0, 0.8, 0.5, 0.3, 0.1}), 4},
      ProblemSpec{ProductMeasure::iid(Marginal::standard_normal(), 4), product_linear({0.5, -0.4, 0.3, 0.2}), 4},
      ProblemSpec{ProductMeasure::iid(Marginal::uniform(-pi, pi), 3), ishigami(7.0, 0.1), 24},
      ProblemSpec{ProductMeasure::iid(Marginal::uniform(0, 1), 4),
                  polynomial({{1, {2, 1, 0, 0}}, {-2, {0, 1, 1, 1}}, {0.5, {1, 0, 0, 3}}}, 4), 4},
  };
  std::uint64_t seed = 1000;
  for (const auto& p : problems) {
    const auto t = interpolating(p);
    const auto v = variance_components(t);
    for (int S = 0; S < p.dim(); ++S) {
      const auto budget = rdd_expected_error(S, v);
      const double floor = 1e-12 * budget.total_variance;
      INFO("N=" << p.dim() << " S=" << S);
      CHECK(within(mc_add_error(p, t, S, {.n = 50000, .seed = seed++}), budget.e_add, floor));
      CHECK(within(mc_expected_rdd_error(p, S, {.n = 100000, .seed = seed++}), budget.e_rdd_expected, floor));
    }
  }
}

TEST_CASE("optimality probe") {
  const auto p = linear_product(4);
  const auto t = interpolating(p);
  for (int S : {1, 2}) {
    const auto r = optimality_probe(p, t, S, 20, {.n = 20000, .seed = 8});
    REQUIRE(r.perturbations.size() == 21);
    CHECK(r.perturbations[0].amplitude == 0.0);
    CHECK(r.perturbations[0].shift_sq == 0.0);
    CHECK(r.perturbations[0].error == r.e_add_measured);
    CHECK(r.e_add == doctest::Approx(add_error(S, variance_components(t))).epsilon(1e-14));
    for (const auto& q : r.perturbations) {
      CHECK(q.above_add_error);
      CHECK(q.split_holds);
      CHECK(q.shift_sq >= 0.0);
    }
    CHECK(r.all_pass);
  }
  const auto a = optimality_probe(p, t, 1, 3, {.n = 5000, .seed = 8});
  const auto b = optimality_probe(p, t, 1, 7, {.n = 5000, .seed = 8});
  CHECK(a.e_add_measured == b.e_add_measured);
  CHECK(a.perturbations[3].error == b.perturbations[3].error);
  CHECK_THROWS_AS(optimality_probe(p, t, 4, 1, {.n = 5000}), std::invalid_argument);
}

TEST_CASE("JSON record") {
  const McEstimate e{0.25, 0.001, 10000, 42};
  const auto j = nlohmann::json::parse(to_json_record(e, "expected_rdd_error", 2));
  CHECK(j["op"] == "expected_rdd_error");
  CHECK(j["S"] == 2);
  CHECK(j["n"] == 10000);
  CHECK(j["seed"] == 42);
  CHECK(j["mean"].get<double>() == 0.25);
  CHECK(j["std_error"].get<double>() == 0.001);
  CHECK(to_json_record(e, "x", 0).rfind("{\"op\":\"x\",\"S\":0,\"n\":", 0) == 0);
}
