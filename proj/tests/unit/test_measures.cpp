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

#include "dimdecomp/measures.hpp"

using namespace dimdecomp;

namespace {

double rel_err(double got, double want, double floor_scale) {
  return std::abs(got - want) / std::max(std::abs(want), floor_scale);
}

}  // namespace

TEST_CASE("uniform marginal rejects empty interval") {
  CHECK_THROWS_AS(Marginal::uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Marginal::uniform(2.0, -1.0), std::invalid_argument);
}

TEST_CASE("densities integrate to one") {
  // Composite midpoint on a wide window is independent of the Gauss rules.
  for (const auto& m : {Marginal::uniform(-1, 1), Marginal::uniform(0, 1), Marginal::uniform(-3.14, 3.14)}) {
    const auto rule = gauss_rule(m, 8);
    CHECK(rule.integrate([&](double x) { return m.density(x) * (m.hi() - m.lo()); }) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto normal = Marginal::standard_normal();
  double acc = 0.0;
  const int steps = 200000;
  const double h = 20.0 / steps;
  for (int i = 0; i < steps; ++i) acc += normal.density(-10.0 + (i + 0.5) * h) * h;
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-point rules sit at the mean") {
  const auto u = gauss_rule(Marginal::uniform(0, 1), 1);
  CHECK(u.nodes[0] == 0.5);
  CHECK(u.weights[0] == 1.0);
  const auto g = gauss_rule(Marginal::standard_normal(), 1);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.weights[0] == 1.0);
}

TEST_CASE("two-point Gauss-Legendre on [-1,1]") {
  // Moment conditions w0 + w1 = 1, w0 x0 + w1 x1 = 0, w0 x0^2 + w1 x1^2 = 1/3,
  // w0 x0^3 + w1 x1^3 = 0 give x = -+1/sqrt(3), w = 1/2.
  const auto r = gauss_rule(Marginal::uniform(-1, 1), 2);
  CHECK(r.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("order bounds are enforced") {
  const auto m = Marginal::uniform(0, 1);
  CHECK_THROWS_AS(gauss_rule(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_rule(m, 65), std::invalid_argument);
  CHECK_NOTHROW(gauss_rule(m, 64));
  CHECK_NOTHROW(gauss_rule(m, 80, 80));
}

TEST_CASE("weights are probability normalized") {
  for (const auto& m : {Marginal::uniform(-1, 1), Marginal::uniform(2, 7), Marginal::standard_normal()}) {
    for (int n = 1; n <= 64; ++n) {
      const auto r = gauss_rule(m, n);
      double s = 0.0;
      for (double w : r.weights) s += w;
      CHECK(std::abs(s - 1.0) <= 1e-14);
      for (double w : r.weights) CHECK(w > 0.0);
    }
  }
}

TEST_CASE("Gauss exactness up to degree 2n-1") {
  for (const auto& m : {Marginal::uniform(-1, 1), Marginal::uniform(0, 1), Marginal::uniform(-2, 5),
                        Marginal::standard_normal()}) {
    for (int n = 1; n <= 24; ++n) {
      const auto r = gauss_rule(m, n);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        const double q = r.integrate([k](double x) { return std::pow(x, k); });
        // Odd normal moments vanish; measure them against E|X|^k's even neighbor.
        const double floor_scale = m.moment(k % 2 == 0 ? k : k + 1);
        INFO("marginal=" << m.describe() << " n=" << n << " k=" << k);
        CHECK(rel_err(q, m.moment(k), std::max(1e-300, std::abs(floor_scale))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("high-order rules stay accurate") {
  for (const auto& m : {Marginal::uniform(-1, 1), Marginal::standard_normal()}) {
    const auto r = gauss_rule(m, 64);
    for (int k = 0; k <= 40; k += 2) {
      const double q = r.integrate([k](double x) { return std::pow(x, k); });
      CHECK(rel_err(q, m.moment(k), 1e-300) <= 1e-12);
    }
  }
}

TEST_CASE("samples stay inside the support") {
  const auto pm = ProductMeasure::iid(Marginal::uniform(0, 1), 3);
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto x = sample(pm, rng);
    REQUIRE(x.size() == 3);
    for (double v : x) CHECK((v > 0.0 && v < 1.0));
  }
}

TEST_CASE("identical seeds give identical streams") {
  const ProductMeasure pm({Marginal::uniform(-1, 1), Marginal::standard_normal(), Marginal::uniform(0, 4)});
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto xa = sample(pm, a);
    const auto xb = sample(pm, b);
    const auto xc = sample(pm, c);
    CHECK(xa == xb);
    differs = differs || xa != xc;
  }
  CHECK(differs);
}

TEST_CASE("uniform sample mean within the CLT band") {
  // 3 sigma / sqrt(n) with sigma^2 = 1/12 and n = 1e6 is about 8.7e-4.
  Rng rng(2024);
  const auto m = Marginal::uniform(0, 1);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += rng.draw(m);
  CHECK(std::abs(acc / n - 0.5) <= 0.002);
}

TEST_CASE("normal sampling matches the first two moments") {
  Rng rng(11);
  const auto m = Marginal::standard_normal();
  double s1 = 0.0, s2 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.draw(m);
    s1 += v;
    s2 += v * v;
  }
  CHECK(std::abs(s1 / n) <= 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("composite rules") {
  const auto m = Marginal::uniform(0, 1);
  const auto r = composite_gauss_rule(m, 3, 2);
  CHECK(r.order() == 6);
  CHECK(r.panels == 2);
  double s = 0.0;
  for (double w : r.weights) s += w;
  CHECK(std::abs(s - 1.0) <= 1e-14);
  for (int i = 0; i < 3; ++i) CHECK(r.nodes[i] < 0.5);
  for (int i = 3; i < 6; ++i) CHECK(r.nodes[i] > 0.5);
  // E[(|4x - 2| - 1)^2] = 1/3; piecewise linear, so two panels of one node suffice for the mean.
  CHECK(composite_gauss_rule(m, 2, 2).integrate([](double x) {
    const double t = std::abs(4 * x - 2) - 1;
    return t * t;
  }) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(composite_gauss_rule(m, 4, 1).nodes == gauss_rule(m, 4).nodes);
  CHECK_THROWS_AS(composite_gauss_rule(Marginal::standard_normal(), 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(composite_gauss_rule(m, 4, 0), std::invalid_argument);
}
