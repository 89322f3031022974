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

#include "dimdecomp/functions.hpp"

#include <cmath>
#include <stdexcept>

namespace dimdecomp {

Function product_linear(std::vector<double> a) {
  return [a = std::move(a)](std::span<const double> x) {
    if (x.size() != a.size()) throw std::invalid_argument("product_linear: dimension mismatch");
    double y = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) y *= 1.0 + a[i] * x[i];
    return y;
  };
}

Function sobol_g(std::vector<double> a) {
  for (double ai : a)
    if (!(ai >= 0.0)) throw std::invalid_argument("sobol_g: parameters must be nonnegative");
  return [a = std::move(a)](std::span<const double> x) {
    if (x.size() != a.size()) throw std::invalid_argument("sobol_g: dimension mismatch");
    double y = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) y *= (std::abs(4.0 * x[i] - 2.0) + a[i]) / (1.0 + a[i]);
    return y;
  };
}

Function ishigami(double a, double b) {
  return [a, b](std::span<const double> x) {
    if (x.size() != 3) throw std::invalid_argument("ishigami: needs exactly 3 inputs");
    const double s2 = std::sin(x[1]);
    const double x3 = x[2] * x[2];
    return std::sin(x[0]) * (1.0 + b * x3 * x3) + a * s2 * s2;
  };
}

Function polynomial(std::vector<PolyTerm> terms, int dim) {
  for (const auto& t : terms) {
    if (static_cast<int>(t.powers.size()) != dim)
      throw std::invalid_argument("poly: every term needs one power per input");
    for (int p : t.powers)
      if (p < 0) throw std::invalid_argument("poly: powers must be nonnegative");
  }
  return [terms = std::move(terms), dim](std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("poly: dimension mismatch");
    double y = 0.0;
    for (const auto& t : terms) {
      double m = t.coef;
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < t.powers[i]; ++k) m *= x[i];
      y += m;
    }
    return y;
  };
}

Function constant(double value) {
  return [value](std::span<const double>) { return value; };
}

}  // namespace dimdecomp
