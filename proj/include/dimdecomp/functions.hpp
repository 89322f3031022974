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

#include <functional>
#include <span>
#include <vector>

namespace dimdecomp {

/// A deterministic scalar function of N real inputs. Implementations must be
/// re-entrant; Monte Carlo workers call them concurrently.
using Function = std::function<double(std::span<const double>)>;

/// y(x) = prod_i (1 + a_i x_i).
Function product_linear(std::vector<double> a);

/// Sobol' g-function y(x) = prod_i (|4 x_i - 2| + a_i) / (1 + a_i), meant for
/// uniform(0,1) inputs.
Function sobol_g(std::vector<double> a);

/// Ishigami function sin x1 + a sin^2 x2 + b x3^4 sin x1 (three inputs),
/// meant for uniform(-pi, pi) inputs.
Function ishigami(double a = 7.0, double b = 0.1);

/// One monomial coef * prod_i x_i^powers[i].
struct PolyTerm {
  double coef = 0.0;
  std::vector<int> powers;
};

/// Sum of monomials. Every term must have exactly `dim` nonnegative powers.
Function polynomial(std::vector<PolyTerm> terms, int dim);

Function constant(double value);

}  // namespace dimdecomp
