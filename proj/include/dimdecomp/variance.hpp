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
#include <vector>

#include "dimdecomp/decomp.hpp"
#include "dimdecomp/subsets.hpp"

namespace dimdecomp {

/// Variance components sigma_u^2 of the ANOVA components, indexed by subset
/// mask. The empty-set slot holds zero.
class VarianceMap {
 public:
  VarianceMap(int dim, double y_empty, std::vector<double> sigma2);

  int dim() const { return dim_; }
  double y_empty() const { return y_empty_; }
  /// Sum of all sigma_u^2.
  double total() const { return total_; }
  double operator[](const Subset& u) const { return sigma2_.at(u.mask()); }
  const std::vector<double>& values() const { return sigma2_; }

  /// V_s = sum_{|u| = s} sigma_u^2 for s = 0..N (V_0 = 0).
  std::vector<double> by_cardinality() const;

  /// Most negative raw value that was clamped to zero (0 if none).
  double clamped() const { return clamped_; }

 private:
  int dim_;
  double y_empty_;
  std::vector<double> sigma2_;
  double total_ = 0.0;
  double clamped_ = 0.0;
};

/// Tensor quadrature of y_u^2 over u's subgrid for every nonempty u.
/// Roundoff negatives are clamped to zero; values below -1e-12 * scale^2 are
/// reported on std::clog.
VarianceMap variance_components(const AnovaTable& table);

/// Full-grid quadrature of (y - y_empty)^2; the independent route to the total.
double direct_variance(const AnovaTable& table);

/// sigma_u^2 / sigma^2 indexed by subset mask. Throws std::domain_error
/// ("zero variance") when the total variance is not positive.
std::vector<double> sobol_indices(const VarianceMap& variances);

/// Sobol's cross-covariance
///   D_u = int y(x) y(x_u, c_{-u}) f(x) f(c_{-u}) dx dc_{-u} - y_empty^2
/// by nested tensor quadrature over the 2N - |u| free coordinates.
/// Throws BudgetExceeded when n^(2N-|u|) > budget.
double sobol_D(const ProblemSpec& problem, const Subset& u, std::size_t budget = std::size_t{1} << 30);

}  // namespace dimdecomp
