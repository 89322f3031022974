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

#include "dimdecomp/variance.hpp"

#include <bit>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace dimdecomp {

VarianceMap::VarianceMap(int dim, double y_empty, std::vector<double> sigma2)
    : dim_(dim), y_empty_(y_empty), sigma2_(std::move(sigma2)) {
  if (sigma2_.size() != (std::size_t{1} << dim_)) throw std::invalid_argument("variance map has wrong size");
  sigma2_[0] = 0.0;
  for (double& v : sigma2_) {
    if (v < 0.0) {
      clamped_ = std::min(clamped_, v);
      v = 0.0;
    }
    total_ += v;
  }
}

std::vector<double> VarianceMap::by_cardinality() const {
  std::vector<double> out(static_cast<std::size_t>(dim_) + 1, 0.0);
  for (std::size_t m = 1; m < sigma2_.size(); ++m) out[std::popcount(m)] += sigma2_[m];
  return out;
}

VarianceMap variance_components(const AnovaTable& table) {
  const int N = table.dim();
  const int n = table.order();
  std::vector<double> sigma2(std::size_t{1} << N, 0.0);
  for (const Subset& u : all_subsets_up_to(N, N)) {
    if (u.is_empty()) continue;
    const auto vals = table.component_values(u);
    const auto coords = u.coords();
    std::vector<int> digit(coords.size(), 0);
    double acc = 0.0;
    for (double v : vals) {
      double w = 1.0;
      for (std::size_t k = 0; k < coords.size(); ++k) w *= table.rule(coords[k]).weights[digit[k]];
      acc += w * v * v;
      for (std::size_t k = 0; k < digit.size(); ++k) {
        if (++digit[k] < n) break;
        digit[k] = 0;
      }
    }
    sigma2[u.mask()] = acc;
  }
  VarianceMap map(N, table.y_empty(), std::move(sigma2));
  const double scale = table.scale();
  if (map.clamped() < -1e-12 * scale * scale)
    std::clog << "variance_components: clamped negative variance " << map.clamped() << " to zero\n";
  return map;
}

double direct_variance(const AnovaTable& table) {
  const int N = table.dim();
  const auto grid = table.grid_values();
  const double mean = table.y_empty();
  double acc = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto index = table.unflatten(f);
    double w = 1.0;
    for (int i = 0; i < N; ++i) w *= table.rule(i).weights[index[i]];
    const double d = grid[f] - mean;
    acc += w * d * d;
  }
  return acc;
}

std::vector<double> sobol_indices(const VarianceMap& variances) {
  const double total = variances.total();
  if (!(total > 0.0)) throw std::domain_error("zero variance: Sobol indices are undefined");
  std::vector<double> out(variances.values().size(), 0.0);
  for (std::size_t m = 1; m < out.size(); ++m) out[m] = variances.values()[m] / total;
  return out;
}

double sobol_D(const ProblemSpec& problem, const Subset& u, std::size_t budget) {
  problem.validate();
  const int N = problem.dim();
  if (u.is_empty()) throw std::invalid_argument("sobol_D needs a nonempty subset");
  if (u.dim() != N) throw std::invalid_argument("subset dimension does not match problem");
  const auto n = static_cast<std::size_t>(problem.nodes_per_dim());
  const int free_dims = 2 * N - u.size();
  std::size_t work = 1;
  for (int i = 0; i < free_dims; ++i) {
    if (work > budget / n) {
      std::ostringstream msg;
      msg << "sobol_D quadrature " << n << "^" << free_dims << " exceeds budget " << budget;
      throw BudgetExceeded(msg.str());
    }
    work *= n;
  }

  std::vector<QuadratureRule> rules;
  for (int i = 0; i < N; ++i) rules.push_back(problem.rule(i));

  // y on the full tensor grid; c_{-u} shares the x nodes, so y(x_u, c_{-u})
  // is a grid lookup as well.
  std::size_t total = 1;
  for (int i = 0; i < N; ++i) total *= n;
  std::vector<double> grid(total);
  std::vector<double> weight(total);
  std::vector<int> index(N, 0);
  std::vector<double> x(N);
  for (std::size_t f = 0; f < total; ++f) {
    double w = 1.0;
    for (int i = 0; i < N; ++i) {
      x[i] = rules[i].nodes[index[i]];
      w *= rules[i].weights[index[i]];
    }
    grid[f] = problem.y(x);
    weight[f] = w;
    for (int i = 0; i < N; ++i) {
      if (++index[i] < problem.nodes_per_dim()) break;
      index[i] = 0;
    }
  }

  double mean = 0.0;
  for (std::size_t f = 0; f < total; ++f) mean += weight[f] * grid[f];

  std::vector<std::size_t> stride(N);
  for (int i = 0, s = 1; i < N; ++i, s *= static_cast<int>(n)) stride[i] = static_cast<std::size_t>(s);
  const auto rest = u.complement().coords();
  std::size_t rest_count = 1;
  for (std::size_t k = 0; k < rest.size(); ++k) rest_count *= n;

  double acc = 0.0;
  std::vector<int> c_index(rest.size(), 0);
  for (std::size_t f = 0; f < total; ++f) {
    // Zero the coordinates outside u, keeping x_u.
    std::size_t base = f;
    std::size_t g = f;
    for (int i = 0; i < N; ++i) {
      const std::size_t digit = g % n;
      g /= n;
      if (!u.contains(i)) base -= digit * stride[i];
    }
    std::fill(c_index.begin(), c_index.end(), 0);
    double inner = 0.0;
    for (std::size_t r = 0; r < rest_count; ++r) {
      std::size_t pos = base;
      double w = 1.0;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        pos += static_cast<std::size_t>(c_index[k]) * stride[rest[k]];
        w *= rules[rest[k]].weights[c_index[k]];
      }
      inner += w * grid[pos];
      for (std::size_t k = 0; k < rest.size(); ++k) {
        if (++c_index[k] < problem.nodes_per_dim()) break;
        c_index[k] = 0;
      }
    }
    acc += weight[f] * grid[f] * inner;
  }
  return acc - mean * mean;
}

}  // namespace dimdecomp
