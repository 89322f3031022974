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

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dimdecomp {

/// One-dimensional probability measure of a single input coordinate.
///
/// Only two families are supported: uniform on a bounded interval and the
/// standard normal. Both are immutable once constructed.
class Marginal {
 public:
  enum class Kind { kUniform, kStandardNormal };

  /// Throws std::invalid_argument unless lo < hi (both finite).
  static Marginal uniform(double lo, double hi);
  static Marginal standard_normal();

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double density(double x) const;
  bool in_support(double x) const;
  double mean() const;

  /// E[X^k] computed in closed form.
  double moment(int k) const;

  std::string describe() const;

  friend bool operator==(const Marginal&, const Marginal&) = default;

 private:
  Marginal(Kind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {}

  Kind kind_;
  double lo_;
  double hi_;
};

/// Independent product of marginals; the joint density is the product of
/// the coordinate densities.
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<Marginal> marginals);
  static ProductMeasure iid(const Marginal& m, int dim);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const Marginal& operator[](int i) const { return marginals_[i]; }
  const std::vector<Marginal>& marginals() const { return marginals_; }

  bool in_support(std::span<const double> x) const;

 private:
  std::vector<Marginal> marginals_;
};

/// Nodes and probability-normalized weights (they sum to one).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Equal-width panels, each holding order() / panels consecutive nodes.
  int panels = 1;

  int order() const { return static_cast<int>(nodes.size()); }
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

inline constexpr int kDefaultMaxQuadOrder = 64;

/// Gauss rule of order n for the marginal: Gauss-Legendre mapped onto
/// [lo, hi] for uniform, probabilists' Gauss-Hermite for the standard normal.
///
/// Nodes come from the symmetric Jacobi matrix eigenvalues and are polished by
/// Newton steps on the orthonormal recurrence. Weights use the Christoffel
/// function 1 / sum_k p_k(x)^2, then get renormalized to sum to one.
/// Throws std::invalid_argument for n < 1 or n > max_order.
QuadratureRule gauss_rule(const Marginal& m, int n, int max_order = kDefaultMaxQuadOrder);

/// Composite rule: n Gauss-Legendre nodes on each of `panels` equal pieces of
/// a uniform marginal's support. Integrands that are smooth between panel
/// edges (|4x - 2| on [0, 1] with two panels) keep full Gauss accuracy.
/// panels == 1 returns gauss_rule(m, n); a normal marginal needs panels == 1.
QuadratureRule composite_gauss_rule(const Marginal& m, int n, int panels);

/// Pseudo-random stream used by every sampler in the library.
///
/// The engine is std::mt19937_64 seeded directly with the 64-bit seed.
/// Uniform variates use the top 53 bits shifted by half an ulp, so they lie in
/// the open interval (0, 1). Normal variates come from std::normal_distribution
/// over the same engine. Streams are reproducible within a build; parallel
/// workers use seed + worker_index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_(engine_); }
  double draw(const Marginal& m);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// One i.i.d. draw from the product measure.
std::vector<double> sample(const ProductMeasure& m, Rng& rng);
/// Same as sample() but writes into a caller-owned buffer of size dim().
void sample_into(const ProductMeasure& m, Rng& rng, std::span<double> out);

}  // namespace dimdecomp
