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
#include <span>
#include <stdexcept>
#include <vector>

#include "dimdecomp/functions.hpp"
#include "dimdecomp/measures.hpp"
#include "dimdecomp/subsets.hpp"

namespace dimdecomp {

inline constexpr int kDefaultQuadOrder = 10;

/// Function y on R^N together with the product input measure it is
/// decomposed against.
struct ProblemSpec {
  ProductMeasure measure;
  Function y;
  int quad_order = kDefaultQuadOrder;
  /// Gauss panels per coordinate; values above 1 need uniform marginals.
  int quad_panels = 1;

  int dim() const { return measure.dim(); }
  /// Nodes per coordinate, quad_order * quad_panels.
  int nodes_per_dim() const { return quad_order * quad_panels; }
  QuadratureRule rule(int coord) const { return composite_gauss_rule(measure[coord], quad_order, quad_panels); }
  /// Throws std::invalid_argument when quad_order < 1, quad_panels < 1, y is
  /// empty, N exceeds the subset cap, or panels are requested for a normal
  /// marginal.
  void validate() const;
};

enum class DecompositionKind { kAnova, kAnchored };

struct AnovaBuildOptions {
  /// Upper bound on the number of full tensor grid points n^N.
  std::size_t grid_budget = std::size_t{1} << 24;
  /// Enables off-grid evaluation through barycentric Lagrange interpolation
  /// (piecewise over panels for composite rules).
  bool interpolate = false;
};

/// Thrown when a requested grid or quadrature exceeds its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ANOVA decomposition stored as component values on tensor subgrids of the
/// Gauss nodes.
///
/// Component y_u is kept on the grid of u's coordinates, flattened with the
/// lowest coordinate varying fastest. Components are built in cardinality
/// order as the conditional mean over the complementary coordinates minus the
/// components of all strict subsets, so every nonempty component has zero
/// quadrature mean in each of its own coordinates.
class AnovaTable {
 public:
  /// Throws BudgetExceeded when n^N > options.grid_budget and
  /// std::domain_error when y is not finite at a grid point.
  static AnovaTable build(const ProblemSpec& problem, const AnovaBuildOptions& options = {});

  DecompositionKind kind() const { return DecompositionKind::kAnova; }
  int dim() const { return dim_; }
  /// Nodes per coordinate.
  int order() const { return order_; }
  bool interpolating() const { return interpolate_; }
  double y_empty() const { return values_[0].front(); }
  /// max(1, |y_empty|); the reference magnitude for residual tolerances.
  double scale() const;

  const QuadratureRule& rule(int coord) const { return rules_[coord]; }
  const std::vector<QuadratureRule>& rules() const { return rules_; }

  /// Values of y_u on u's subgrid (n^|u| entries).
  std::span<const double> component_values(const Subset& u) const { return values_[u.mask()]; }
  /// y on the full tensor grid (n^N entries, coordinate 0 fastest).
  std::span<const double> grid_values() const { return grid_; }

  /// y_u at the grid point with per-coordinate node indices `index` (length N;
  /// entries outside u are ignored).
  double component_at(const Subset& u, std::span<const int> index) const;
  /// Sum of components with |u| <= max_size at a grid point.
  double truncated_at(int max_size, std::span<const int> index) const;

  /// y_u at an arbitrary point x in R^N (coordinates outside u ignored). Off
  /// grid points require an interpolating table; otherwise throws
  /// std::domain_error.
  double component(const Subset& u, std::span<const double> x) const;
  /// Truncated approximation sum_{|u| <= max_size} y_u(x_u).
  double truncated(int max_size, std::span<const double> x) const;

  /// Node coordinates of a grid point.
  std::vector<double> grid_point(std::span<const int> index) const;
  std::size_t grid_size() const { return grid_.size(); }
  /// Per-coordinate node indices of a flat full-grid position.
  std::vector<int> unflatten(std::size_t flat) const;

  /// Fault injection for verification tests: shifts one stored value.
  void perturb_for_testing(const Subset& u, std::size_t flat, double delta);

 private:
  AnovaTable() = default;

  std::size_t flat_index(const Subset& u, std::span<const int> index) const;
  /// Per-coordinate Lagrange basis values at x_i (length n), or a one-hot
  /// vector when x_i is a node.
  std::vector<double> basis(int coord, double x) const;

  int dim_ = 0;
  int order_ = 0;
  bool interpolate_ = false;
  std::vector<QuadratureRule> rules_;
  std::vector<std::vector<double>> bary_;  // barycentric weights per coordinate, per panel
  std::vector<std::vector<double>> values_;  // indexed by subset mask
  std::vector<double> grid_;
};

/// Anchored (cut) decomposition at reference point c.
///
/// Components are not tabulated; y_u(x_u; c) is recovered on demand from the
/// anchored evaluations y(x_v, c_{-v}), v subset of u, memoized per call.
class AnchoredTable {
 public:
  /// Throws std::invalid_argument if the anchor has the wrong length or lies
  /// outside the measure's support.
  AnchoredTable(ProblemSpec problem, std::vector<double> anchor);

  DecompositionKind kind() const { return DecompositionKind::kAnchored; }
  int dim() const { return problem_.dim(); }
  const std::vector<double>& anchor() const { return anchor_; }
  double y_empty() const { return y_anchor_; }
  double scale() const;

  /// y(x_u, c_{-u}).
  double anchored_value(const Subset& u, std::span<const double> x) const;
  double component(const Subset& u, std::span<const double> x) const;
  double truncated(int max_size, std::span<const double> x) const;

 private:
  ProblemSpec problem_;
  std::vector<double> anchor_;
  double y_anchor_ = 0.0;
};

double eval_truncated(const AnovaTable& table, int max_size, std::span<const double> x);
double eval_truncated(const AnchoredTable& table, int max_size, std::span<const double> x);

/// Inclusion-exclusion form of a component:
/// sum_{v subset of u} (-1)^{|u|-|v|} T_v(x_v), where T_v is the quadrature
/// of y over the coordinates outside v (ANOVA) or y(x_v, c_{-v}) (anchored).
/// `anchor` must be empty for kAnova and of length N for kAnchored.
double explicit_component(const ProblemSpec& problem, const Subset& u, DecompositionKind kind,
                          std::span<const double> anchor, std::span<const double> x);

/// Precomputed direct S-variate anchored approximation
///   sum_{k=0}^{S} (-1)^k C(N-S+k-1, k) sum_{|u|=S-k} y(x_u, c_{-u}),
/// which avoids building individual components.
class RddDirect {
 public:
  /// Throws std::invalid_argument unless 0 <= S < N.
  RddDirect(int dim, int truncation);

  int dim() const { return dim_; }
  int truncation() const { return truncation_; }

  /// `scratch` must have length N; it is overwritten.
  double operator()(const Function& y, std::span<const double> anchor, std::span<const double> x,
                    std::span<double> scratch) const;

 private:
  struct Layer {
    double coefficient;
    std::vector<Subset::Mask> masks;
  };
  int dim_;
  int truncation_;
  std::vector<Layer> layers_;
};

double rdd_direct(const ProblemSpec& problem, int truncation, std::span<const double> anchor,
                  std::span<const double> x);

/// Worst residual of a structural check and where it occurred.
struct Residual {
  double value = 0.0;
  Subset where;
  Subset other;  // second subset for pairwise checks
};

/// Largest |quadrature mean| of y_u over one of its own coordinates, taken
/// over all nonempty u and all values of the remaining coordinates of u.
Residual zero_mean_residual(const AnovaTable& table);
/// Largest |sum_{x_{u∪v}} w * y_u * y_v| over distinct nonempty u, v.
Residual orthogonality_residual(const AnovaTable& table);
/// Largest |sum_u y_u - y| over all full-grid points.
double grid_exactness_residual(const AnovaTable& table);
/// Largest |y_u(x_u; c)| with one coordinate of u pinned to its anchor value,
/// over all nonempty u and the given sample points.
Residual annihilation_residual(const AnchoredTable& table, std::span<const std::vector<double>> points);

}  // namespace dimdecomp
