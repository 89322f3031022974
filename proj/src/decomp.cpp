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

#include "dimdecomp/decomp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace dimdecomp {

namespace {

using Mask = Subset::Mask;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// n^exp, or nullopt-like 0 when it exceeds `cap`.
std::size_t capped_pow(std::size_t base, int exp, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > cap / base) return 0;
    r *= base;
  }
  return r <= cap ? r : 0;
}

// Flat position on the subgrid of `mask` (lowest coordinate fastest) from
// full per-coordinate node indices.
std::size_t flat_of(Mask mask, std::span<const int> index, std::size_t n) {
  std::size_t flat = 0, stride = 1;
  for (Mask m = mask; m != 0; m &= m - 1) {
    flat += static_cast<std::size_t>(index[std::countr_zero(m)]) * stride;
    stride *= n;
  }
  return flat;
}

// Advances a mixed-radix counter over the coordinates in `mask`.
void advance(Mask mask, std::vector<int>& index, int n) {
  for (Mask m = mask; m != 0; m &= m - 1) {
    const int c = std::countr_zero(m);
    if (++index[c] < n) return;
    index[c] = 0;
  }
}

void require_finite(double v, std::span<const double> x) {
  if (std::isfinite(v)) return;
  std::ostringstream msg;
  msg << "non-finite function value at (";
  for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? "," : "") << x[i];
  msg << ")";
  throw std::domain_error(msg.str());
}

std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] /= nodes[j] - nodes[k];
  double big = 0.0;
  for (double v : w) big = std::max(big, std::abs(v));
  for (double& v : w) v /= big;
  return w;
}

// Contracts a tensor stored on u's subgrid (first coordinate fastest) with one
// basis vector per coordinate of u.
double contract(std::span<const double> values, const std::vector<const std::vector<double>*>& bases,
                std::size_t n) {
  if (bases.empty()) return values.front();
  std::vector<double> cur(values.begin(), values.end());
  for (const auto* b : bases) {
    const std::size_t rows = cur.size() / n;
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += (*b)[t] * cur[t + n * r];
      cur[r] = acc;
    }
    cur.resize(rows);
  }
  return cur.front();
}

}  // namespace

void ProblemSpec::validate() const {
  if (!y) throw std::invalid_argument("problem has no function");
  if (quad_order < 1) throw std::invalid_argument("quad_order must be at least 1");
  if (quad_panels < 1) throw std::invalid_argument("quad_panels must be at least 1");
  if (quad_panels > 1)
    for (const auto& m : measure.marginals())
      if (m.kind() != Marginal::Kind::kUniform) throw std::invalid_argument("quad_panels > 1 needs uniform marginals");
  if (dim() > kMaxSubsetDim) {
    std::ostringstream msg;
    msg << "dimension " << dim() << " exceeds subset cap " << kMaxSubsetDim;
    throw std::invalid_argument(msg.str());
  }
}

// ---------------------------------------------------------------------------
// AnovaTable

AnovaTable AnovaTable::build(const ProblemSpec& problem, const AnovaBuildOptions& options) {
  problem.validate();
  AnovaTable t;
  t.dim_ = problem.dim();
  t.order_ = problem.nodes_per_dim();
  t.interpolate_ = options.interpolate;
  const int N = t.dim_;
  const auto n = static_cast<std::size_t>(t.order_);

  const std::size_t total = capped_pow(n, N, options.grid_budget);
  if (total == 0) {
    std::ostringstream msg;
    msg << "tensor grid " << n << "^" << N << " exceeds grid budget " << options.grid_budget;
    throw BudgetExceeded(msg.str());
  }

  t.rules_.reserve(N);
  for (int i = 0; i < N; ++i) t.rules_.push_back(problem.rule(i));
  if (t.interpolate_) {
    for (const auto& r : t.rules_) {
      const std::size_t per = r.nodes.size() / r.panels;
      std::vector<double> w;
      for (int k = 0; k < r.panels; ++k) {
        const auto piece = barycentric_weights({r.nodes.begin() + k * per, r.nodes.begin() + (k + 1) * per});
        w.insert(w.end(), piece.begin(), piece.end());
      }
      t.bary_.push_back(std::move(w));
    }
  }

  const Mask full = Subset::full_mask(N);
  t.grid_.resize(total);
  {
    std::vector<int> index(N, 0);
    std::vector<double> x(N);
    for (std::size_t f = 0; f < total; ++f) {
      for (int i = 0; i < N; ++i) x[i] = t.rules_[i].nodes[index[i]];
      const double v = problem.y(x);
      require_finite(v, x);
      t.grid_[f] = v;
      advance(full, index, t.order_);
    }
  }

  // Conditional means, top-down: the mean for u integrates the lowest missing
  // coordinate j out of the mean for u + {j}.
  const std::size_t n_masks = std::size_t{1} << N;
  std::vector<std::vector<double>> cond(n_masks);
  cond[full] = t.grid_;
  std::vector<Mask> by_size_desc(n_masks);
  for (Mask m = 0; m < n_masks; ++m) by_size_desc[m] = m;
  std::stable_sort(by_size_desc.begin(), by_size_desc.end(),
                   [](Mask a, Mask b) { return std::popcount(a) > std::popcount(b); });
  for (Mask u : by_size_desc) {
    if (u == full) continue;
    const int j = std::countr_zero(static_cast<Mask>(~u & full));
    const Mask parent = u | (Mask{1} << j);
    const int pos = std::popcount(parent & ((Mask{1} << j) - 1));
    const std::size_t low_span = ipow(n, pos);
    const std::size_t size_u = ipow(n, std::popcount(u));
    const auto& w = t.rules_[j].weights;
    const auto& src = cond[parent];
    std::vector<double> dst(size_u, 0.0);
    for (std::size_t f = 0; f < size_u; ++f) {
      const std::size_t low = f % low_span;
      const std::size_t high = f / low_span;
      const std::size_t base = low + high * low_span * n;
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += w[s] * src[base + s * low_span];
      dst[f] = acc;
    }
    cond[u] = std::move(dst);
  }

  // Components in cardinality order: y_u = E[y | x_u] - sum_{v strict subset u} y_v.
  t.values_.assign(n_masks, {});
  for (const Subset& su : all_subsets_up_to(N, N)) {
    const Mask u = su.mask();
    std::vector<double> vals = std::move(cond[u]);
    if (u != 0) {
      const auto subs = strict_subsets(su);
      const std::size_t size_u = vals.size();
      std::vector<int> index(N, 0);
      for (std::size_t f = 0; f < size_u; ++f) {
        double acc = 0.0;
        for (const Subset& v : subs) acc += t.values_[v.mask()][flat_of(v.mask(), index, n)];
        vals[f] -= acc;
        advance(u, index, t.order_);
      }
    }
    t.values_[u] = std::move(vals);
  }
  return t;
}

double AnovaTable::scale() const { return std::max(1.0, std::abs(y_empty())); }

std::size_t AnovaTable::flat_index(const Subset& u, std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dim_) throw std::invalid_argument("grid index has wrong length");
  return flat_of(u.mask(), index, static_cast<std::size_t>(order_));
}

double AnovaTable::component_at(const Subset& u, std::span<const int> index) const {
  return values_[u.mask()][flat_index(u, index)];
}

double AnovaTable::truncated_at(int max_size, std::span<const int> index) const {
  if (max_size < 0 || max_size > dim_) throw std::invalid_argument("truncation must satisfy 0 <= S <= N");
  double acc = 0.0;
  for (const Subset& u : all_subsets_up_to(dim_, max_size)) acc += component_at(u, index);
  return acc;
}

std::vector<double> AnovaTable::basis(int coord, double x) const {
  const auto& nodes = rules_[coord].nodes;
  const std::size_t n = nodes.size();
  std::vector<double> b(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (x == nodes[j]) {
      b[j] = 1.0;
      return b;
    }
  }
  if (!interpolate_) {
    std::ostringstream msg;
    msg << "coordinate " << coord + 1 << " value " << x
        << " is not a grid node; build the table with interpolation for off-grid evaluation";
    throw std::domain_error(msg.str());
  }
  const int panels = rules_[coord].panels;
  const std::size_t per = n / panels;
  std::size_t first = 0;
  if (panels > 1) {
    // Panel edges sit halfway between the last node of one panel and the
    // first node of the next.
    int k = 0;
    while (k + 1 < panels && x > 0.5 * (nodes[(k + 1) * per - 1] + nodes[(k + 1) * per])) ++k;
    first = k * per;
  }
  double denom = 0.0;
  for (std::size_t j = first; j < first + per; ++j) {
    b[j] = bary_[coord][j] / (x - nodes[j]);
    denom += b[j];
  }
  for (double& v : b) v /= denom;
  return b;
}

double AnovaTable::component(const Subset& u, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("point has wrong dimension");
  std::vector<std::vector<double>> owned;
  std::vector<const std::vector<double>*> bases;
  const auto coords = u.coords();
  owned.reserve(coords.size());
  for (int c : coords) owned.push_back(basis(c, x[c]));
  for (const auto& b : owned) bases.push_back(&b);
  return contract(values_[u.mask()], bases, static_cast<std::size_t>(order_));
}

double AnovaTable::truncated(int max_size, std::span<const double> x) const {
  if (max_size < 0 || max_size > dim_) throw std::invalid_argument("truncation must satisfy 0 <= S <= N");
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("point has wrong dimension");
  std::vector<std::vector<double>> all;
  all.reserve(dim_);
  for (int i = 0; i < dim_; ++i) all.push_back(basis(i, x[i]));
  double acc = 0.0;
  std::vector<const std::vector<double>*> bases;
  for (const Subset& u : all_subsets_up_to(dim_, max_size)) {
    bases.clear();
    for (int c : u.coords()) bases.push_back(&all[c]);
    acc += contract(values_[u.mask()], bases, static_cast<std::size_t>(order_));
  }
  return acc;
}

std::vector<double> AnovaTable::grid_point(std::span<const int> index) const {
  std::vector<double> x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = rules_[i].nodes.at(index[i]);
  return x;
}

std::vector<int> AnovaTable::unflatten(std::size_t flat) const {
  std::vector<int> index(dim_);
  for (int i = 0; i < dim_; ++i) {
    index[i] = static_cast<int>(flat % order_);
    flat /= order_;
  }
  return index;
}

void AnovaTable::perturb_for_testing(const Subset& u, std::size_t flat, double delta) {
  values_.at(u.mask()).at(flat) += delta;
}

// ---------------------------------------------------------------------------
// AnchoredTable

AnchoredTable::AnchoredTable(ProblemSpec problem, std::vector<double> anchor)
    : problem_(std::move(problem)), anchor_(std::move(anchor)) {
  problem_.validate();
  if (static_cast<int>(anchor_.size()) != problem_.dim())
    throw std::invalid_argument("anchor length does not match dimension");
  if (!problem_.measure.in_support(anchor_)) throw std::invalid_argument("anchor lies outside the measure support");
  y_anchor_ = problem_.y(anchor_);
  require_finite(y_anchor_, anchor_);
}

double AnchoredTable::scale() const { return std::max(1.0, std::abs(y_anchor_)); }

double AnchoredTable::anchored_value(const Subset& u, std::span<const double> x) const {
  std::vector<double> p = anchor_;
  for (int c : u.coords()) p[c] = x[c];
  const double v = problem_.y(p);
  require_finite(v, p);
  return v;
}

double AnchoredTable::component(const Subset& u, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("point has wrong dimension");
  const auto coords = u.coords();
  const std::size_t k = coords.size();
  // Position r in [0, 2^k) encodes a submask of u; strict submasks of r are
  // numerically smaller, so a single increasing sweep sees them first.
  std::vector<double> comp(std::size_t{1} << k);
  for (std::size_t r = 0; r < comp.size(); ++r) {
    Mask v = 0;
    for (std::size_t b = 0; b < k; ++b)
      if ((r >> b) & 1u) v |= Mask{1} << coords[b];
    double value = anchored_value(Subset(v, dim()), x);
    for (std::size_t s = r; s != 0;) {
      s = (s - 1) & r;
      value -= comp[s];
    }
    comp[r] = value;
  }
  return comp.back();
}

double AnchoredTable::truncated(int max_size, std::span<const double> x) const {
  const int N = dim();
  if (max_size < 0 || max_size > N) throw std::invalid_argument("truncation must satisfy 0 <= S <= N");
  if (static_cast<int>(x.size()) != N) throw std::invalid_argument("point has wrong dimension");
  const auto subsets = all_subsets_up_to(N, max_size);
  std::unordered_map<Mask, double> comp;
  comp.reserve(subsets.size());
  double acc = 0.0;
  for (const Subset& u : subsets) {
    double value = anchored_value(u, x);
    const Mask um = u.mask();
    for_each_submask(um, [&](Mask v) {
      if (v != um) value -= comp.at(v);
    });
    comp.emplace(um, value);
    acc += value;
  }
  return acc;
}

double eval_truncated(const AnovaTable& table, int max_size, std::span<const double> x) {
  return table.truncated(max_size, x);
}

double eval_truncated(const AnchoredTable& table, int max_size, std::span<const double> x) {
  return table.truncated(max_size, x);
}

// ---------------------------------------------------------------------------
// Explicit (inclusion-exclusion) components

double explicit_component(const ProblemSpec& problem, const Subset& u, DecompositionKind kind,
                          std::span<const double> anchor, std::span<const double> x) {
  problem.validate();
  const int N = problem.dim();
  if (static_cast<int>(x.size()) != N) throw std::invalid_argument("point has wrong dimension");
  if (u.dim() != N) throw std::invalid_argument("subset dimension does not match problem");

  if (kind == DecompositionKind::kAnchored) {
    if (static_cast<int>(anchor.size()) != N) throw std::invalid_argument("anchored component needs an anchor");
    std::vector<double> p(N);
    double acc = 0.0;
    for_each_submask(u.mask(), [&](Mask v) {
      std::copy(anchor.begin(), anchor.end(), p.begin());
      for (Mask m = v; m != 0; m &= m - 1) p[std::countr_zero(m)] = x[std::countr_zero(m)];
      const double val = problem.y(p);
      require_finite(val, p);
      const int sign = (u.size() - std::popcount(v)) % 2 == 0 ? 1 : -1;
      acc += sign * val;
    });
    return acc;
  }

  if (!anchor.empty()) throw std::invalid_argument("ANOVA component takes no anchor");
  std::vector<QuadratureRule> rules;
  for (int i = 0; i < N; ++i) rules.push_back(problem.rule(i));
  const int n = problem.nodes_per_dim();
  const Mask full = Subset::full_mask(N);
  constexpr std::size_t kBudget = std::size_t{1} << 26;
  double acc = 0.0;
  std::vector<double> p(N);
  for_each_submask(u.mask(), [&](Mask v) {
    const Mask rest = full & ~v;
    const std::size_t count = capped_pow(n, std::popcount(rest), kBudget);
    if (count == 0) throw BudgetExceeded("explicit ANOVA component quadrature exceeds budget");
    std::vector<int> index(N, 0);
    double integral = 0.0;
    for (std::size_t f = 0; f < count; ++f) {
      double w = 1.0;
      for (int i = 0; i < N; ++i) {
        if ((v >> i) & 1u) {
          p[i] = x[i];
        } else {
          p[i] = rules[i].nodes[index[i]];
          w *= rules[i].weights[index[i]];
        }
      }
      const double val = problem.y(p);
      require_finite(val, p);
      integral += w * val;
      advance(rest, index, n);
    }
    const int sign = (u.size() - std::popcount(v)) % 2 == 0 ? 1 : -1;
    acc += sign * integral;
  });
  return acc;
}

// ---------------------------------------------------------------------------
// Direct anchored approximation

RddDirect::RddDirect(int dim, int truncation) : dim_(dim), truncation_(truncation) {
  if (dim > kMaxSubsetDim) throw std::invalid_argument("dimension exceeds subset cap");
  if (truncation < 0 || truncation >= dim) throw std::invalid_argument("S must satisfy 0 ≤ S < N");
  for (int k = 0; k <= truncation; ++k) {
    // C(N-S+k-1, k) with N-S-1 >= 0, so the top argument is a nonnegative integer.
    double binom = 1.0;
    const int top = dim - truncation + k - 1;
    for (int j = 1; j <= k; ++j) binom = binom * (top - k + j) / j;
    Layer layer{(k % 2 == 0 ? 1.0 : -1.0) * binom, {}};
    for (const Subset& u : subsets_of_size(dim, truncation - k)) layer.masks.push_back(u.mask());
    layers_.push_back(std::move(layer));
  }
}

double RddDirect::operator()(const Function& y, std::span<const double> anchor, std::span<const double> x,
                             std::span<double> scratch) const {
  double acc = 0.0;
  for (const Layer& layer : layers_) {
    double sum = 0.0;
    for (Mask m : layer.masks) {
      std::copy(anchor.begin(), anchor.end(), scratch.begin());
      for (Mask b = m; b != 0; b &= b - 1) {
        const int c = std::countr_zero(b);
        scratch[c] = x[c];
      }
      sum += y(scratch);
    }
    acc += layer.coefficient * sum;
  }
  return acc;
}

double rdd_direct(const ProblemSpec& problem, int truncation, std::span<const double> anchor,
                  std::span<const double> x) {
  problem.validate();
  const int N = problem.dim();
  if (static_cast<int>(anchor.size()) != N || static_cast<int>(x.size()) != N)
    throw std::invalid_argument("point has wrong dimension");
  const RddDirect direct(N, truncation);
  std::vector<double> scratch(N);
  const double v = direct(problem.y, anchor, x, scratch);
  require_finite(v, x);
  return v;
}

// ---------------------------------------------------------------------------
// Structural checks

Residual zero_mean_residual(const AnovaTable& table) {
  const int N = table.dim();
  const int n = table.order();
  Residual worst{0.0, Subset::empty(N), Subset::empty(N)};
  for (const Subset& u : all_subsets_up_to(N, N)) {
    if (u.is_empty()) continue;
    const auto vals = table.component_values(u);
    const auto coords = u.coords();
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const auto& w = table.rule(coords[k]).weights;
      const std::size_t low_span = ipow(n, static_cast<int>(k));
      std::vector<double> means(vals.size() / n, 0.0);
      for (std::size_t f = 0; f < vals.size(); ++f) {
        const std::size_t low = f % low_span;
        const std::size_t digit = (f / low_span) % n;
        const std::size_t high = f / (low_span * n);
        means[low + high * low_span] += w[digit] * vals[f];
      }
      for (double m : means)
        if (std::abs(m) > worst.value) worst = {std::abs(m), u, Subset::empty(N)};
    }
  }
  return worst;
}

Residual orthogonality_residual(const AnovaTable& table) {
  const int N = table.dim();
  const int n = table.order();
  const auto subsets = all_subsets_up_to(N, N);
  Residual worst{0.0, Subset::empty(N), Subset::empty(N)};
  for (std::size_t a = 1; a < subsets.size(); ++a) {
    for (std::size_t b = a + 1; b < subsets.size(); ++b) {
      const Mask u = subsets[a].mask(), v = subsets[b].mask();
      const Mask both = u | v;
      const std::size_t count = ipow(n, std::popcount(both));
      const auto yu = table.component_values(subsets[a]);
      const auto yv = table.component_values(subsets[b]);
      std::vector<int> index(N, 0);
      double acc = 0.0;
      for (std::size_t f = 0; f < count; ++f) {
        double w = 1.0;
        for (Mask m = both; m != 0; m &= m - 1) {
          const int c = std::countr_zero(m);
          w *= table.rule(c).weights[index[c]];
        }
        acc += w * yu[flat_of(u, index, n)] * yv[flat_of(v, index, n)];
        advance(both, index, n);
      }
      if (std::abs(acc) > worst.value) worst = {std::abs(acc), subsets[a], subsets[b]};
    }
  }
  return worst;
}

double grid_exactness_residual(const AnovaTable& table) {
  const int N = table.dim();
  const auto subsets = all_subsets_up_to(N, N);
  const auto grid = table.grid_values();
  double worst = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto index = table.unflatten(f);
    double acc = 0.0;
    for (const Subset& u : subsets) acc += table.component_at(u, index);
    worst = std::max(worst, std::abs(acc - grid[f]));
  }
  return worst;
}

Residual annihilation_residual(const AnchoredTable& table, std::span<const std::vector<double>> points) {
  const int N = table.dim();
  Residual worst{0.0, Subset::empty(N), Subset::empty(N)};
  const auto& c = table.anchor();
  for (const auto& x : points) {
    for (const Subset& u : all_subsets_up_to(N, N)) {
      if (u.is_empty()) continue;
      for (int i : u.coords()) {
        std::vector<double> pinned = x;
        pinned[i] = c[i];
        const double r = std::abs(table.component(u, pinned));
        if (r > worst.value) worst = {r, u, Subset::empty(N)};
      }
    }
  }
  return worst;
}

}  // namespace dimdecomp
