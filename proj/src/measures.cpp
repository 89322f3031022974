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

#include "dimdecomp/measures.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dimdecomp {

Marginal Marginal::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream msg;
    msg << "uniform marginal requires finite lo < hi, got [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
  return Marginal(Kind::kUniform, lo, hi);
}

Marginal Marginal::standard_normal() {
  return Marginal(Kind::kStandardNormal, -INFINITY, INFINITY);
}

double Marginal::density(double x) const {
  if (kind_ == Kind::kUniform) return in_support(x) ? 1.0 / (hi_ - lo_) : 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

bool Marginal::in_support(double x) const {
  if (kind_ == Kind::kUniform) return x >= lo_ && x <= hi_;
  return std::isfinite(x);
}

double Marginal::mean() const { return kind_ == Kind::kUniform ? 0.5 * (lo_ + hi_) : 0.0; }

double Marginal::moment(int k) const {
  if (k < 0) throw std::invalid_argument("moment order must be nonnegative");
  if (k == 0) return 1.0;
  if (kind_ == Kind::kUniform) {
    // (hi^{k+1} - lo^{k+1}) / ((k+1)(hi-lo)) written as a sum to avoid cancellation.
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += std::pow(hi_, j) * std::pow(lo_, k - j);
    return acc / (k + 1);
  }
  if (k % 2 == 1) return 0.0;
  double dfact = 1.0;
  for (int j = k - 1; j > 1; j -= 2) dfact *= j;
  return dfact;
}

std::string Marginal::describe() const {
  std::ostringstream out;
  if (kind_ == Kind::kUniform)
    out << "uniform(" << lo_ << "," << hi_ << ")";
  else
    out << "standard_normal";
  return out.str();
}

ProductMeasure::ProductMeasure(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("product measure needs at least one marginal");
}

ProductMeasure ProductMeasure::iid(const Marginal& m, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return ProductMeasure(std::vector<Marginal>(static_cast<std::size_t>(dim), m));
}

bool ProductMeasure::in_support(std::span<const double> x) const {
  if (x.size() != marginals_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!marginals_[i].in_support(x[i])) return false;
  return true;
}

namespace {

// Off-diagonal Jacobi coefficient beta_k (k >= 1) of the orthonormal
// recurrence on the reference measure. Both reference measures are symmetric,
// so the diagonal vanishes.
double jacobi_beta(Marginal::Kind kind, int k) {
  if (kind == Marginal::Kind::kUniform) {
    const double kk = static_cast<double>(k);
    return kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return std::sqrt(static_cast<double>(k));
}

struct PolyEval {
  double value;       // p_n(x)
  double derivative;  // p_n'(x)
  double christoffel;  // sum_{k<n} p_k(x)^2
};

PolyEval eval_orthonormal(Marginal::Kind kind, int n, double x) {
  double p_prev = 0.0, p = 1.0;
  double d_prev = 0.0, d = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += p * p;
    const double beta_next = jacobi_beta(kind, k + 1);
    const double beta_cur = k == 0 ? 0.0 : jacobi_beta(kind, k);
    const double p_next = (x * p - beta_cur * p_prev) / beta_next;
    const double d_next = (p + x * d - beta_cur * d_prev) / beta_next;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d, sum_sq};
}

}  // namespace

QuadratureRule gauss_rule(const Marginal& m, int n, int max_order) {
  if (n < 1 || n > max_order) {
    std::ostringstream msg;
    msg << "quadrature order must lie in [1, " << max_order << "], got " << n;
    throw std::invalid_argument(msg.str());
  }
  const auto kind = m.kind();

  Eigen::VectorXd nodes(n);
  if (n == 1) {
    nodes(0) = 0.0;
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub(k - 1) = jacobi_beta(kind, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    nodes = solver.eigenvalues();
  }

  for (int i = 0; i < n; ++i) {
    double x = nodes(i);
    for (int it = 0; it < 8; ++it) {
      const PolyEval e = eval_orthonormal(kind, n, x);
      if (e.derivative == 0.0) break;
      const double step = e.value / e.derivative;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    nodes(i) = x;
  }
  // Both reference measures are symmetric about zero.
  for (int i = 0; i < n / 2; ++i) {
    const double half = 0.5 * (nodes(n - 1 - i) - nodes(i));
    nodes(i) = -half;
    nodes(n - 1 - i) = half;
  }
  if (n % 2 == 1) nodes(n / 2) = 0.0;

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i)
    rule.weights[i] = 1.0 / eval_orthonormal(kind, n, nodes(i)).christoffel;
  for (int i = 0; i < n / 2; ++i) {
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;

  if (kind == Marginal::Kind::kUniform) {
    const double mid = 0.5 * (m.lo() + m.hi());
    const double half = 0.5 * (m.hi() - m.lo());
    for (int i = 0; i < n; ++i) rule.nodes[i] = mid + half * nodes(i);
  } else {
    for (int i = 0; i < n; ++i) rule.nodes[i] = nodes(i);
  }
  return rule;
}

QuadratureRule composite_gauss_rule(const Marginal& m, int n, int panels) {
  if (panels < 1) throw std::invalid_argument("quadrature panel count must be at least 1");
  if (panels == 1) return gauss_rule(m, n);
  if (m.kind() != Marginal::Kind::kUniform)
    throw std::invalid_argument("composite quadrature needs a uniform marginal");
  const double width = (m.hi() - m.lo()) / panels;
  QuadratureRule rule;
  rule.panels = panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = m.lo() + k * width;
    const double hi = k + 1 == panels ? m.hi() : lo + width;
    const auto piece = gauss_rule(Marginal::uniform(lo, hi), n);
    for (int i = 0; i < n; ++i) {
      rule.nodes.push_back(piece.nodes[i]);
      rule.weights.push_back(piece.weights[i] / panels);
    }
  }
  return rule;
}

double Rng::draw(const Marginal& m) {
  if (m.kind() == Marginal::Kind::kUniform) return m.lo() + (m.hi() - m.lo()) * uniform01();
  return normal();
}

void sample_into(const ProductMeasure& m, Rng& rng, std::span<double> out) {
  if (static_cast<int>(out.size()) != m.dim())
    throw std::invalid_argument("sample buffer size does not match measure dimension");
  for (int i = 0; i < m.dim(); ++i) out[i] = rng.draw(m[i]);
}

std::vector<double> sample(const ProductMeasure& m, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(m.dim()));
  sample_into(m, rng, x);
  return x;
}

}  // namespace dimdecomp
