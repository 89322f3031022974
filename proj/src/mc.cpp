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

#include "dimdecomp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dimdecomp/errors.hpp"
#include "dimdecomp/variance.hpp"

namespace dimdecomp {

void MeanAccumulator::add(double v) {
  ++n_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (v - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

double MeanAccumulator::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double MeanAccumulator::std_error() const {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

// Runs `make_kernel()` once per stream; the kernel maps an Rng to one sample.
template <class MakeKernel>
McEstimate run_streams(const McOptions& options, MakeKernel&& make_kernel) {
  if (options.streams < 1) throw std::invalid_argument("need at least one Monte Carlo stream");
  const auto streams = static_cast<std::size_t>(options.streams);
  std::vector<MeanAccumulator> partial(streams);

  auto work = [&](std::size_t stream) {
    const std::size_t count = options.n / streams + (stream < options.n % streams ? 1 : 0);
    Rng rng(options.seed + stream);
    auto kernel = make_kernel();
    MeanAccumulator acc;
    for (std::size_t i = 0; i < count; ++i) acc.add(kernel(rng));
    partial[stream] = acc;
  };

  std::size_t threads = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, streams);
  if (threads <= 1) {
    for (std::size_t s = 0; s < streams; ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t s = t; s < streams; s += threads) work(s);
      });
    for (auto& th : pool) th.join();
  }

  MeanAccumulator total;
  for (const auto& p : partial) total.merge(p);
  return {total.mean(), total.std_error(), total.count(), options.seed};
}

void require_samples(std::size_t n, std::size_t minimum, const char* op) {
  if (n < minimum)
    throw std::invalid_argument(std::string(op) + ": sample count below minimum of " + std::to_string(minimum));
}

}  // namespace

McEstimate mc_add_error(const ProblemSpec& problem, const AnovaTable& table, int S, const McOptions& options) {
  problem.validate();
  require_samples(options.n, 1000, "mc_add_error");
  if (!table.interpolating()) throw std::invalid_argument("mc_add_error needs an interpolating ANOVA table");
  if (table.dim() != problem.dim()) throw std::invalid_argument("table and problem dimensions differ");
  if (S < 0 || S > problem.dim()) throw std::invalid_argument("S must satisfy 0 ≤ S ≤ N");
  return run_streams(options, [&] {
    return [&, x = std::vector<double>(problem.dim())](Rng& rng) mutable {
      sample_into(problem.measure, rng, x);
      const double r = problem.y(x) - table.truncated(S, x);
      return r * r;
    };
  });
}

McEstimate mc_rdd_error(const ProblemSpec& problem, int S, std::span<const double> anchor, const McOptions& options) {
  problem.validate();
  require_samples(options.n, 1000, "mc_rdd_error");
  const int N = problem.dim();
  if (static_cast<int>(anchor.size()) != N) throw std::invalid_argument("anchor has wrong dimension");
  const RddDirect direct(N, S);
  return run_streams(options, [&] {
    return [&, x = std::vector<double>(N), scratch = std::vector<double>(N)](Rng& rng) mutable {
      sample_into(problem.measure, rng, x);
      const double r = problem.y(x) - direct(problem.y, anchor, x, scratch);
      return r * r;
    };
  });
}

McEstimate mc_expected_rdd_error(const ProblemSpec& problem, int S, const McOptions& options) {
  problem.validate();
  require_samples(options.n, 10000, "mc_expected_rdd_error");
  const int N = problem.dim();
  const RddDirect direct(N, S);
  return run_streams(options, [&] {
    return [&, x = std::vector<double>(N), c = std::vector<double>(N), scratch = std::vector<double>(N)](
               Rng& rng) mutable {
      sample_into(problem.measure, rng, x);
      sample_into(problem.measure, rng, c);
      const double r = problem.y(x) - direct(problem.y, c, x, scratch);
      return r * r;
    };
  });
}

namespace {

struct CosineTerm {
  Subset::Mask mask;
  double alpha;
  std::vector<double> freq;   // per coordinate of the mask, in increasing order
  std::vector<double> phase;
};

double eval_perturbation(const std::vector<CosineTerm>& terms, std::span<const double> x) {
  double acc = 0.0;
  for (const auto& t : terms) {
    double v = t.alpha;
    std::size_t k = 0;
    for (Subset::Mask m = t.mask; m != 0; m &= m - 1, ++k) {
      const int c = std::countr_zero(m);
      v *= std::cos(t.freq[k] * x[c] + t.phase[k]);
    }
    acc += v;
  }
  return acc;
}

}  // namespace

OptimalityReport optimality_probe(const ProblemSpec& problem, const AnovaTable& table, int S, int n_perturb,
                                  const McOptions& options) {
  problem.validate();
  const int N = problem.dim();
  if (!table.interpolating()) throw std::invalid_argument("optimality_probe needs an interpolating ANOVA table");
  if (S < 0 || S >= N) throw std::invalid_argument("S must satisfy 0 ≤ S < N");
  if (n_perturb < 0) throw std::invalid_argument("perturbation count must be nonnegative");
  require_samples(options.n, 1000, "optimality_probe");

  OptimalityReport report;
  report.S = S;
  report.n = options.n;
  report.seed = options.seed;
  report.e_add = add_error(S, variance_components(table));

  // Perturbation j = 0 is zero; the others use a generator separate from the
  // x stream so the shared sample does not depend on n_perturb.
  const auto subsets = all_subsets_up_to(N, S);
  const double amplitude = 0.25 * table.scale();
  Rng shape_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::vector<CosineTerm>> perturbations(static_cast<std::size_t>(n_perturb) + 1);
  for (int j = 1; j <= n_perturb; ++j) {
    for (const Subset& u : subsets) {
      CosineTerm t{u.mask(), amplitude * (2.0 * shape_rng.uniform01() - 1.0), {}, {}};
      for (int k = 0; k < u.size(); ++k) {
        t.freq.push_back(0.5 + 2.5 * shape_rng.uniform01());
        t.phase.push_back(2.0 * std::numbers::pi * shape_rng.uniform01());
      }
      perturbations[j].push_back(std::move(t));
    }
  }

  const std::size_t P = perturbations.size();
  MeanAccumulator add_acc;
  std::vector<MeanAccumulator> err(P), shift(P), cross(P);
  Rng rng(options.seed);
  std::vector<double> x(N);
  for (std::size_t i = 0; i < options.n; ++i) {
    sample_into(problem.measure, rng, x);
    const double r = problem.y(x) - table.truncated(S, x);
    add_acc.add(r * r);
    for (std::size_t j = 0; j < P; ++j) {
      const double d = eval_perturbation(perturbations[j], x);
      const double e = r - d;
      err[j].add(e * e);
      shift[j].add(d * d);
      cross[j].add(2.0 * r * d);
    }
  }

  report.e_add_measured = add_acc.mean();
  report.e_add_measured_se = add_acc.std_error();
  report.all_pass = true;
  for (std::size_t j = 0; j < P; ++j) {
    PerturbationResult pr;
    for (const auto& t : perturbations[j]) pr.amplitude = std::max(pr.amplitude, std::abs(t.alpha));
    pr.error = err[j].mean();
    pr.error_se = err[j].std_error();
    pr.shift_sq = shift[j].mean();
    pr.cross = cross[j].mean();
    pr.cross_se = cross[j].std_error();
    pr.above_add_error = pr.error >= report.e_add - 3.0 * pr.error_se;
    const double split_gap = std::abs(pr.error - (report.e_add_measured + pr.shift_sq));
    // The zero perturbation has cross_se = 0 and an exactly vanishing gap.
    pr.split_holds = split_gap <= 3.0 * pr.cross_se + 1e-12 * std::max(1.0, pr.error);
    report.all_pass = report.all_pass && pr.above_add_error && pr.split_holds;
    report.perturbations.push_back(pr);
  }
  return report;
}

std::string to_json_record(const McEstimate& estimate, std::string_view op, int S) {
  nlohmann::ordered_json j;
  j["op"] = op;
  j["S"] = S;
  j["n"] = estimate.n;
  j["seed"] = estimate.seed;
  j["mean"] = estimate.mean;
  j["std_error"] = estimate.std_error;
  return j.dump();
}

}  // namespace dimdecomp
