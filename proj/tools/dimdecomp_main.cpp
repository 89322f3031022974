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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimdecomp/errors.hpp"
#include "dimdecomp/mc.hpp"
#include "dimdecomp/variance.hpp"
#include "dimdecomp/verify.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace dimdecomp;
using dimdecomp::cli::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInvariant = 2;

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_samples;
  std::optional<int> quad_order;
  std::vector<int> S;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "Monte Carlo seed");
  app->add_option("--n-samples", o.n_samples, "Monte Carlo sample count");
  app->add_option("--quad-order", o.quad_order, "Gauss nodes per panel and coordinate");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : cli::load_config(o.config);
  if (o.out) cfg.output = *o.out;
  if (o.seed) cfg.mc.seed = *o.seed;
  if (o.n_samples) cfg.mc.n = *o.n_samples;
  if (o.quad_order) cfg.quad_order = *o.quad_order;
  if (!o.S.empty()) cfg.S = o.S;
  cli::validate(cfg);
  return cfg;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output);
  const auto path = fs::path(cfg.output) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

nlohmann::ordered_json residual_json(double value, double tolerance, const std::string& where) {
  nlohmann::ordered_json j;
  j["residual"] = value;
  j["tolerance"] = tolerance;
  j["pass"] = value <= tolerance;
  if (!where.empty()) j["where"] = where;
  return j;
}

int cmd_decompose(const RunConfig& cfg) {
  const auto problem = cli::make_problem(cfg);
  const int N = problem.dim();
  const auto table = AnovaTable::build(problem);
  const auto v = variance_components(table);

  std::vector<double> sobol;
  const bool has_variance = v.total() > 0.0;
  if (has_variance) sobol = sobol_indices(v);

  auto csv = open_output(cfg, "variance.csv");
  csv << "# schema: dimdecomp.variance v1\n";
  csv << "subset,cardinality,sigma2,sobol_index\n";
  for (const auto& u : all_subsets_up_to(N, N)) {
    if (u.is_empty()) continue;
    csv << '"' << u.to_string() << "\"," << u.size() << ',' << num(v[u]) << ','
        << (has_variance ? num(sobol[u.mask()]) : "nan") << '\n';
  }

  const double s = table.scale();
  const auto zm = zero_mean_residual(table);
  const auto orth = orthogonality_residual(table);
  const double exact = grid_exactness_residual(table);
  std::vector<double> anchor(N);
  for (int i = 0; i < N; ++i) anchor[i] = problem.measure[i].mean();
  const AnchoredTable at(problem, anchor);
  Rng rng(cfg.mc.seed);
  std::vector<std::vector<double>> points;
  for (int k = 0; k < 20; ++k) points.push_back(sample(problem.measure, rng));
  const auto ann = annihilation_residual(at, points);

  nlohmann::ordered_json report;
  report["N"] = N;
  report["y_empty"] = v.y_empty();
  report["total_variance"] = v.total();
  report["scale"] = s;
  report["zero_mean"] = residual_json(zm.value, 1e-10 * s, zm.where.to_string());
  report["orthogonality"] =
      residual_json(orth.value, 1e-10 * s * s, N >= 2 ? orth.where.to_string() + "," + orth.other.to_string() : "");
  report["full_sum_exactness"] = residual_json(exact, 1e-10 * s, "");
  report["annihilation"] = residual_json(ann.value, 1e-12 * at.scale(), ann.where.to_string());
  report["annihilation"]["anchor"] = anchor;
  if (!has_variance) report["notice"] = "total variance is zero; Sobol indices are undefined";
  open_output(cfg, "properties.json") << report.dump(2) << '\n';

  std::cout << "N=" << N << " y_empty=" << num(v.y_empty()) << " total_variance=" << num(v.total()) << '\n';
  if (!has_variance) std::cout << "notice: total variance is zero; Sobol indices are undefined\n";
  bool ok = true;
  for (const char* key : {"zero_mean", "orthogonality", "full_sum_exactness", "annihilation"}) {
    const bool pass = report[key]["pass"].get<bool>();
    ok = ok && pass;
    std::cout << key << ": " << num(report[key]["residual"].get<double>()) << (pass ? " ok" : " FAIL") << '\n';
  }
  std::cout << "wrote " << (fs::path(cfg.output) / "variance.csv").string() << " and properties.json\n";
  return ok ? kExitOk : kExitInvariant;
}

int cmd_errors(const RunConfig& cfg, bool sample) {
  const auto problem = cli::make_problem(cfg);
  const auto truncations = cli::truncation_orders(cfg);
  const auto table = AnovaTable::build(problem, {.interpolate = sample});
  const auto v = variance_components(table);

  auto csv = open_output(cfg, "errors.csv");
  csv << "# schema: dimdecomp.errors v1\n";
  csv << "S,N,e_add,e_rdd_expected,lower,upper,ratio\n";
  auto terms = open_output(cfg, "error_terms.csv");
  terms << "# schema: dimdecomp.error_terms v1\n";
  terms << "S,s,variance_sum,coefficient\n";
  std::cout << "S  e_add  e_rdd_expected  ratio\n";
  for (int S : truncations) {
    const auto b = rdd_expected_error(S, v);
    const double ratio = b.e_add > 0.0 ? b.e_rdd_expected / b.e_add : NAN;
    csv << S << ',' << b.N << ',' << num(b.e_add) << ',' << num(b.e_rdd_expected) << ',' << num(b.lower_bound) << ','
        << num(b.upper_bound) << ',' << num(ratio) << '\n';
    for (const auto& t : b.per_cardinality)
      terms << S << ',' << t.s << ',' << num(t.variance_sum) << ',' << num(t.coefficient) << '\n';
    std::cout << S << "  " << num(b.e_add) << "  " << num(b.e_rdd_expected) << "  " << num(ratio) << '\n';
  }

  if (sample) {
    auto jsonl = open_output(cfg, "mc.jsonl");
    const McOptions opt{.n = cfg.mc.n, .seed = cfg.mc.seed, .streams = cfg.mc.streams, .threads = cfg.mc.threads};
    for (int S : truncations) {
      jsonl << to_json_record(mc_add_error(problem, table, S, opt), "add_error", S) << '\n';
      jsonl << to_json_record(mc_expected_rdd_error(problem, S, opt), "expected_rdd_error", S) << '\n';
    }
  }
  return kExitOk;
}

nlohmann::ordered_json check_json(const CheckResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["pass"] = r.pass;
  j["measured"] = r.measured;
  j["tolerance"] = r.tolerance;
  j["detail"] = r.detail;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.violations) j["violations"].push_back({{"where", v.where}, {"measured", v.measured}});
  return j;
}

int cmd_verify(const RunConfig& cfg, bool inject_fault) {
  const auto problem = cli::make_problem(cfg);
  const auto truncations = cli::truncation_orders(cfg);
  VerifyOptions opt;
  opt.n = cfg.mc.n;
  opt.seed = cfg.mc.seed;
  opt.builtin_max_dim = cfg.verify.max_dim;
  opt.builtin_n = cfg.mc.n;
  opt.corrupt_table = inject_fault;

  std::vector<CheckResult> results = acceptance_suite(opt);
  results.push_back(check_builtin_agreement(opt));
  results.push_back(check_problem(problem, truncations, opt));

  bool ok = true;
  nlohmann::ordered_json report;
  report["n"] = opt.n;
  report["seed"] = opt.seed;
  report["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    std::cout << format_result(r) << '\n';
    for (const auto& v : r.violations) std::cout << "  violation: " << v.where << " measured=" << num(v.measured) << '\n';
    report["checks"].push_back(check_json(r));
    ok = ok && r.pass;
  }
  report["pass"] = ok;
  open_output(cfg, "verify.json") << report.dump(2) << '\n';
  std::cout << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok ? kExitOk : kExitInvariant;
}

int cmd_figure1(const RunConfig& cfg) {
  const auto& f = cfg.figure1;
  auto left = open_output(cfg, "figure1_left.csv");
  left << "# schema: dimdecomp.figure1_left v1\n";
  left << "N,p_min\n";
  for (int N = f.n_min; N <= f.n_max; ++N) {
    const auto r = pmin_for_N(N);
    left << N << ',' << num(r.p_min) << '\n';
    if (N == f.N) std::cout << "p_min(N=" << N << ") = " << num(r.p_min) << '\n';
  }
  auto right = open_output(cfg, "figure1_right.csv");
  right << "# schema: dimdecomp.figure1_right v1\n";
  right << "p,S,e_add_norm,e_rdd_norm\n";
  for (double p : f.p) {
    const auto c = decay_curves({f.C, p, f.N});
    for (const auto& row : c.rows)
      right << num(p) << ',' << row.S << ',' << num(row.e_add_norm) << ',' << num(row.e_rdd_norm) << '\n';
  }
  std::cout << "wrote " << (fs::path(cfg.output) / "figure1_left.csv").string() << " and figure1_right.csv\n";
  return kExitOk;
}

int cmd_contrived(const RunConfig& cfg) {
  const auto r = contrived_example();
  std::cout << "N = " << r.N << ", V_1 = 0.999 sigma^2, V_N = 0.001 sigma^2, all other V_s = 0\n";
  std::cout << "quantity,value_in_sigma2\n";
  const std::vector<std::pair<std::string, double>> rows{
      {"e_add_S1", r.e_add_1},         {"e_add_S2", r.e_add_2},         {"coefficient_S1", r.coeff_1},
      {"coefficient_S2", r.coeff_2},   {"e_rdd_expected_S1", r.e_rdd_1}, {"e_rdd_expected_S2", r.e_rdd_2},
  };
  auto csv = open_output(cfg, "contrived.csv");
  csv << "# schema: dimdecomp.contrived v1\n";
  csv << "quantity,value_in_sigma2\n";
  for (const auto& [k, v] : rows) {
    std::cout << k << ',' << num(v) << '\n';
    csv << k << ',' << num(v) << '\n';
  }
  std::cout << "inversion (bivariate anchored error exceeds univariate): " << (r.inversion ? "yes" : "no") << '\n';
  csv << "inversion," << (r.inversion ? 1 : 0) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensional decompositions and truncation errors"};
  app.require_subcommand(1);
  Overrides o;
  bool sample = false;
  bool inject_fault = false;

  auto* decompose = app.add_subcommand("decompose", "variance components, Sobol indices and property residuals");
  add_common(decompose, o);
  auto* errors = app.add_subcommand("errors", "truncation errors, bounds and ratios for each S");
  add_common(errors, o);
  errors->add_option("--S", o.S, "truncation orders")->delimiter(',');
  errors->add_flag("--mc", sample, "also estimate both errors by sampling (writes mc.jsonl)");
  auto* verify = app.add_subcommand("verify", "invariant suite and sampling agreement gates");
  add_common(verify, o);
  verify->add_option("--S", o.S, "truncation orders")->delimiter(',');
  verify->add_flag("--inject-fault", inject_fault, "corrupt one ANOVA table entry (tests the checks)");
  auto* figure1 = app.add_subcommand("figure1", "threshold rate p_min(N) and decay curves");
  add_common(figure1, o);
  auto* contrived = app.add_subcommand("contrived", "100-variable example with inverted anchored errors");
  add_common(contrived, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    const RunConfig cfg = resolve(o);
    if (decompose->parsed()) return cmd_decompose(cfg);
    if (errors->parsed()) return cmd_errors(cfg, sample);
    if (verify->parsed()) return cmd_verify(cfg, inject_fault);
    if (figure1->parsed()) return cmd_figure1(cfg);
    if (contrived->parsed()) return cmd_contrived(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
