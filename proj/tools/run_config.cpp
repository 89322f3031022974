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

#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>

#include "dimdecomp/subsets.hpp"

namespace dimdecomp::cli {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

template <class T>
T get(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type (" + std::string(j.type_name()) + ")");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

long long get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<long long>();
}

std::vector<double> get_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

FunctionConfig parse_function(const json& j) {
  FunctionConfig f;
  if (j.is_string()) {
    f.name = j.get<std::string>();
    return f;
  }
  require_object(j, "function");
  if (!j.contains("name")) throw ConfigError("function: missing \"name\"");
  f.name = get<std::string>(j["name"], "function.name");
  if (f.name == "product_linear" || f.name == "sobol_g") {
    reject_unknown(j, "function", {"name", "a"});
    if (j.contains("a")) f.a = get_numbers(j["a"], "function.a");
  } else if (f.name == "ishigami") {
    reject_unknown(j, "function", {"name", "a", "b"});
    if (j.contains("a")) f.ishigami_a = get_number(j["a"], "function.a");
    if (j.contains("b")) f.ishigami_b = get_number(j["b"], "function.b");
  } else if (f.name == "polynomial") {
    reject_unknown(j, "function", {"name", "terms"});
    if (!j.contains("terms") || !j["terms"].is_array()) throw ConfigError("function.terms: expected an array");
    for (std::size_t i = 0; i < j["terms"].size(); ++i) {
      const auto& t = j["terms"][i];
      const std::string where = "function.terms[" + std::to_string(i) + "]";
      require_object(t, where);
      reject_unknown(t, where, {"coef", "powers"});
      if (!t.contains("coef") || !t.contains("powers")) throw ConfigError(where + ": needs \"coef\" and \"powers\"");
      PolyTerm term;
      term.coef = get_number(t["coef"], where + ".coef");
      if (!t["powers"].is_array()) throw ConfigError(where + ".powers: expected an array");
      for (const auto& p : t["powers"]) term.powers.push_back(static_cast<int>(get_integer(p, where + ".powers")));
      f.terms.push_back(std::move(term));
    }
  } else if (f.name == "constant") {
    reject_unknown(j, "function", {"name", "value"});
    if (j.contains("value")) f.value = get_number(j["value"], "function.value");
  } else {
    throw ConfigError("function.name: unknown function \"" + f.name + "\"");
  }
  return f;
}

MarginalConfig parse_marginal(const json& j, const std::string& where) {
  require_object(j, where);
  MarginalConfig m;
  if (j.contains("kind")) m.kind = get<std::string>(j["kind"], where + ".kind");
  if (m.kind == "uniform") {
    reject_unknown(j, where, {"kind", "lo", "hi"});
    if (j.contains("lo")) m.lo = get_number(j["lo"], where + ".lo");
    if (j.contains("hi")) m.hi = get_number(j["hi"], where + ".hi");
  } else if (m.kind == "normal") {
    reject_unknown(j, where, {"kind"});
  } else {
    throw ConfigError(where + ".kind: expected \"uniform\" or \"normal\"");
  }
  return m;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc, "config",
                 {"function", "N", "marginals", "quad_order", "quad_panels", "S", "mc", "output", "figure1", "verify"});
  RunConfig cfg;
  if (doc.contains("function")) cfg.function = parse_function(doc["function"]);
  if (doc.contains("N")) cfg.N = static_cast<int>(get_integer(doc["N"], "N"));
  if (doc.contains("marginals")) {
    const auto& m = doc["marginals"];
    if (m.is_array()) {
      for (std::size_t i = 0; i < m.size(); ++i)
        cfg.marginals.push_back(parse_marginal(m[i], "marginals[" + std::to_string(i) + "]"));
      if (cfg.marginals.empty()) throw ConfigError("marginals: empty list");
    } else {
      cfg.marginals.push_back(parse_marginal(m, "marginals"));
    }
  }
  if (doc.contains("quad_order")) cfg.quad_order = static_cast<int>(get_integer(doc["quad_order"], "quad_order"));
  if (doc.contains("quad_panels")) cfg.quad_panels = static_cast<int>(get_integer(doc["quad_panels"], "quad_panels"));
  if (doc.contains("S")) {
    const auto& s = doc["S"];
    if (s.is_array()) {
      for (const auto& v : s) cfg.S.push_back(static_cast<int>(get_integer(v, "S")));
    } else {
      cfg.S.push_back(static_cast<int>(get_integer(s, "S")));
    }
  }
  if (doc.contains("mc")) {
    const auto& m = doc["mc"];
    require_object(m, "mc");
    reject_unknown(m, "mc", {"n", "seed", "streams", "threads"});
    if (m.contains("n")) {
      const auto n = get_integer(m["n"], "mc.n");
      if (n < 0) throw ConfigError("mc.n: must be nonnegative");
      cfg.mc.n = static_cast<std::size_t>(n);
    }
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned()) throw ConfigError("mc.seed: expected a nonnegative integer");
      cfg.mc.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("streams")) cfg.mc.streams = static_cast<int>(get_integer(m["streams"], "mc.streams"));
    if (m.contains("threads")) cfg.mc.threads = static_cast<int>(get_integer(m["threads"], "mc.threads"));
  }
  if (doc.contains("output")) cfg.output = get<std::string>(doc["output"], "output");
  if (doc.contains("figure1")) {
    const auto& f = doc["figure1"];
    require_object(f, "figure1");
    reject_unknown(f, "figure1", {"N", "p", "C", "n_min", "n_max"});
    if (f.contains("N")) cfg.figure1.N = static_cast<int>(get_integer(f["N"], "figure1.N"));
    if (f.contains("p")) cfg.figure1.p = get_numbers(f["p"], "figure1.p");
    if (f.contains("C")) cfg.figure1.C = get_number(f["C"], "figure1.C");
    if (f.contains("n_min")) cfg.figure1.n_min = static_cast<int>(get_integer(f["n_min"], "figure1.n_min"));
    if (f.contains("n_max")) cfg.figure1.n_max = static_cast<int>(get_integer(f["n_max"], "figure1.n_max"));
  }
  if (doc.contains("verify")) {
    const auto& v = doc["verify"];
    require_object(v, "verify");
    reject_unknown(v, "verify", {"max_dim"});
    if (v.contains("max_dim")) cfg.verify.max_dim = static_cast<int>(get_integer(v["max_dim"], "verify.max_dim"));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

void validate(const RunConfig& cfg) {
  if (cfg.N < 1 || cfg.N > kMaxSubsetDim)
    throw ConfigError("N must lie in [1, " + std::to_string(kMaxSubsetDim) + "]");
  if (cfg.function.name == "ishigami" && cfg.N != 3) throw ConfigError("ishigami needs N = 3");
  if ((cfg.function.name == "product_linear" || cfg.function.name == "sobol_g") && !cfg.function.a.empty() &&
      static_cast<int>(cfg.function.a.size()) != cfg.N)
    throw ConfigError("function.a must have N entries");
  if (cfg.function.name == "polynomial") {
    if (cfg.function.terms.empty()) throw ConfigError("polynomial needs at least one term");
    for (const auto& t : cfg.function.terms)
      if (static_cast<int>(t.powers.size()) != cfg.N) throw ConfigError("polynomial powers must have N entries");
  }
  if (cfg.marginals.size() > 1 && static_cast<int>(cfg.marginals.size()) != cfg.N)
    throw ConfigError("marginals must be a single entry or a list of N entries");
  for (const auto& m : cfg.marginals)
    if (m.kind == "uniform" && !(m.lo < m.hi)) throw ConfigError("uniform marginal needs lo < hi");
  if (cfg.quad_order && (*cfg.quad_order < 1 || *cfg.quad_order > 64)) throw ConfigError("quad_order must lie in [1, 64]");
  if (cfg.quad_panels && (*cfg.quad_panels < 1 || *cfg.quad_panels > 16))
    throw ConfigError("quad_panels must lie in [1, 16]");
  if (cfg.mc.streams < 1) throw ConfigError("mc.streams must be at least 1");
  if (cfg.mc.threads < 0) throw ConfigError("mc.threads must be nonnegative");
  if (cfg.output.empty()) throw ConfigError("output must not be empty");
  if (cfg.figure1.N < 3 || cfg.figure1.N > 10000) throw ConfigError("figure1.N must lie in [3, 10000]");
  if (cfg.figure1.p.empty()) throw ConfigError("figure1.p must not be empty");
  for (double p : cfg.figure1.p)
    if (!(p > 1.0)) throw ConfigError("figure1.p entries must exceed 1");
  if (!(cfg.figure1.C > 0.0)) throw ConfigError("figure1.C must be positive");
  if (cfg.figure1.n_min < 3 || cfg.figure1.n_max < cfg.figure1.n_min || cfg.figure1.n_max > 10000)
    throw ConfigError("figure1 needs 3 <= n_min <= n_max <= 10000");
  if (cfg.verify.max_dim < 2 || cfg.verify.max_dim > 6) throw ConfigError("verify.max_dim must lie in [2, 6]");
}

ProblemSpec make_problem(const RunConfig& cfg) {
  validate(cfg);
  const int N = cfg.N;
  const auto& f = cfg.function;

  std::vector<Marginal> marginals;
  for (int i = 0; i < N; ++i) {
    if (cfg.marginals.empty()) {
      if (f.name == "sobol_g") {
        marginals.push_back(Marginal::uniform(0, 1));
      } else if (f.name == "ishigami") {
        marginals.push_back(Marginal::uniform(-std::numbers::pi, std::numbers::pi));
      } else {
        marginals.push_back(Marginal::uniform(-1, 1));
      }
      continue;
    }
    const auto& m = cfg.marginals[cfg.marginals.size() == 1 ? 0 : i];
    marginals.push_back(m.kind == "normal" ? Marginal::standard_normal() : Marginal::uniform(m.lo, m.hi));
  }

  Function y;
  if (f.name == "product_linear") {
    y = product_linear(f.a.empty() ? std::vector<double>(N, 1.0) : f.a);
  } else if (f.name == "sobol_g") {
    std::vector<double> a = f.a;
    if (a.empty())
      for (int i = 0; i < N; ++i) a.push_back(i);
    try {
      y = sobol_g(a);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (f.name == "ishigami") {
    y = ishigami(f.ishigami_a, f.ishigami_b);
  } else if (f.name == "polynomial") {
    try {
      y = polynomial(f.terms, N);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (f.name == "constant") {
    y = constant(f.value);
  } else {
    throw ConfigError("unknown function \"" + f.name + "\"");
  }

  int order = 2;
  if (f.name == "ishigami") {
    order = 24;
  } else if (f.name == "product_linear") {
    order = 3;
  } else if (f.name == "polynomial") {
    for (const auto& t : f.terms)
      for (int k : t.powers) order = std::max(order, k + 1);
  }
  ProblemSpec p{ProductMeasure(std::move(marginals)), std::move(y), cfg.quad_order.value_or(std::min(order, 64))};
  const bool all_uniform = std::all_of(p.measure.marginals().begin(), p.measure.marginals().end(),
                                       [](const Marginal& m) { return m.kind() == Marginal::Kind::kUniform; });
  p.quad_panels = cfg.quad_panels.value_or(f.name == "sobol_g" && all_uniform ? 2 : 1);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

std::vector<int> truncation_orders(const RunConfig& cfg) {
  std::vector<int> out = cfg.S;
  if (out.empty())
    for (int S = 0; S < cfg.N; ++S) out.push_back(S);
  for (int S : out)
    if (S < 0 || S >= cfg.N) throw ConfigError("S must satisfy 0 ≤ S < N (got S=" + std::to_string(S) +
                                               ", N=" + std::to_string(cfg.N) + ")");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dimdecomp::cli
