// Copyright 2026 The PTCB Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ptcb/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include <fmt/format.h>

#include "ptcb/error.hpp"
#include "ptcb/io.hpp"

namespace ptcb {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw ConfigError(fmt::format("{}: {}", path, what));
}

// Strict view of one JSON object: every key read is remembered, and
// finish() rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail(path_, "expected an object");
  }

  const std::string& where() const { return path_; }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) Fail(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) Fail(path(key), "must be finite");
    return x;
  }

  double probability(const std::string& key, double fallback) {
    const double x = real(key, fallback);
    if (x < 0.0 || x > 1.0) Fail(path(key), fmt::format("{} is not in [0, 1]", x));
    return x;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    return CountValue(j_.at(key), path(key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) Fail(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<std::uint64_t> counts(const std::string& key,
                                    const std::vector<std::uint64_t>& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) Fail(path(key), "expected an array");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(CountValue(v[i], fmt::format("{}[{}]", path(key), i)));
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) Fail(path(key), "unknown key");
    }
  }

  static std::uint64_t CountValue(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) Fail(where, "must be non-negative");
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    Fail(where, "expected a non-negative integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
Enum Choice(Fields& f, const std::string& key, Enum fallback,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  if (!f.has(key)) return fallback;
  const std::string v = f.text(key, "");
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  Fail(f.path(key), fmt::format("'{}' is not one of {}", v, names));
}

template <typename Enum>
const char* NameOf(Enum value, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "";
}

const std::initializer_list<std::pair<const char*, Estimator>> kEstimators = {
    {"ratio", Estimator::Ratio}, {"fit", Estimator::Fit}};
const std::initializer_list<std::pair<const char*, Variant>> kVariants = {
    {"standard", Variant::Standard}, {"inverse", Variant::Inverse}};
const std::initializer_list<std::pair<const char*, ProductSource>> kProducts = {
    {"protocol", ProductSource::Protocol}, {"exact", ProductSource::Exact}};
const std::initializer_list<std::pair<const char*, InnerMode>> kInner = {
    {"sampled", InnerMode::Sampled},
    {"exhaustive", InnerMode::Exhaustive},
    {"exact", InnerMode::Exact}};

NoiseSpec ParseNoise(const json& j, const std::string& path, std::size_t n) {
  Fields f(j, path);
  NoiseSpec s;
  s.p = f.probability("p", 0.0);
  s.q = f.probability("q", 0.0);
  s.delta = f.real("delta", 0.0);
  s.control = f.count("control", 0);
  s.target = f.count("target", 1);
  f.finish();
  if (s.control >= n) Fail(path + ".control", fmt::format("must be < {}", n));
  if (s.target >= n) Fail(path + ".target", fmt::format("must be < {}", n));
  if (s.control == s.target) Fail(path + ".target", "must differ from control");
  return s;
}

SpamSpec ParseSpam(const json& j, const std::string& path) {
  Fields f(j, path);
  SpamSpec s;
  s.prep_flip = f.probability("prep", 0.0);
  s.meas_flip = f.probability("meas", 0.0);
  f.finish();
  return s;
}

TransferMatrix LoadPtm(const std::string& file, const std::filesystem::path& base_dir,
                       const std::string& path, std::size_t n) {
  std::filesystem::path p(file);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  try {
    TransferMatrix m = io::read_ptm(p);
    if (m.qubits() != n) Fail(path, fmt::format("PTM acts on {} qubits, not {}", m.qubits(), n));
    return m;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    Fail(path, e.what());
  }
}

ComplexMatrix ParseUnitary(const json& j, const std::string& path, std::size_t n) {
  Fields f(j, path);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (const char* part : {"real", "imag"}) {
    if (!f.has(part)) {
      if (std::string(part) == "real") Fail(f.path(part), "missing");
      continue;
    }
    const json& rows = f.raw(part);
    const std::string where = f.path(part);
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
      Fail(where, fmt::format("expected {} rows", d));
    }
    for (Eigen::Index r = 0; r < d; ++r) {
      const json& row = rows[r];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
        Fail(fmt::format("{}[{}]", where, r), fmt::format("expected {} numbers", d));
      }
      for (Eigen::Index c = 0; c < d; ++c) {
        if (!row[c].is_number()) Fail(fmt::format("{}[{}][{}]", where, r, c), "expected a number");
        const double x = row[c].get<double>();
        if (std::string(part) == "real") {
          u(r, c).real(x);
        } else {
          u(r, c).imag(x);
        }
      }
    }
  }
  f.finish();
  const double err = (u.adjoint() * u - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > 1e-10) Fail(path, fmt::format("not unitary (deviation {})", err));
  return u;
}

std::pair<PauliString, PauliString> ParsePair(const json& j, const std::string& path,
                                              std::size_t n) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    Fail(path, "expected [\"P\", \"Q\"]");
  }
  try {
    PauliString p = PauliString::from_letters(j[0].get<std::string>());
    PauliString q = PauliString::from_letters(j[1].get<std::string>());
    if (p.size() != n || q.size() != n) Fail(path, fmt::format("Paulis must have {} letters", n));
    if (p.is_identity() != q.is_identity()) {
      Fail(path, "a pair with exactly one identity carries no signal");
    }
    return {p, q};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    Fail(path, e.what());
  }
}

void ParseExperimentFields(Fields& f, ExperimentConfig& c, const std::filesystem::path& base_dir,
                           bool allow_noise) {
  c.qubits = f.count("qubits", c.qubits);
  if (c.qubits < 1 || c.qubits > kMaxQubits) {
    Fail(f.path("qubits"), fmt::format("must be in [1, {}]", kMaxQubits));
  }
  c.gate = f.text("gate", c.gate);
  if (c.gate != "toffoli" && c.gate != "ccz" && c.gate != "identity" && c.gate != "custom") {
    Fail(f.path("gate"), fmt::format("'{}' is not one of toffoli, ccz, identity, custom", c.gate));
  }
  if ((c.gate == "toffoli" || c.gate == "ccz") && c.qubits != 3) {
    Fail(f.path("qubits"), fmt::format("gate {} acts on 3 qubits", c.gate));
  }
  if (c.gate == "custom") {
    if (!f.has("unitary")) Fail(f.path("unitary"), "required for gate custom");
    c.unitary = ParseUnitary(f.raw("unitary"), f.path("unitary"), c.qubits);
  } else if (f.has("unitary")) {
    Fail(f.path("unitary"), "only allowed with gate custom");
  }

  for (const char* key : {"noise", "noise_ptm", "pauli_noise", "pauli_noise_ptm"}) {
    if (!allow_noise && std::string(key).starts_with("noise") && f.has(key)) {
      Fail(f.path(key), "sweep noise comes from the ensemble");
    }
  }
  if (f.has("noise") && f.has("noise_ptm")) Fail(f.path("noise_ptm"), "conflicts with noise");
  if (f.has("noise")) c.noise = ParseNoise(f.raw("noise"), f.path("noise"), c.qubits);
  if (f.has("noise_ptm")) {
    c.noise_ptm_file = f.text("noise_ptm", "");
    c.noise_ptm = LoadPtm(c.noise_ptm_file, base_dir, f.path("noise_ptm"), c.qubits);
  }
  if (f.has("pauli_noise") && f.has("pauli_noise_ptm")) {
    Fail(f.path("pauli_noise_ptm"), "conflicts with pauli_noise");
  }
  if (f.has("pauli_noise")) {
    c.pauli_noise = ParseNoise(f.raw("pauli_noise"), f.path("pauli_noise"), c.qubits);
  }
  if (f.has("pauli_noise_ptm")) {
    c.pauli_noise_ptm_file = f.text("pauli_noise_ptm", "");
    c.pauli_noise_ptm =
        LoadPtm(c.pauli_noise_ptm_file, base_dir, f.path("pauli_noise_ptm"), c.qubits);
  }
  if (f.has("spam")) c.spam = ParseSpam(f.raw("spam"), f.path("spam"));

  const auto depths = f.counts("depths", {c.depths.begin(), c.depths.end()});
  if (depths.empty()) Fail(f.path("depths"), "must be non-empty");
  c.depths.assign(depths.begin(), depths.end());
  c.outer_samples = f.count("M", c.outer_samples);
  c.inner_samples = f.count("M_prime", c.inner_samples);
  if (c.inner_samples < 1) Fail(f.path("M_prime"), "must be at least 1");
  c.shots = f.count("shots", c.shots);
  c.seed = f.count("seed", c.seed);
  c.estimator = Choice(f, "estimator", c.estimator, kEstimators);
  c.variant = Choice(f, "variant", c.variant, kVariants);
  c.products = Choice(f, "products", c.products, kProducts);
  c.inner = Choice(f, "inner", c.inner, kInner);
  if (f.has("pairs")) {
    const json& pairs = f.raw("pairs");
    if (!pairs.is_array()) Fail(f.path("pairs"), "expected an array");
    c.pairs.clear();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      c.pairs.push_back(ParsePair(pairs[i], fmt::format("{}[{}]", f.path("pairs"), i), c.qubits));
    }
  }

  if (c.outer_samples > 0) {
    try {
      const std::size_t segments =
          build_segments(ptm_unitary(resolve_gate_unitary(c), c.qubits)).size();
      if (c.outer_samples > segments) {
        Fail(f.path("M"), fmt::format("{} exceeds the {} importance segments", c.outer_samples,
                                      segments));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      Fail(f.path("gate"), e.what());
    }
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    Fail(f.where(), e.what());
  }
}

CrbRunConfig ParseCrb(const json& j, const std::string& path, const ExperimentConfig& e) {
  Fields f(j, path);
  CrbRunConfig c;
  const auto depths = f.counts("depths", {c.settings.depths.begin(), c.settings.depths.end()});
  c.settings.depths.assign(depths.begin(), depths.end());
  c.settings.inner_samples = f.count("M_prime", c.settings.inner_samples);
  c.settings.inner = Choice(f, "inner", c.settings.inner, kInner);
  c.q_samples = f.count("q_samples", 0);
  if (f.has("qs")) {
    const json& qs = f.raw("qs");
    if (!qs.is_array()) Fail(f.path("qs"), "expected an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string where = fmt::format("{}[{}]", f.path("qs"), i);
      if (!qs[i].is_string()) Fail(where, "expected a Pauli string");
      try {
        c.qs.push_back(PauliString::from_letters(qs[i].get<std::string>()));
      } catch (const Error& err) {
        Fail(where, err.what());
      }
      if (c.qs.back().size() != e.qubits) Fail(where, fmt::format("needs {} letters", e.qubits));
    }
  }
  f.finish();
  c.settings.seed = e.seed;
  c.settings.shots = e.shots;
  c.settings.spam = e.spam;
  try {
    c.settings.validate();
  } catch (const ValidationError& err) {
    Fail(path, err.what());
  }
  return c;
}

json UnitaryJson(const ComplexMatrix& u) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      rr.push_back(u(r, c).real());
      ii.push_back(u(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return json{{"real", re}, {"imag", im}};
}

json ExperimentJson(const ExperimentConfig& c, bool with_noise) {
  json j;
  j["qubits"] = c.qubits;
  j["gate"] = c.gate;
  if (c.gate == "custom") j["unitary"] = UnitaryJson(c.unitary);
  if (with_noise) {
    if (c.noise) j["noise"] = to_json(*c.noise);
    if (c.noise_ptm) j["noise_ptm"] = c.noise_ptm_file;
  }
  if (c.pauli_noise) j["pauli_noise"] = to_json(*c.pauli_noise);
  if (c.pauli_noise_ptm) j["pauli_noise_ptm"] = c.pauli_noise_ptm_file;
  j["spam"] = to_json(c.spam);
  j["depths"] = c.depths;
  j["M"] = c.outer_samples;
  j["M_prime"] = c.inner_samples;
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["estimator"] = NameOf(c.estimator, kEstimators);
  j["variant"] = NameOf(c.variant, kVariants);
  j["products"] = NameOf(c.products, kProducts);
  j["inner"] = NameOf(c.inner, kInner);
  if (!c.pairs.empty()) {
    json pairs = json::array();
    for (const auto& [p, q] : c.pairs) pairs.push_back(json::array({p.letters(), q.letters()}));
    j["pairs"] = pairs;
  }
  return j;
}

}  // namespace

json to_json(const NoiseSpec& s) {
  return json{{"p", s.p}, {"q", s.q}, {"delta", s.delta}, {"control", s.control},
              {"target", s.target}};
}

json to_json(const SpamSpec& s) { return json{{"prep", s.prep_flip}, {"meas", s.meas_flip}}; }

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  Fields f(j, "$");
  RunConfig c;
  ParseExperimentFields(f, c.experiment, base_dir, true);
  if (f.has("crb")) {
    c.crb = ParseCrb(f.raw("crb"), f.path("crb"), c.experiment);
  } else {
    c.crb = ParseCrb(json::object(), f.path("crb"), c.experiment);
  }
  f.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j = ExperimentJson(c.experiment, true);
  json crb;
  crb["depths"] = c.crb.settings.depths;
  crb["M_prime"] = c.crb.settings.inner_samples;
  crb["inner"] = NameOf(c.crb.settings.inner, kInner);
  crb["q_samples"] = c.crb.q_samples;
  if (!c.crb.qs.empty()) {
    json qs = json::array();
    for (const auto& q : c.crb.qs) qs.push_back(q.letters());
    crb["qs"] = qs;
  }
  j["crb"] = crb;
  return j;
}

SweepPlan parse_sweep_plan(const json& j, const std::filesystem::path& base_dir) {
  Fields f(j, "$");
  SweepPlan plan;
  const std::string kind = f.text("kind", "");
  try {
    plan.kind = parse_sweep_kind(kind);
  } catch (const ValidationError& e) {
    Fail(f.path("kind"), e.what());
  }
  if (f.has("base")) {
    Fields b(f.raw("base"), f.path("base"));
    ParseExperimentFields(b, plan.base, base_dir, false);
    b.finish();
  }
  if (f.has("grid")) {
    Fields g(f.raw("grid"), f.path("grid"));
    for (auto v : g.counts("M", {})) plan.grid.outer_samples.push_back(v);
    for (auto v : g.counts("M_prime", {})) plan.grid.inner_samples.push_back(v);
    plan.grid.shots = g.counts("shots", {});
    if (g.has("spam")) {
      const json& s = g.raw("spam");
      if (!s.is_array()) Fail(g.path("spam"), "expected an array");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string where = fmt::format("{}[{}]", g.path("spam"), i);
        if (!s[i].is_number()) Fail(where, "expected a number");
        const double x = s[i].get<double>();
        if (!(x >= 0.0 && x <= 1.0)) Fail(where, fmt::format("{} is not in [0, 1]", x));
        plan.grid.spam.push_back(x);
      }
    }
    g.finish();
    const std::size_t segments =
        build_segments(ptm_unitary(resolve_gate_unitary(plan.base), plan.base.qubits)).size();
    for (std::size_t i = 0; i < plan.grid.outer_samples.size(); ++i) {
      if (plan.grid.outer_samples[i] > segments) {
        Fail(fmt::format("$.grid.M[{}]", i),
             fmt::format("{} exceeds the {} importance segments", plan.grid.outer_samples[i],
                         segments));
      }
    }
    for (std::size_t i = 0; i < plan.grid.inner_samples.size(); ++i) {
      if (plan.grid.inner_samples[i] < 1) Fail(fmt::format("$.grid.M_prime[{}]", i), "must be at least 1");
    }
  }
  if (f.has("ensemble")) {
    Fields e(f.raw("ensemble"), f.path("ensemble"));
    plan.ensemble_size = e.count("size", plan.ensemble_size);
    plan.infidelity_low = e.probability("low", plan.infidelity_low);
    plan.infidelity_high = e.probability("high", plan.infidelity_high);
    plan.ranges.p_max = e.probability("p_max", plan.ranges.p_max);
    plan.ranges.q_max = e.probability("q_max", plan.ranges.q_max);
    plan.ranges.delta_max = e.real("delta_max", plan.ranges.delta_max);
    e.finish();
  }
  plan.seed = f.count("seed", plan.seed);
  plan.repeats = f.count("repeats", plan.repeats);
  plan.bins = f.count("bins", plan.bins);
  f.finish();
  try {
    plan.validate();
  } catch (const ValidationError& e) {
    Fail("$", e.what());
  }
  return plan;
}

SweepPlan load_sweep_plan(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_sweep_plan(j, path.parent_path());
}

json to_json(const SweepPlan& plan) {
  json j;
  j["kind"] = std::string(to_string(plan.kind));
  j["base"] = ExperimentJson(plan.base, false);
  json grid;
  grid["M"] = plan.grid.outer_samples;
  grid["M_prime"] = plan.grid.inner_samples;
  grid["shots"] = plan.grid.shots;
  grid["spam"] = plan.grid.spam;
  j["grid"] = grid;
  j["ensemble"] = json{{"size", plan.ensemble_size},
                       {"low", plan.infidelity_low},
                       {"high", plan.infidelity_high},
                       {"p_max", plan.ranges.p_max},
                       {"q_max", plan.ranges.q_max},
                       {"delta_max", plan.ranges.delta_max}};
  j["seed"] = plan.seed;
  j["repeats"] = plan.repeats;
  j["bins"] = plan.bins;
  return j;
}

}  // namespace ptcb
