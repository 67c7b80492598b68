// Copyright 2026 The privconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "privconsensus/harness.h"
#include "privconsensus/status_macros.h"
#include "yaml-cpp/yaml.h"

namespace privconsensus {
namespace {

using json = nlohmann::json;

struct ProtocolEntry {
  Protocol protocol;
  const char* name;
};

constexpr ProtocolEntry kProtocols[] = {
    {Protocol::kPlain, "plain"},         {Protocol::kDecomposed, "decomposed"},
    {Protocol::kSecureEdge, "secure-edge"}, {Protocol::kDpStatic, "dp-static"},
    {Protocol::kAlg1, "alg1"},           {Protocol::kAlg2, "alg2"},
    {Protocol::kAlg3, "alg3"},           {Protocol::kDgd, "dgd"},
    {Protocol::kPdop, "pdop"},
};

absl::Status FieldError(absl::string_view path, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

std::string Sub(absl::string_view path, absl::string_view key) {
  return path.empty() ? std::string(key) : absl::StrCat(path, ".", key);
}

std::string Index(absl::string_view path, size_t i) {
  return absl::StrCat(path, "[", i, "]");
}

json YamlToJson(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const YAML::Node& item : node) out.push_back(YamlToJson(item));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) {
        out[kv.first.as<std::string>()] = YamlToJson(kv.second);
      }
      return out;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      if (s == "null" || s == "~") return nullptr;
      int64_t i = 0;
      if (absl::SimpleAtoi(s, &i)) return i;
      double d = 0.0;
      if (absl::SimpleAtod(s, &d)) return d;
      return s;
    }
    default:
      return nullptr;
  }
}

// Numbers become doubles so that "1" and "1.0" hash alike.
json Canonicalize(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array()) {
    json out = json::array();
    for (const json& item : j) out.push_back(Canonicalize(item));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      out[it.key()] = Canonicalize(it.value());
    }
    return out;
  }
  return j;
}

absl::Status CheckKeys(const json& obj, absl::string_view path,
                       const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      return FieldError(Sub(path, it.key()), "unknown field");
    }
  }
  return absl::OkStatus();
}

absl::Status RequireObject(const json& j, absl::string_view path) {
  if (!j.is_object()) return FieldError(path, "expected a mapping");
  return absl::OkStatus();
}

absl::StatusOr<double> Number(const json& j, absl::string_view path) {
  if (!j.is_number()) return FieldError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) return FieldError(path, "must be finite");
  return v;
}

absl::StatusOr<int64_t> Integer(const json& j, absl::string_view path) {
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::trunc(v) && std::fabs(v) < 0x1p53) {
      return static_cast<int64_t>(v);
    }
  }
  return FieldError(path, "expected an integer");
}

absl::StatusOr<bool> Bool(const json& j, absl::string_view path) {
  if (!j.is_boolean()) return FieldError(path, "expected true or false");
  return j.get<bool>();
}

absl::StatusOr<std::string> String(const json& j, absl::string_view path) {
  if (!j.is_string()) return FieldError(path, "expected a string");
  return j.get<std::string>();
}

absl::StatusOr<std::vector<double>> NumberList(const json& j,
                                               absl::string_view path) {
  if (!j.is_array()) return FieldError(path, "expected a list of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    ASSIGN_OR_RETURN(double v, Number(j[i], Index(path, i)));
    out.push_back(v);
  }
  return out;
}

// A list of numbers (one scalar per agent) or a list of equal-length lists.
absl::StatusOr<std::vector<std::vector<double>>> Matrix(
    const json& j, absl::string_view path) {
  if (!j.is_array() || j.empty()) {
    return FieldError(path, "expected a nonempty list");
  }
  std::vector<std::vector<double>> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_array()) {
      ASSIGN_OR_RETURN(std::vector<double> row, NumberList(j[i], Index(path, i)));
      out.push_back(std::move(row));
    } else {
      ASSIGN_OR_RETURN(double v, Number(j[i], Index(path, i)));
      out.push_back({v});
    }
    if (out.back().empty() || out.back().size() != out.front().size()) {
      return FieldError(Index(path, i), "rows must share one nonzero length");
    }
  }
  return out;
}

absl::StatusOr<std::vector<std::vector<double>>> AgentMatrix(
    const json& j, absl::string_view path, int agents) {
  ASSIGN_OR_RETURN(auto m, Matrix(j, path));
  if (static_cast<int>(m.size()) != agents) {
    return FieldError(path, absl::StrCat("expected ", agents,
                                         " agents, got ", m.size()));
  }
  return m;
}

// --- graph -----------------------------------------------------------------

absl::StatusOr<GraphSpec> ParseGraph(const json& j) {
  const std::string path = "graph";
  RETURN_IF_ERROR(RequireObject(j, path));
  RETURN_IF_ERROR(
      CheckKeys(j, path, {"preset", "nodes", "edges", "directed", "weight"}));
  GraphSpec spec;
  if (j.contains("weight")) {
    ASSIGN_OR_RETURN(spec.weight, Number(j["weight"], Sub(path, "weight")));
    if (spec.weight <= 0) return FieldError(Sub(path, "weight"), "must be > 0");
  }
  if (j.contains("nodes")) {
    ASSIGN_OR_RETURN(int64_t n, Integer(j["nodes"], Sub(path, "nodes")));
    if (n < 1 || n > 100000) {
      return FieldError(Sub(path, "nodes"), "must be in 1..100000");
    }
    spec.nodes = static_cast<int>(n);
  }
  if (j.contains("preset")) {
    ASSIGN_OR_RETURN(spec.preset, String(j["preset"], Sub(path, "preset")));
    if (j.contains("edges") || j.contains("directed")) {
      return FieldError(path, "give either a preset or an edge list");
    }
    const std::vector<std::string> names = GraphPresetNames();
    if (std::find(names.begin(), names.end(), spec.preset) == names.end()) {
      return FieldError(Sub(path, "preset"),
                        absl::StrCat("unknown preset '", spec.preset,
                                     "' (known: ", absl::StrJoin(names, ", "),
                                     ")"));
    }
    if (spec.preset == "fig4-five-agent") {
      if (spec.nodes != 0 && spec.nodes != 5) {
        return FieldError(Sub(path, "nodes"), "fig4-five-agent has 5 nodes");
      }
      spec.nodes = 5;
    } else if (spec.nodes < 2) {
      return FieldError(Sub(path, "nodes"),
                        absl::StrCat("preset ", spec.preset,
                                     " needs nodes >= 2"));
    }
    return spec;
  }
  if (spec.nodes == 0) return FieldError(Sub(path, "nodes"), "required");
  if (!j.contains("edges")) return FieldError(Sub(path, "edges"), "required");
  if (j.contains("directed")) {
    ASSIGN_OR_RETURN(spec.directed, Bool(j["directed"], Sub(path, "directed")));
  }
  const json& edges = j["edges"];
  if (!edges.is_array()) {
    return FieldError(Sub(path, "edges"), "expected a list of [from, to]");
  }
  for (size_t e = 0; e < edges.size(); ++e) {
    const std::string at = Index(Sub(path, "edges"), e);
    if (!edges[e].is_array() || edges[e].size() != 2) {
      return FieldError(at, "expected [from, to]");
    }
    ASSIGN_OR_RETURN(int64_t a, Integer(edges[e][0], at));
    ASSIGN_OR_RETURN(int64_t b, Integer(edges[e][1], at));
    if (a < 0 || b < 0 || a >= spec.nodes || b >= spec.nodes) {
      return FieldError(at, absl::StrFormat(
                                "edge (%d, %d) references a node outside "
                                "0..%d",
                                a, b, spec.nodes - 1));
    }
    if (a == b) {
      return FieldError(at, absl::StrFormat("edge (%d, %d) is a self-loop", a,
                                            b));
    }
    spec.edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return spec;
}

// --- schedules -------------------------------------------------------------

absl::StatusOr<Schedule> ParseSchedule(const json& j, absl::string_view path) {
  if (j.is_number()) {
    ASSIGN_OR_RETURN(double c, Number(j, path));
    Schedule s = Schedule::Constant(c);
    RETURN_IF_ERROR(s.Validate());
    return s;
  }
  RETURN_IF_ERROR(RequireObject(j, path));
  if (!j.contains("kind")) return FieldError(Sub(path, "kind"), "required");
  ASSIGN_OR_RETURN(std::string kind, String(j["kind"], Sub(path, "kind")));
  auto get = [&](const char* key,
                 std::optional<double> fallback) -> absl::StatusOr<double> {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      return FieldError(Sub(path, key), "required");
    }
    return Number(j[key], Sub(path, key));
  };
  Schedule s;
  if (kind == "constant") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "c"}));
    ASSIGN_OR_RETURN(double c, get("c", std::nullopt));
    s = Schedule::Constant(c);
  } else if (kind == "harmonic") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "c", "power", "rate"}));
    ASSIGN_OR_RETURN(double c, get("c", 1.0));
    ASSIGN_OR_RETURN(double power, get("power", 1.0));
    ASSIGN_OR_RETURN(double rate, get("rate", 0.01));
    s = Schedule::HarmonicPower(c, power, rate);
  } else if (kind == "geometric") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "ratio", "c"}));
    ASSIGN_OR_RETURN(double ratio, get("ratio", std::nullopt));
    ASSIGN_OR_RETURN(double c, get("c", 1.0));
    s = Schedule::Geometric(ratio, c);
  } else if (kind == "power-growth") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "base", "coeff", "power"}));
    ASSIGN_OR_RETURN(double base, get("base", 1.0));
    ASSIGN_OR_RETURN(double coeff, get("coeff", std::nullopt));
    ASSIGN_OR_RETURN(double power, get("power", std::nullopt));
    s = Schedule::PowerGrowth(base, coeff, power);
  } else if (kind == "table") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "values"}));
    if (!j.contains("values")) {
      return FieldError(Sub(path, "values"), "required");
    }
    ASSIGN_OR_RETURN(std::vector<double> values,
                     NumberList(j["values"], Sub(path, "values")));
    if (values.empty()) return FieldError(Sub(path, "values"), "empty table");
    s = Schedule::Table(std::move(values));
  } else {
    return FieldError(Sub(path, "kind"),
                      absl::StrCat("unknown schedule kind '", kind,
                                   "' (constant, harmonic, geometric, "
                                   "power-growth, table)"));
  }
  if (absl::Status st = s.Validate(); !st.ok()) {
    return FieldError(path, st.message());
  }
  return s;
}

SchedulePreset DynamicDefaults() {
  SchedulePreset p;
  p.weakening = Schedule::HarmonicPower(1.0, 0.9);
  p.stepsize = Schedule::HarmonicPower(1.0, 1.0);
  p.noise = Schedule::PowerGrowth(1.0, 0.01, 0.3);
  return p;
}

absl::Status ParseSchedules(const json& root, double dgd_noise,
                            bool dgd_noise_given, ExperimentConfig& c) {
  const std::string path = "schedules";
  const Protocol p = c.protocol;
  std::string preset;
  if (p == Protocol::kAlg3) preset = "paper-alg3";
  if (p == Protocol::kDgd) preset = "dgd-plain";
  if (p == Protocol::kPdop) preset = "paper-pdop";

  std::set<std::string> allowed;
  if (IsOptimization(p)) {
    allowed = {"preset", "stepsize", "weakening", "noise"};
  } else if (p == Protocol::kAlg1) {
    allowed = {"weakening", "forgetting", "noise"};
  } else if (p == Protocol::kAlg2) {
    allowed = {"weakening", "input_gain", "noise"};
  } else if (p == Protocol::kDpStatic) {
    allowed = {"noise"};
  }

  json j = json::object();
  if (root.contains("schedules")) {
    if (allowed.empty()) {
      return FieldError(path, absl::StrCat("not used by protocol ",
                                           ProtocolName(p)));
    }
    j = root["schedules"];
    if (j.is_string()) j = json{{"preset", j}};
    RETURN_IF_ERROR(RequireObject(j, path));
    RETURN_IF_ERROR(CheckKeys(j, path, allowed));
    if (j.contains("preset")) {
      ASSIGN_OR_RETURN(preset, String(j["preset"], Sub(path, "preset")));
    }
  }
  if (dgd_noise_given && preset != "dgd-plain") {
    return FieldError("noise.scale", "only used by the dgd-plain preset");
  }

  if (IsOptimization(p)) {
    auto ps = Preset(preset, dgd_noise);
    if (!ps.ok()) return FieldError(Sub(path, "preset"), ps.status().message());
    c.schedules = *ps;
  } else {
    c.schedules = DynamicDefaults();
    c.forgetting = Schedule::HarmonicPower(1.0, 1.0);
    c.input_gain = Schedule::HarmonicPower(1.0, 1.0);
    if (p == Protocol::kDpStatic) c.schedules.noise = Schedule::Geometric(0.98);
  }
  struct Slot {
    const char* key;
    Schedule* target;
  };
  const Slot slots[] = {{"stepsize", &c.schedules.stepsize},
                        {"weakening", &c.schedules.weakening},
                        {"noise", &c.schedules.noise},
                        {"forgetting", &c.forgetting},
                        {"input_gain", &c.input_gain}};
  for (const Slot& slot : slots) {
    if (j.contains(slot.key)) {
      ASSIGN_OR_RETURN(*slot.target,
                       ParseSchedule(j[slot.key], Sub(path, slot.key)));
    }
  }
  return absl::OkStatus();
}

// --- problem sections ----------------------------------------------------

absl::Status ParseObjective(const json& j, int agents, ExperimentConfig& c) {
  const std::string path = "objective";
  RETURN_IF_ERROR(RequireObject(j, path));
  if (!j.contains("kind")) return FieldError(Sub(path, "kind"), "required");
  ASSIGN_OR_RETURN(c.objective.kind, String(j["kind"], Sub(path, "kind")));
  if (c.objective.kind == "quadratic-anchor") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "anchors", "weight"}));
    if (!j.contains("anchors")) {
      return FieldError(Sub(path, "anchors"), "required");
    }
    ASSIGN_OR_RETURN(c.objective.anchors,
                     AgentMatrix(j["anchors"], Sub(path, "anchors"), agents));
    if (j.contains("weight")) {
      ASSIGN_OR_RETURN(c.objective.anchor_weight,
                       Number(j["weight"], Sub(path, "weight")));
      if (c.objective.anchor_weight <= 0) {
        return FieldError(Sub(path, "weight"), "must be > 0");
      }
    }
    return absl::OkStatus();
  }
  if (c.objective.kind == "logistic-surrogate") {
    RETURN_IF_ERROR(CheckKeys(j, path,
                              {"kind", "dim", "rows_per_agent", "l2",
                               "true_weights", "feature_shift", "data_seed"}));
    LogisticSurrogateConfig& lc = c.objective.logistic;
    lc.agents = agents;
    if (j.contains("dim")) {
      ASSIGN_OR_RETURN(int64_t d, Integer(j["dim"], Sub(path, "dim")));
      if (d < 1 || d > 1000) return FieldError(Sub(path, "dim"), "must be in 1..1000");
      lc.dim = static_cast<int>(d);
    }
    if (j.contains("rows_per_agent")) {
      ASSIGN_OR_RETURN(int64_t r, Integer(j["rows_per_agent"],
                                          Sub(path, "rows_per_agent")));
      if (r < 1) return FieldError(Sub(path, "rows_per_agent"), "must be >= 1");
      lc.rows_per_agent = static_cast<int>(r);
    }
    if (j.contains("l2")) {
      ASSIGN_OR_RETURN(lc.l2, Number(j["l2"], Sub(path, "l2")));
      if (lc.l2 <= 0) return FieldError(Sub(path, "l2"), "must be > 0");
    }
    if (j.contains("true_weights")) {
      ASSIGN_OR_RETURN(lc.true_weights, NumberList(j["true_weights"],
                                                   Sub(path, "true_weights")));
    }
    if (static_cast<int>(lc.true_weights.size()) != lc.dim) {
      return FieldError(Sub(path, "true_weights"),
                        absl::StrCat("expected ", lc.dim, " values"));
    }
    if (j.contains("feature_shift")) {
      ASSIGN_OR_RETURN(lc.feature_shift, Number(j["feature_shift"],
                                                Sub(path, "feature_shift")));
    }
    if (j.contains("data_seed")) {
      ASSIGN_OR_RETURN(int64_t s, Integer(j["data_seed"], Sub(path, "data_seed")));
      if (s < 0) return FieldError(Sub(path, "data_seed"), "must be >= 0");
      c.objective.data_seed = static_cast<uint64_t>(s);
    }
    return absl::OkStatus();
  }
  return FieldError(Sub(path, "kind"),
                    absl::StrCat("unknown objective '", c.objective.kind,
                                 "' (quadratic-anchor, logistic-surrogate)"));
}

absl::StatusOr<ReferenceSignal> ParseReference(const json& j, int agents) {
  const std::string path = "reference";
  RETURN_IF_ERROR(RequireObject(j, path));
  if (!j.contains("kind")) return FieldError(Sub(path, "kind"), "required");
  ASSIGN_OR_RETURN(std::string kind, String(j["kind"], Sub(path, "kind")));
  auto matrix = [&](const char* key) {
    return j.contains(key)
               ? AgentMatrix(j[key], Sub(path, key), agents)
               : absl::StatusOr<std::vector<std::vector<double>>>(
                     FieldError(Sub(path, key), "required"));
  };
  ReferenceSignal r;
  if (kind == "constant") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "offset"}));
    ASSIGN_OR_RETURN(auto offset, matrix("offset"));
    r = ReferenceSignal::Constant(std::move(offset));
  } else if (kind == "ramp") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "offset", "slope"}));
    ASSIGN_OR_RETURN(auto offset, matrix("offset"));
    ASSIGN_OR_RETURN(auto slope, matrix("slope"));
    r = ReferenceSignal::Ramp(std::move(offset), std::move(slope));
  } else if (kind == "sinusoid") {
    RETURN_IF_ERROR(CheckKeys(
        j, path, {"kind", "offset", "amplitude", "frequency", "phase"}));
    ASSIGN_OR_RETURN(auto offset, matrix("offset"));
    ASSIGN_OR_RETURN(auto amplitude, matrix("amplitude"));
    ASSIGN_OR_RETURN(auto phase, matrix("phase"));
    if (!j.contains("frequency")) {
      return FieldError(Sub(path, "frequency"), "required");
    }
    ASSIGN_OR_RETURN(double f, Number(j["frequency"], Sub(path, "frequency")));
    r = ReferenceSignal::Sinusoid(std::move(offset), std::move(amplitude), f,
                                  std::move(phase));
  } else {
    return FieldError(Sub(path, "kind"),
                      absl::StrCat("unknown reference '", kind,
                                   "' (constant, ramp, sinusoid)"));
  }
  if (absl::Status st = r.Validate(); !st.ok()) {
    return FieldError(path, st.message());
  }
  return r;
}

absl::StatusOr<ConvexSet> ParseSet(const json& j, int dim) {
  const std::string path = "set";
  RETURN_IF_ERROR(RequireObject(j, path));
  if (!j.contains("kind")) return FieldError(Sub(path, "kind"), "required");
  ASSIGN_OR_RETURN(std::string kind, String(j["kind"], Sub(path, "kind")));
  auto need = [&](const char* key) -> absl::StatusOr<double> {
    if (!j.contains(key)) return FieldError(Sub(path, key), "required");
    return Number(j[key], Sub(path, key));
  };
  absl::StatusOr<ConvexSet> set = absl::InvalidArgumentError("");
  if (kind == "box") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "lo", "hi"}));
    ASSIGN_OR_RETURN(double lo, need("lo"));
    ASSIGN_OR_RETURN(double hi, need("hi"));
    set = ConvexSet::Box(dim, lo, hi);
  } else if (kind == "ball") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "center", "radius"}));
    if (!j.contains("center")) return FieldError(Sub(path, "center"), "required");
    ASSIGN_OR_RETURN(std::vector<double> center,
                     NumberList(j["center"], Sub(path, "center")));
    ASSIGN_OR_RETURN(double radius, need("radius"));
    set = ConvexSet::Ball(std::move(center), radius);
  } else if (kind == "halfspace") {
    RETURN_IF_ERROR(CheckKeys(j, path, {"kind", "normal", "offset"}));
    if (!j.contains("normal")) return FieldError(Sub(path, "normal"), "required");
    ASSIGN_OR_RETURN(std::vector<double> normal,
                     NumberList(j["normal"], Sub(path, "normal")));
    ASSIGN_OR_RETURN(double offset, need("offset"));
    set = ConvexSet::Halfspace(std::move(normal), offset);
  } else {
    return FieldError(Sub(path, "kind"),
                      absl::StrCat("unknown set '", kind,
                                   "' (box, ball, halfspace)"));
  }
  if (!set.ok()) return FieldError(path, set.status().message());
  if (set->dim() != dim) {
    return FieldError(path, absl::StrCat("dimension ", set->dim(),
                                         " does not match the reference (",
                                         dim, ")"));
  }
  return set;
}

absl::Status ParseDecomposition(const json& j, DecompositionConfig& d) {
  const std::string path = "decomposition";
  RETURN_IF_ERROR(RequireObject(j, path));
  RETURN_IF_ERROR(CheckKeys(j, path,
                            {"internal_lo", "internal_hi", "randomize_steps",
                             "split_radius", "pinned_internal_weight"}));
  if (j.contains("internal_lo")) {
    ASSIGN_OR_RETURN(d.internal_lo,
                     Number(j["internal_lo"], Sub(path, "internal_lo")));
  }
  if (j.contains("internal_hi")) {
    ASSIGN_OR_RETURN(d.internal_hi,
                     Number(j["internal_hi"], Sub(path, "internal_hi")));
  }
  if (!(d.eta <= d.internal_lo && d.internal_lo <= d.internal_hi &&
        d.internal_hi < 1)) {
    return FieldError(path, "need eta <= internal_lo <= internal_hi < 1");
  }
  if (j.contains("randomize_steps")) {
    ASSIGN_OR_RETURN(d.randomize_steps, Integer(j["randomize_steps"],
                                                Sub(path, "randomize_steps")));
  }
  if (j.contains("split_radius")) {
    ASSIGN_OR_RETURN(d.split_radius,
                     Number(j["split_radius"], Sub(path, "split_radius")));
    if (d.split_radius < 0) {
      return FieldError(Sub(path, "split_radius"), "must be >= 0");
    }
  }
  if (j.contains("pinned_internal_weight")) {
    ASSIGN_OR_RETURN(double w, Number(j["pinned_internal_weight"],
                                      Sub(path, "pinned_internal_weight")));
    d.pinned_internal_weight = w;
  }
  return absl::OkStatus();
}

absl::Status ParseSecureEdge(const json& j, SecureEdgeConfig& s) {
  const std::string path = "secure_edge";
  RETURN_IF_ERROR(RequireObject(j, path));
  RETURN_IF_ERROR(CheckKeys(j, path, {"key_bits", "frac_bits", "factor_lo",
                                      "factor_hi", "pinned_factor"}));
  if (j.contains("key_bits")) {
    ASSIGN_OR_RETURN(int64_t bits, Integer(j["key_bits"], Sub(path, "key_bits")));
    if (bits < 512 || bits > 8192 || bits % 2 != 0) {
      return FieldError(Sub(path, "key_bits"), "must be even, 512..8192");
    }
    s.key_bits = static_cast<int>(bits);
  }
  if (j.contains("frac_bits")) {
    ASSIGN_OR_RETURN(int64_t bits,
                     Integer(j["frac_bits"], Sub(path, "frac_bits")));
    if (bits < 1 || bits > 128) {
      return FieldError(Sub(path, "frac_bits"), "must be in 1..128");
    }
    s.frac_bits = static_cast<int>(bits);
  }
  if (j.contains("factor_lo")) {
    ASSIGN_OR_RETURN(s.factor_lo, Number(j["factor_lo"], Sub(path, "factor_lo")));
  }
  if (j.contains("factor_hi")) {
    ASSIGN_OR_RETURN(s.factor_hi, Number(j["factor_hi"], Sub(path, "factor_hi")));
  }
  if (!(0 < s.factor_lo && s.factor_lo <= s.factor_hi)) {
    return FieldError(path, "need 0 < factor_lo <= factor_hi");
  }
  if (j.contains("pinned_factor")) {
    ASSIGN_OR_RETURN(double f,
                     Number(j["pinned_factor"], Sub(path, "pinned_factor")));
    s.pinned_factor = f;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<AdversarySpec>> ParseAdversaries(
    const json& j, const WeightedGraph& g) {
  const std::string path = "adversaries";
  if (!j.is_array()) return FieldError(path, "expected a list");
  std::set<std::pair<int, int>> links;
  for (const auto& l : g.SkeletonLinks()) links.insert(l);
  std::vector<AdversarySpec> out;
  for (size_t a = 0; a < j.size(); ++a) {
    const std::string at = Index(path, a);
    const json& item = j[a];
    RETURN_IF_ERROR(RequireObject(item, at));
    RETURN_IF_ERROR(CheckKeys(item, at, {"kind", "agent", "links", "horizon"}));
    if (!item.contains("kind")) return FieldError(Sub(at, "kind"), "required");
    ASSIGN_OR_RETURN(std::string kind, String(item["kind"], Sub(at, "kind")));
    AdversarySpec spec;
    if (item.contains("horizon")) {
      ASSIGN_OR_RETURN(spec.horizon, Integer(item["horizon"], Sub(at, "horizon")));
      if (spec.horizon < 1) return FieldError(Sub(at, "horizon"), "must be >= 1");
    }
    if (kind == "honest-but-curious") {
      if (item.contains("links")) {
        return FieldError(Sub(at, "links"), "only for eavesdroppers");
      }
      if (!item.contains("agent")) return FieldError(Sub(at, "agent"), "required");
      ASSIGN_OR_RETURN(int64_t agent, Integer(item["agent"], Sub(at, "agent")));
      if (agent < 0 || agent >= g.node_count()) {
        return FieldError(Sub(at, "agent"),
                          absl::StrCat("agent ", agent, " outside 0..",
                                       g.node_count() - 1));
      }
      spec.view = AdversaryView::HonestButCurious(static_cast<int>(agent));
    } else if (kind == "eavesdropper") {
      if (item.contains("agent")) {
        return FieldError(Sub(at, "agent"), "only for honest-but-curious");
      }
      std::vector<std::pair<int, int>> tapped;
      if (item.contains("links")) {
        const json& ls = item["links"];
        if (!ls.is_array()) return FieldError(Sub(at, "links"), "expected a list");
        for (size_t l = 0; l < ls.size(); ++l) {
          const std::string lat = Index(Sub(at, "links"), l);
          if (!ls[l].is_array() || ls[l].size() != 2) {
            return FieldError(lat, "expected [a, b]");
          }
          ASSIGN_OR_RETURN(int64_t x, Integer(ls[l][0], lat));
          ASSIGN_OR_RETURN(int64_t y, Integer(ls[l][1], lat));
          const std::pair<int, int> link(static_cast<int>(std::min(x, y)),
                                         static_cast<int>(std::max(x, y)));
          if (!links.count(link)) {
            return FieldError(lat, absl::StrFormat("(%d, %d) is not a link",
                                                   x, y));
          }
          tapped.push_back(link);
        }
        if (tapped.empty()) return FieldError(Sub(at, "links"), "empty list");
      }
      spec.view = AdversaryView::Eavesdropper(std::move(tapped));
    } else {
      return FieldError(Sub(at, "kind"),
                        absl::StrCat("unknown adversary '", kind,
                                     "' (honest-but-curious, eavesdropper)"));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

absl::StatusOr<std::vector<uint64_t>> ParseSeeds(const json& j) {
  const std::string path = "seeds";
  std::vector<uint64_t> seeds;
  if (j.is_number()) {
    ASSIGN_OR_RETURN(int64_t s, Integer(j, path));
    if (s < 0) return FieldError(path, "must be >= 0");
    return std::vector<uint64_t>{static_cast<uint64_t>(s)};
  }
  if (j.is_object()) {
    RETURN_IF_ERROR(CheckKeys(j, path, {"first", "count"}));
    int64_t first = 0;
    if (j.contains("first")) {
      ASSIGN_OR_RETURN(first, Integer(j["first"], Sub(path, "first")));
    }
    if (!j.contains("count")) return FieldError(Sub(path, "count"), "required");
    ASSIGN_OR_RETURN(int64_t count, Integer(j["count"], Sub(path, "count")));
    if (first < 0 || count < 1 || count > 1000000) {
      return FieldError(path, "need first >= 0 and 1 <= count <= 1e6");
    }
    for (int64_t s = 0; s < count; ++s) seeds.push_back(first + s);
    return seeds;
  }
  if (!j.is_array() || j.empty()) {
    return FieldError(path, "expected a seed, a nonempty list or {first, count}");
  }
  std::set<uint64_t> seen;
  for (size_t i = 0; i < j.size(); ++i) {
    ASSIGN_OR_RETURN(int64_t s, Integer(j[i], Index(path, i)));
    if (s < 0) return FieldError(Index(path, i), "must be >= 0");
    if (!seen.insert(s).second) {
      return FieldError(Index(path, i), absl::StrCat("duplicate seed ", s));
    }
    seeds.push_back(static_cast<uint64_t>(s));
  }
  return seeds;
}

}  // namespace

absl::StatusOr<Protocol> ParseProtocol(std::string_view name) {
  for (const ProtocolEntry& e : kProtocols) {
    if (name == e.name) return e.protocol;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown protocol '", std::string(name), "' (known: ",
                   absl::StrJoin(ProtocolNames(), ", "), ")"));
}

std::string ProtocolName(Protocol protocol) {
  for (const ProtocolEntry& e : kProtocols) {
    if (protocol == e.protocol) return e.name;
  }
  return "?";
}

std::vector<std::string> ProtocolNames() {
  std::vector<std::string> names;
  for (const ProtocolEntry& e : kProtocols) names.push_back(e.name);
  return names;
}

bool IsOptimization(Protocol protocol) {
  return protocol == Protocol::kAlg3 || protocol == Protocol::kDgd ||
         protocol == Protocol::kPdop;
}

std::vector<std::string> GraphPresetNames() {
  return {"circle", "path", "complete", "fig4-five-agent"};
}

absl::StatusOr<WeightedGraph> BuildGraph(const GraphSpec& spec) {
  if (spec.preset == "circle") return CircleGraph(spec.nodes, spec.weight);
  if (spec.preset == "path") return PathGraph(spec.nodes, spec.weight);
  if (spec.preset == "complete") return CompleteGraph(spec.nodes, spec.weight);
  if (spec.preset == "fig4-five-agent") return FiveAgentGraph(spec.weight);
  if (!spec.preset.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown graph preset '", spec.preset, "'"));
  }
  if (spec.directed) {
    std::vector<Edge> edges;
    for (const auto& [a, b] : spec.edges) edges.push_back({a, b});
    return WeightedGraph::Create(spec.nodes, edges, true,
                                 WeightedGraph::ConstantWeight(spec.weight));
  }
  std::set<std::pair<int, int>> links;
  for (const auto& [a, b] : spec.edges) {
    links.emplace(std::min(a, b), std::max(a, b));
  }
  return WeightedGraph::Undirected(
      spec.nodes, {links.begin(), links.end()},
      WeightedGraph::ConstantWeight(spec.weight));
}

std::string ExperimentConfig::HashHex() const {
  return absl::StrFormat("%016x", hash);
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view yaml_text) {
  json root;
  try {
    root = YamlToJson(YAML::Load(std::string(yaml_text)));
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  RETURN_IF_ERROR(RequireObject(root, "config"));
  RETURN_IF_ERROR(CheckKeys(
      root, "",
      {"name", "protocol", "graph", "initial", "epsilon", "schedules", "noise",
       "objective", "reference", "set", "decomposition", "secure_edge",
       "adversaries", "privacy", "steps", "seeds", "trajectory_stride",
       "record_log", "output", "tolerance", "workers"}));

  ExperimentConfig c;
  c.name = "experiment";
  if (root.contains("name")) {
    ASSIGN_OR_RETURN(c.name, String(root["name"], "name"));
    if (c.name.empty() ||
        c.name.find_first_of("/\\") != std::string::npos || c.name[0] == '.') {
      return FieldError("name", "must be a plain directory name");
    }
  }
  if (!root.contains("protocol")) return FieldError("protocol", "required");
  {
    ASSIGN_OR_RETURN(std::string p, String(root["protocol"], "protocol"));
    auto parsed = ParseProtocol(p);
    if (!parsed.ok()) return FieldError("protocol", parsed.status().message());
    c.protocol = *parsed;
  }
  const Protocol p = c.protocol;
  const bool is_static = p == Protocol::kPlain || p == Protocol::kDecomposed ||
                         p == Protocol::kSecureEdge || p == Protocol::kDpStatic;
  const bool is_dynamic = p == Protocol::kAlg1 || p == Protocol::kAlg2;

  if (!root.contains("graph")) return FieldError("graph", "required");
  ASSIGN_OR_RETURN(c.graph, ParseGraph(root["graph"]));
  auto built = BuildGraph(c.graph);
  if (!built.ok()) return FieldError("graph", built.status().message());
  const WeightedGraph& g = *built;
  const int m = g.node_count();
  if (!IsConnected(g)) return FieldError("graph", "not connected");

  auto forbid = [&](const char* key) -> absl::Status {
    if (root.contains(key)) {
      return FieldError(key, absl::StrCat("not used by protocol ",
                                          ProtocolName(p)));
    }
    return absl::OkStatus();
  };

  if (root.contains("steps")) {
    ASSIGN_OR_RETURN(c.steps, Integer(root["steps"], "steps"));
  }
  if (c.steps < 1 || c.steps > 100000000) {
    return FieldError("steps", "must be in 1..1e8");
  }

  // Noise options.
  double dgd_noise = 1.0;
  bool dgd_noise_given = false;
  if (root.contains("noise")) {
    if (p == Protocol::kPlain || p == Protocol::kDecomposed ||
        p == Protocol::kSecureEdge) {
      RETURN_IF_ERROR(forbid("noise"));
    }
    const json& n = root["noise"];
    RETURN_IF_ERROR(RequireObject(n, "noise"));
    RETURN_IF_ERROR(
        CheckKeys(n, "noise", {"distribution", "per_edge", "enabled", "scale"}));
    if (n.contains("distribution")) {
      ASSIGN_OR_RETURN(std::string d,
                       String(n["distribution"], "noise.distribution"));
      if (d == "laplace") {
        c.noise.distribution = NoiseDistribution::kLaplace;
      } else if (d == "gaussian") {
        c.noise.distribution = NoiseDistribution::kGaussian;
      } else {
        return FieldError("noise.distribution", "laplace or gaussian");
      }
    }
    if (n.contains("per_edge")) {
      ASSIGN_OR_RETURN(c.noise.per_edge, Bool(n["per_edge"], "noise.per_edge"));
    }
    if (n.contains("enabled")) {
      ASSIGN_OR_RETURN(c.noise_enabled, Bool(n["enabled"], "noise.enabled"));
    }
    if (n.contains("scale")) {
      ASSIGN_OR_RETURN(dgd_noise, Number(n["scale"], "noise.scale"));
      if (dgd_noise < 0) return FieldError("noise.scale", "must be >= 0");
      dgd_noise_given = true;
    }
  }
  RETURN_IF_ERROR(ParseSchedules(root, dgd_noise, dgd_noise_given, c));
  if (!c.noise_enabled) c.schedules.noise = Schedule::Constant(0.0);

  // Initial states.
  if (root.contains("initial")) {
    if (p == Protocol::kAlg1) {
      return FieldError("initial", "Algorithm 1 starts at the reference");
    }
    ASSIGN_OR_RETURN(auto init, AgentMatrix(root["initial"], "initial", m));
    if (is_static && init.front().size() != 1) {
      return FieldError("initial", "consensus protocols take scalar states");
    }
    c.initial = std::move(init);
  }

  // Stepsize.
  if (root.contains("epsilon")) {
    if (!is_static) RETURN_IF_ERROR(forbid("epsilon"));
    ASSIGN_OR_RETURN(double eps, Number(root["epsilon"], "epsilon"));
    c.epsilon = eps;
  }
  if (is_static) {
    const int extra = p == Protocol::kDecomposed ? 1 : 0;
    if (!c.epsilon) {
      const int delta = MaxDegree(g) + extra;
      c.epsilon = delta > 0 ? 1.0 / delta : 1.0;
    }
    if (absl::Status st = ValidateStepsize(g, *c.epsilon, extra); !st.ok()) {
      return FieldError("epsilon", st.message());
    }
    const WeightReport weights = ValidateWeights(g, kDefaultEta, 1);
    if (!weights.ok()) {
      return FieldError("graph.weight", weights.violations[0].ToString());
    }
  }

  // Problem definition.
  if (IsOptimization(p)) {
    if (!root.contains("objective")) return FieldError("objective", "required");
    RETURN_IF_ERROR(ParseObjective(root["objective"], m, c));
    const int dim = c.objective.kind == "quadratic-anchor"
                        ? static_cast<int>(c.objective.anchors[0].size())
                        : c.objective.logistic.dim;
    if (c.initial && static_cast<int>(c.initial->front().size()) != dim) {
      return FieldError("initial", absl::StrCat("expected dimension ", dim));
    }
  } else {
    RETURN_IF_ERROR(forbid("objective"));
  }
  if (is_dynamic) {
    if (!root.contains("reference")) return FieldError("reference", "required");
    ASSIGN_OR_RETURN(c.reference, ParseReference(root["reference"], m));
  } else {
    RETURN_IF_ERROR(forbid("reference"));
  }
  if (p == Protocol::kAlg2) {
    if (!root.contains("set")) return FieldError("set", "required");
    ASSIGN_OR_RETURN(c.set, ParseSet(root["set"], c.reference->dim()));
    if (c.initial) {
      if (static_cast<int>(c.initial->front().size()) != c.reference->dim()) {
        return FieldError("initial", "dimension differs from the reference");
      }
      for (size_t i = 0; i < c.initial->size(); ++i) {
        if (!c.set->Contains((*c.initial)[i])) {
          return FieldError(Index("initial", i), "not inside the set");
        }
      }
    }
  } else {
    RETURN_IF_ERROR(forbid("set"));
  }
  if (root.contains("decomposition")) {
    if (p != Protocol::kDecomposed) RETURN_IF_ERROR(forbid("decomposition"));
    RETURN_IF_ERROR(ParseDecomposition(root["decomposition"], c.decomposition));
  }
  if (root.contains("secure_edge")) {
    if (p != Protocol::kSecureEdge) RETURN_IF_ERROR(forbid("secure_edge"));
    RETURN_IF_ERROR(ParseSecureEdge(root["secure_edge"], c.secure_edge));
  }
  if (p == Protocol::kSecureEdge && g.directed()) {
    return FieldError("graph.directed", "secure-edge needs undirected links");
  }

  if (root.contains("adversaries")) {
    if (p == Protocol::kDpStatic || is_dynamic) {
      return FieldError("adversaries", absl::StrCat("no attack model for ",
                                                    ProtocolName(p)));
    }
    if (IsOptimization(p) && c.objective.kind != "quadratic-anchor") {
      return FieldError("adversaries",
                        "the anchor attack needs objective.kind "
                        "quadratic-anchor");
    }
    ASSIGN_OR_RETURN(c.adversaries, ParseAdversaries(root["adversaries"], g));
  }

  // Budget accounting.
  if (p == Protocol::kAlg3) c.sensitivity_model = SensitivityModel::kWeakening;
  if (p == Protocol::kPdop) c.sensitivity_model = SensitivityModel::kStepsize;
  if (root.contains("privacy")) {
    const json& pr = root["privacy"];
    RETURN_IF_ERROR(RequireObject(pr, "privacy"));
    RETURN_IF_ERROR(CheckKeys(pr, "privacy", {"sensitivity", "model"}));
    if (pr.contains("sensitivity")) {
      ASSIGN_OR_RETURN(c.sensitivity,
                       Number(pr["sensitivity"], "privacy.sensitivity"));
      if (c.sensitivity < 0) {
        return FieldError("privacy.sensitivity", "must be >= 0");
      }
    }
    if (pr.contains("model")) {
      ASSIGN_OR_RETURN(std::string model, String(pr["model"], "privacy.model"));
      if (model == "constant") {
        c.sensitivity_model = SensitivityModel::kConstant;
      } else if (model == "weakening") {
        c.sensitivity_model = SensitivityModel::kWeakening;
      } else if (model == "stepsize") {
        c.sensitivity_model = SensitivityModel::kStepsize;
      } else {
        return FieldError("privacy.model", "constant, weakening or stepsize");
      }
    }
  }

  if (root.contains("seeds")) {
    ASSIGN_OR_RETURN(c.seeds, ParseSeeds(root["seeds"]));
  }
  if (root.contains("trajectory_stride")) {
    ASSIGN_OR_RETURN(c.trajectory_stride,
                     Integer(root["trajectory_stride"], "trajectory_stride"));
    if (c.trajectory_stride < 0) {
      return FieldError("trajectory_stride", "must be >= 0");
    }
  }
  if (root.contains("record_log")) {
    ASSIGN_OR_RETURN(c.record_log, Bool(root["record_log"], "record_log"));
  }
  if (root.contains("output")) {
    ASSIGN_OR_RETURN(c.output, String(root["output"], "output"));
    if (c.output.empty()) return FieldError("output", "empty path");
  }
  if (root.contains("tolerance")) {
    ASSIGN_OR_RETURN(c.tolerance, Number(root["tolerance"], "tolerance"));
    if (c.tolerance <= 0) return FieldError("tolerance", "must be > 0");
  }
  if (root.contains("workers")) {
    ASSIGN_OR_RETURN(int64_t w, Integer(root["workers"], "workers"));
    if (w < 0 || w > 1024) return FieldError("workers", "must be in 0..1024");
    c.workers = static_cast<int>(w);
  }

  json semantic = root;
  for (const char* key : {"name", "seeds", "output", "tolerance", "workers"}) {
    semantic.erase(key);
  }
  // Defaults that depend on the graph are part of the semantics.
  if (c.epsilon && !semantic.contains("epsilon")) semantic["epsilon"] = *c.epsilon;
  semantic = Canonicalize(semantic);
  c.canonical = semantic.dump();
  c.hash = Fnv1a64(c.canonical);
  c.graph_key = semantic["graph"].dump();
  for (const char* key : {"objective", "reference", "initial"}) {
    if (semantic.contains(key)) {
      c.problem_key = absl::StrCat(key, "=", semantic[key].dump());
      break;
    }
  }
  return c;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseConfig(buffer.str());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

std::string ResolveOutputDir(const ExperimentConfig& config,
                             const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return config.output;
}

}  // namespace privconsensus
