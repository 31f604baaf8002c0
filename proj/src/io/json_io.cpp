// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "moelaw/json_io.hpp"

#include <string>

#include "moelaw/error.hpp"

namespace moelaw {

namespace {

double number_at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing key '") + key + "'");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) {
    throw SchemaError(std::string("key '") + key + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t integer_at(const Json& j, const char* key) {
  const double v = number_at(j, key);
  if (!j.at(key).is_number_integer()) {
    throw SchemaError(std::string("key '") + key + "' must be an integer");
  }
  (void)v;
  return j.at(key).get<std::int64_t>();
}

Json to_json(const RatioEstimate& r) {
  return {{"ratio", r.ratio}, {"extrapolated", r.extrapolated}};
}

Json to_json(const EfficiencyRatio& r) {
  return {{"ratio", r.ratio},
          {"Na", r.Na},
          {"converged", r.converged},
          {"steps", r.steps}};
}

}  // namespace

Json to_json(const ScalingConstants& c) {
  Json j = Json::object();
  const auto v = c.to_array();
  for (std::size_t i = 0; i < ScalingConstants::kCount; ++i) {
    j[std::string(ScalingConstants::kNames[i])] = v[i];
  }
  return j;
}

ScalingConstants constants_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("constants must be a JSON object");
  std::array<double, ScalingConstants::kCount> v{};
  for (std::size_t i = 0; i < ScalingConstants::kCount; ++i) {
    v[i] = number_at(j, std::string(ScalingConstants::kNames[i]).c_str());
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto name : ScalingConstants::kNames) known = known || key == name;
    if (!known) throw SchemaError("unexpected constants key '" + key + "'");
  }
  return ScalingConstants::from_array(v);
}

Json to_json(const FactorPoint& p) {
  return {{"N", p.N}, {"D", p.D}, {"Na", p.Na}, {"G", p.G}, {"S", p.S}};
}

FactorPoint point_from_json(const Json& j) {
  return {number_at(j, "N"), number_at(j, "D"), number_at(j, "Na"),
          number_at(j, "G"), number_at(j, "S")};
}

Json to_json(const ArchitectureSpec& s) {
  return {{"layers", s.layers},     {"d_hidden", s.d_hidden},
          {"d_head", s.d_head},     {"n_h", s.n_h},
          {"d_expert", s.d_expert}, {"n_e", s.n_e},
          {"n_k", s.n_k},           {"n_s", s.n_s}};
}

ArchitectureSpec arch_from_json(const Json& j) {
  ArchitectureSpec s;
  s.layers = integer_at(j, "layers");
  s.d_hidden = integer_at(j, "d_hidden");
  s.d_head = integer_at(j, "d_head");
  s.n_h = integer_at(j, "n_h");
  s.d_expert = integer_at(j, "d_expert");
  s.n_e = integer_at(j, "n_e");
  s.n_k = integer_at(j, "n_k");
  s.n_s = integer_at(j, "n_s");
  return s;
}

Json to_json(const ParamCount& pc) {
  return {{"N", pc.N}, {"Na", pc.Na}, {"G", pc.G}, {"S", pc.S}};
}

Json to_json(const SweepPlan& plan) {
  Json levels = Json::array();
  for (const auto& l : plan.levels) {
    levels.push_back({{"level", l.value},
                      {"spec", to_json(l.spec)},
                      {"counts", to_json(l.counts)},
                      {"drift", l.drift},
                      {"extrapolated", l.extrapolated}});
  }
  return {{"target", std::string(to_string(plan.target))},
          {"base", to_json(plan.base)},
          {"levels", levels}};
}

Json to_json(const ExperimentRecord& r) {
  Json j = {{"id", r.id}};
  j.update(to_json(r.point));
  j["loss"] = r.loss;
  j["tags"] = Json(r.tags);
  return j;
}

ExperimentRecord record_from_json(const Json& j) {
  ExperimentRecord r;
  r.point = point_from_json(j);
  r.loss = number_at(j, "loss");
  if (j.contains("id")) {
    if (!j.at("id").is_string()) throw SchemaError("key 'id' must be a string");
    r.id = j.at("id").get<std::string>();
  }
  if (j.contains("tags")) {
    const Json& t = j.at("tags");
    if (t.is_string()) {
      r.tags = parse_tags(t.get<std::string>());
    } else if (t.is_object()) {
      for (const auto& [k, v] : t.items()) {
        r.tags[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    } else {
      throw SchemaError("key 'tags' must be an object or a string");
    }
  }
  return r;
}

Json to_json(const Campaign& c) {
  Json records = Json::array();
  for (const auto& r : c.records) records.push_back(to_json(r));
  Json prov;
  if (c.provenance.kind == Provenance::Kind::Synthetic) {
    prov = {{"kind", "synthetic"},
            {"constants", to_json(c.provenance.constants)},
            {"sigma", c.provenance.sigma},
            {"seed", c.provenance.seed}};
  } else {
    prov = {{"kind", "ingested"}, {"source", c.provenance.source}};
  }
  Json ranges = Json::object();
  for (Factor f : {Factor::N, Factor::D, Factor::Na, Factor::G, Factor::S}) {
    ranges[std::string(to_string(f))] = {c.range(f).min, c.range(f).max};
  }
  return {{"provenance", prov},
          {"ranges", ranges},
          {"warnings", c.warnings},
          {"records", records}};
}

Json to_json(const Interval& i) {
  return {{"lo", i.lo},
          {"hi", i.hi},
          {"clipped_lo", i.clipped_lo},
          {"clipped_hi", i.clipped_hi}};
}

Json to_json(const OptimaReport& r) {
  return {{"N", r.N},
          {"G", r.G},
          {"S", r.S},
          {"G_opt", r.G_opt},
          {"S_opt", r.S_opt.value},
          {"S_vertex", r.S_opt.vertex},
          {"S_clamped", r.S_opt.clamped},
          {"structure", r.structure},
          {"theoretical_ratio", to_json(r.theoretical)},
          {"threshold", r.threshold},
          {"efficiency_ratio", to_json(r.efficiency)}};
}

Json to_json(const Frontier& f) {
  Json pts = Json::array();
  for (const auto& p : f.points) {
    Json jp = {{"C", p.C}, {"has_root", p.has_root}};
    if (p.has_root) {
      jp["Na_star"] = p.Na_star;
      jp["D_star"] = p.D_star;
      jp["L_star"] = p.L_star;
      jp["residual"] = p.residual;
    }
    pts.push_back(jp);
  }
  Json j = {{"N", f.N},   {"G", f.G},         {"S", f.S},
            {"C0", f.C0}, {"structure", f.structure}, {"points", pts}};
  if (f.summary) {
    j["summary"] = {{"offset", f.summary->offset},
                    {"coeff", f.summary->coeff},
                    {"exponent", f.summary->exponent}};
  } else {
    j["summary"] = nullptr;
  }
  return j;
}

Json to_json(const FitResult& r) {
  Json params = Json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) params[r.names[i]] = r.params[i];
  Json j = {{"model", r.model}, {"params", params}};
  j["constants"] = r.constants ? to_json(*r.constants) : Json(nullptr);
  j["pinned"] = r.pinned;
  j["metrics"] = {{"records", r.observed.size()},
                  {"mean_abs_error", r.mean_abs_error},
                  {"max_abs_error", r.max_abs_error},
                  {"objective", r.objective_value},
                  {"converged", r.converged},
                  {"best_start", r.best_start},
                  {"iterations", r.iterations}};
  if (r.holdout_mae) {
    j["metrics"]["holdout_records"] = r.holdout_observed.size();
    j["metrics"]["holdout_mean_abs_error"] = *r.holdout_mae;
    j["metrics"]["holdout_max_abs_error"] = *r.holdout_max_abs_error;
  }
  j["start_objectives"] = r.start_objectives;
  j["warnings"] = r.warnings;
  j["residuals"] = r.residuals;
  return j;
}

FitResult fit_result_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("model") || !j.contains("params")) {
    throw SchemaError("fit result needs 'model' and 'params'");
  }
  FitResult r;
  r.model = j.at("model").get<std::string>();
  for (const auto& [k, v] : j.at("params").items()) {
    if (!v.is_number()) throw SchemaError("parameter '" + k + "' must be a number");
    r.names.push_back(k);
    r.params.push_back(v.get<double>());
  }
  if (j.contains("constants") && !j.at("constants").is_null()) {
    r.constants = constants_from_json(j.at("constants"));
  }
  return r;
}

Json to_json(const StagedFit& s) {
  Json stages = Json::array();
  for (const auto& st : s.stages) {
    Json js = to_json(st.fit);
    js.erase("residuals");
    stages.push_back({{"stage", st.stage},
                      {"group_size", st.group_size},
                      {"fit", js}});
  }
  return {{"stages", stages},
          {"warnings", s.warnings},
          {"initial", s.initial},
          {"joint", to_json(s.joint)},
          {"constants", to_json(s.constants)}};
}

}  // namespace moelaw
