// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moelaw/arch.hpp"
#include "moelaw/datastore.hpp"
#include "moelaw/error.hpp"
#include "moelaw/fitter.hpp"
#include "moelaw/json_io.hpp"
#include "moelaw/law.hpp"
#include "moelaw/optimizer.hpp"

namespace moelaw::cli {

namespace {

namespace fs = std::filesystem;

enum class Output { Human, Json, Csv };

struct Globals {
  std::string constants = kPaperLabel;
  std::string registry;
  std::string output = "human";
  std::uint64_t seed = 0;

  Output mode() const {
    if (output == "json") return Output::Json;
    if (output == "csv") return Output::Csv;
    return Output::Human;
  }
};

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string percent(double r) { return fixed(100 * r, 2) + "%"; }

const CLI::Validator kNumber(
    [](std::string& s) -> std::string {
      try {
        parse_scaled_number(s);
        return {};
      } catch (const std::exception&) {
        return "'" + s + "' is not a number (use 1e9, 30M, 1.5B or 1T)";
      }
    },
    "NUMBER");

double number(const std::string& s) { return parse_scaled_number(s); }

std::optional<double> maybe(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_scaled_number(s);
}

double required(const std::string& s, const char* flag) {
  if (s.empty()) {
    throw DomainError(std::string("--") + flag + " is required here");
  }
  return parse_scaled_number(s);
}

CLI::Option* add_number(CLI::App* app, const std::string& name,
                        std::string& target, const std::string& help) {
  return app->add_option(name, target, help)->check(kNumber);
}

ConstantsRegistry open_registry(const Globals& g) {
  if (g.registry.empty()) return ConstantsRegistry();
  return ConstantsRegistry(fs::path(g.registry));
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

// Accepts a bare constants object, a registry document or a joint fit.
ScalingConstants constants_from_document(const Json& j,
                                         const std::string& where) {
  if (j.is_object() && j.contains("constants")) {
    if (j.at("constants").is_null()) {
      throw SchemaError(where + " holds no joint-law constants");
    }
    return constants_from_json(j.at("constants"));
  }
  return constants_from_json(j);
}

ScalingConstants resolve_constants(const Globals& g) {
  const fs::path p(g.constants);
  std::error_code ec;
  if (p.extension() == ".json" || fs::is_regular_file(p, ec)) {
    return constants_from_document(read_json_file(p), p.string());
  }
  return open_registry(g).load(g.constants).constants;
}

void print_rows(std::ostream& out,
                const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) {
    out << k << std::string(w - k.size() + 2, ' ') << v << '\n';
  }
}

std::string describe(const std::exception& e) {
  if (dynamic_cast<const DegenerateRecordsError*>(&e)) return "degenerate records";
  if (dynamic_cast<const InsufficientRecordsError*>(&e)) return "insufficient records";
  if (dynamic_cast<const IntegralityError*>(&e)) return "integrality";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const UnknownLabelError*>(&e)) return "unknown label";
  return "internal";
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PointFlags {
  std::string N, D, Na, G, S;

  void add(CLI::App* app) {
    add_number(app, "--N", N, "total parameters");
    add_number(app, "--D", D, "training tokens");
    add_number(app, "--Na", Na, "activated parameters");
    add_number(app, "--G", G, "activated experts (n_s + n_k)");
    add_number(app, "--S", S, "shared-expert ratio n_s / G");
  }
};

int cmd_predict(const Globals& g, const PointFlags& f, std::ostream& out) {
  const ScalingConstants c = resolve_constants(g);
  const FactorPoint p{required(f.N, "N"), required(f.D, "D"),
                      required(f.Na, "Na"), required(f.G, "G"),
                      required(f.S, "S")};
  const double loss = eval_joint_loss(c, p);
  switch (g.mode()) {
    case Output::Json:
      out << Json{{"constants", g.constants},
                  {"point", to_json(p)},
                  {"loss", loss}}
                 .dump(2)
          << '\n';
      break;
    case Output::Csv:
      out << "N,D,Na,G,S,loss\n"
          << num(p.N, 17) << ',' << num(p.D, 17) << ',' << num(p.Na, 17) << ','
          << num(p.G, 17) << ',' << num(p.S, 17) << ',' << num(loss, 17)
          << '\n';
      break;
    case Output::Human:
      out << "predicted loss: " << fixed(loss, 6) << '\n';
      break;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitFlags {
  std::string input;
  std::string from_json;
  std::string law = "joint";
  bool staged = false;
  int starts = 16;
  int max_iterations = 500;
  double tolerance = 1e-12;
  std::string objective = "huber";
  double delta = 0.01;
  std::string holdout;
  bool no_reference_start = false;
  std::vector<std::string> bounds;
  std::string save;
};

FitOptions fit_options(const Globals& g, const FitFlags& f) {
  FitOptions o;
  o.starts = f.starts;
  o.max_iterations = f.max_iterations;
  o.tolerance = f.tolerance;
  o.seed = g.seed;
  o.holdout_tag = f.holdout;
  o.include_reference_start = !f.no_reference_start;
  o.objective.kind = f.objective == "huber" ? Objective::Kind::Huber
                                            : Objective::Kind::SquaredError;
  o.objective.delta = f.delta;
  for (const auto& b : f.bounds) {
    // name=lo:hi
    const auto eq = b.find('=');
    const auto colon = b.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) {
      throw DomainError("bound '" + b + "' must look like name=lo:hi");
    }
    o.bounds[b.substr(0, eq)] = {
        parse_scaled_number(b.substr(eq + 1, colon - eq - 1)),
        parse_scaled_number(b.substr(colon + 1))};
  }
  return o;
}

void print_fit(const FitResult& r, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> rows{
      {"model", r.model},
      {"records", std::to_string(r.observed.size())},
      {"objective", num(r.objective_value, 6)},
      {"mean abs error", num(r.mean_abs_error, 6)},
      {"max abs error", num(r.max_abs_error, 6)},
      {"best start", std::to_string(r.best_start) + " of " +
                         std::to_string(r.start_objectives.size())},
      {"iterations", std::to_string(r.iterations)},
      {"converged", r.converged ? "yes" : "no"}};
  if (r.holdout_mae) {
    rows.emplace_back("held-out records", std::to_string(r.holdout_observed.size()));
    rows.emplace_back("held-out MAE", num(*r.holdout_mae, 6));
    rows.emplace_back("held-out max error", num(*r.holdout_max_abs_error, 6));
  }
  print_rows(out, rows);
  out << '\n';
  std::vector<std::pair<std::string, std::string>> params;
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    const bool pinned = std::find(r.pinned.begin(), r.pinned.end(),
                                  r.names[j]) != r.pinned.end();
    params.emplace_back(r.names[j], num(r.params[j], 8) + (pinned ? "  (pinned)" : ""));
  }
  print_rows(out, params);
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

void print_fit_csv(const FitResult& r, std::ostream& out) {
  out << "id,set,observed,predicted,residual\n";
  for (std::size_t i = 0; i < r.observed.size(); ++i) {
    out << r.record_ids[i] << ",fit," << num(r.observed[i], 17) << ','
        << num(r.predicted[i], 17) << ',' << num(r.residuals[i], 17) << '\n';
  }
  for (std::size_t i = 0; i < r.holdout_observed.size(); ++i) {
    out << r.holdout_ids[i] << ",holdout," << num(r.holdout_observed[i], 17)
        << ',' << num(r.holdout_predicted[i], 17) << ','
        << num(r.holdout_predicted[i] - r.holdout_observed[i], 17) << '\n';
  }
}

int cmd_fit(const Globals& g, const FitFlags& f, std::ostream& out,
            std::ostream& err) {
  if (f.input.empty() == f.from_json.empty()) {
    throw DomainError("give exactly one of --input or --from-json");
  }
  const std::string source = f.input.empty() ? f.from_json : f.input;
  const IngestResult data =
      f.input.empty() ? ingest_file(source, DataFormat::JSON) : ingest_file(source);
  for (const auto& r : data.rejected) {
    err << "warning: " << source << " row " << r.row << ": " << r.message << '\n';
  }
  for (const auto& w : data.campaign.warnings) err << "warning: " << w << '\n';

  const FitOptions options = fit_options(g, f);
  const auto& records = data.campaign.records;

  std::optional<StagedFit> staged;
  FitResult result;
  bool baseline = true;
  BaselineId bid{};
  try {
    bid = parse_baseline_id(f.law);
  } catch (const DomainError&) {
    baseline = false;
  }
  if (baseline) {
    if (f.staged) throw DomainError("--staged applies to the joint law only");
    result = fit_baseline(bid, records, options);
  } else {
    const SubLawForm form = parse_sub_law_form(f.law);
    if (f.staged) {
      if (form != SubLawForm::Joint) {
        throw DomainError("--staged applies to the joint law only");
      }
      staged = staged_fit_pipeline(records, options);
      result = staged->joint;
    } else {
      result = fit_sub_law(form, records, options);
    }
  }

  if (!f.save.empty()) {
    if (!result.constants) {
      throw DomainError("--save needs a joint-law fit");
    }
    open_registry(g).save(f.save, *result.constants, "fit of " + source);
    err << "saved constants as '" << f.save << "'\n";
  }

  switch (g.mode()) {
    case Output::Json:
      out << (staged ? to_json(*staged) : to_json(result)).dump(2) << '\n';
      break;
    case Output::Csv:
      print_fit_csv(result, out);
      break;
    case Output::Human:
      if (staged) {
        for (const auto& st : staged->stages) {
          out << st.stage << " stage: " << st.group_size
              << " records, objective " << num(st.fit.objective_value, 4) << '\n';
        }
        for (const auto& w : staged->warnings) out << "warning: " << w << '\n';
        out << '\n';
      }
      print_fit(result, out);
      break;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// optimal, range, frontier
// ---------------------------------------------------------------------------

struct OptimalFlags {
  std::string what = "all";
  std::string N, G, S, D;
  std::string threshold = "0.001";
  int max_steps = 100;
};

int cmd_optimal(const Globals& g, const OptimalFlags& f, std::ostream& out) {
  const ScalingConstants c = resolve_constants(g);
  const double G_opt = optimal_G(c);
  const OptimalS S_opt = optimal_S(c);
  const double G = maybe(f.G).value_or(G_opt);
  const double S = maybe(f.S).value_or(S_opt.value);
  const Json s_json = {{"value", S_opt.value},
                       {"vertex", S_opt.vertex},
                       {"clamped", S_opt.clamped}};
  const bool json = g.mode() == Output::Json;
  const bool csv = g.mode() == Output::Csv;

  if (f.what == "G") {
    if (json) out << Json{{"G_opt", G_opt}}.dump(2) << '\n';
    else if (csv) out << "G_opt\n" << num(G_opt, 17) << '\n';
    else out << "G_opt = " << num(G_opt, 4) << '\n';
  } else if (f.what == "S") {
    if (json) out << Json{{"S_opt", s_json}}.dump(2) << '\n';
    else if (csv) out << "S_opt,vertex,clamped\n" << num(S_opt.value, 17) << ','
                      << num(S_opt.vertex, 17) << ',' << S_opt.clamped << '\n';
    else out << "S_opt = " << num(S_opt.value, 4)
             << (S_opt.clamped ? " (clamped)" : "") << '\n';
  } else if (f.what == "ratio") {
    const double N = required(f.N, "N");
    const RatioEstimate r = theoretical_ratio(c, N, G, S);
    if (json) {
      out << Json{{"N", N}, {"G", G}, {"S", S}, {"ratio", r.ratio},
                  {"Na", r.ratio * N}, {"extrapolated", r.extrapolated}}
                 .dump(2)
          << '\n';
    } else if (csv) {
      out << "N,G,S,ratio,Na,extrapolated\n" << num(N, 17) << ',' << num(G, 17)
          << ',' << num(S, 17) << ',' << num(r.ratio, 17) << ','
          << num(r.ratio * N, 17) << ',' << r.extrapolated << '\n';
    } else {
      out << "Na/N = " << percent(r.ratio) << " (Na = "
          << format_scaled_number(r.ratio * N, 1) << ")"
          << (r.extrapolated ? " extrapolated" : "") << '\n';
    }
  } else if (f.what == "efficiency") {
    const double N = required(f.N, "N");
    const double thr = number(f.threshold);
    const EfficiencyRatio r = efficiency_aware_ratio(
        c, N, G, S, thr, f.max_steps, maybe(f.D).value_or(kDefaultTokens));
    if (json) {
      out << Json{{"N", N}, {"G", G}, {"S", S}, {"threshold", thr},
                  {"ratio", r.ratio}, {"Na", r.Na}, {"converged", r.converged},
                  {"steps", r.steps}}
                 .dump(2)
          << '\n';
    } else if (csv) {
      out << "N,G,S,threshold,ratio,Na,converged,steps\n" << num(N, 17) << ','
          << num(G, 17) << ',' << num(S, 17) << ',' << num(thr, 17) << ','
          << num(r.ratio, 17) << ',' << num(r.Na, 17) << ',' << r.converged
          << ',' << r.steps << '\n';
    } else {
      out << "Na/N = " << percent(r.ratio) << " (Na = "
          << format_scaled_number(r.Na, 1) << ", threshold " << num(thr) << ")"
          << (r.converged ? "" : " step limit reached") << '\n';
    }
  } else {
    if (f.N.empty()) {
      if (json) out << Json{{"G_opt", G_opt}, {"S_opt", s_json}}.dump(2) << '\n';
      else if (csv) out << "G_opt,S_opt\n" << num(G_opt, 17) << ','
                        << num(S_opt.value, 17) << '\n';
      else print_rows(out, {{"G_opt", num(G_opt, 4)}, {"S_opt", num(S_opt.value, 4)}});
      return kExitOk;
    }
    const OptimaReport r = make_optima_report(
        c, number(f.N), maybe(f.G), maybe(f.S), number(f.threshold));
    if (json) {
      out << to_json(r).dump(2) << '\n';
    } else if (csv) {
      out << "N,G,S,G_opt,S_opt,theoretical_ratio,threshold,efficiency_ratio\n"
          << num(r.N, 17) << ',' << num(r.G, 17) << ',' << num(r.S, 17) << ','
          << num(r.G_opt, 17) << ',' << num(r.S_opt.value, 17) << ','
          << num(r.theoretical.ratio, 17) << ',' << num(r.threshold, 17) << ','
          << num(r.efficiency.ratio, 17) << '\n';
    } else {
      print_rows(out, {{"N", format_scaled_number(r.N, 1)},
                       {"G_opt", num(r.G_opt, 4)},
                       {"S_opt", num(r.S_opt.value, 4)},
                       {"Na/N theoretical", percent(r.theoretical.ratio)},
                       {"Na/N practical (thr " + num(r.threshold) + ")",
                        percent(r.efficiency.ratio)}});
    }
  }
  return kExitOk;
}

struct RangeFlags {
  std::string what = "both";
  std::string N, Na;
  std::string threshold = "0.001";
};

int cmd_range(const Globals& g, const RangeFlags& f, std::ostream& out) {
  const ScalingConstants c = resolve_constants(g);
  const double N = required(f.N, "N"), Na = required(f.Na, "Na");
  const double thr = number(f.threshold);
  std::vector<std::pair<std::string, Interval>> ranges;
  if (f.what != "S") ranges.emplace_back("G", practical_range_G(c, N, Na, thr));
  if (f.what != "G") ranges.emplace_back("S", practical_range_S(c, N, Na, thr));
  switch (g.mode()) {
    case Output::Json: {
      Json j = {{"N", N}, {"Na", Na}, {"threshold", thr}};
      for (const auto& [name, iv] : ranges) j[name] = to_json(iv);
      out << j.dump(2) << '\n';
      break;
    }
    case Output::Csv:
      out << "factor,lo,hi,clipped_lo,clipped_hi\n";
      for (const auto& [name, iv] : ranges) {
        out << name << ',' << num(iv.lo, 17) << ',' << num(iv.hi, 17) << ','
            << iv.clipped_lo << ',' << iv.clipped_hi << '\n';
      }
      break;
    case Output::Human:
      for (const auto& [name, iv] : ranges) {
        const int d = name == "G" ? 2 : 3;
        out << name << " range [" << fixed(iv.lo, d) << ", " << fixed(iv.hi, d)
            << "]" << (iv.clipped_lo || iv.clipped_hi ? " (clipped)" : "")
            << '\n';
      }
      break;
  }
  return kExitOk;
}

struct FrontierFlags {
  std::string N, G, S;
  std::string from = "1e18", to = "1e22";
  std::size_t points = 41;
};

Frontier frontier_for(const ScalingConstants& c, const FrontierFlags& f) {
  const auto budgets = log_spaced(number(f.from), number(f.to), f.points);
  return compute_optimal_frontier(c, required(f.N, "N"),
                                  maybe(f.G).value_or(optimal_G(c)),
                                  maybe(f.S).value_or(optimal_S(c).value),
                                  budgets);
}

int cmd_frontier(const Globals& g, const FrontierFlags& f, std::ostream& out) {
  const Frontier fr = frontier_for(resolve_constants(g), f);
  switch (g.mode()) {
    case Output::Json:
      out << to_json(fr).dump(2) << '\n';
      break;
    case Output::Csv:
      out << "C,Na_star,D_star,L_star,has_root\n";
      for (const auto& p : fr.points) {
        out << num(p.C, 17) << ',' << num(p.Na_star, 17) << ','
            << num(p.D_star, 17) << ',' << num(p.L_star, 17) << ','
            << p.has_root << '\n';
      }
      break;
    case Output::Human: {
      std::vector<std::pair<std::string, std::string>> rows{
          {"N", format_scaled_number(fr.N, 1)},
          {"G", num(fr.G, 4)},
          {"S", num(fr.S, 4)},
          {"C0", num(fr.C0, 6)}};
      if (fr.summary) {
        rows.emplace_back("L*(C)", num(fr.summary->offset, 4) + " + " +
                                       num(fr.summary->coeff, 4) + " * C^" +
                                       num(fr.summary->exponent, 4));
      }
      print_rows(out, rows);
      out << "\nC           Na*         D*          L*\n";
      for (const auto& p : fr.points) {
        if (!p.has_root) continue;
        char line[128];
        std::snprintf(line, sizeof line, "%-11.3e %-11.3e %-11.3e %.5f\n", p.C,
                      p.Na_star, p.D_star, p.L_star);
        out << line;
      }
      break;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// arch, sweep
// ---------------------------------------------------------------------------

struct ArchFlags {
  std::string from_json;
  std::int64_t layers = 0, d_hidden = 0, d_head = 0, n_h = 0, d_expert = 0,
               n_e = 0, n_k = 0, n_s = -1;
  std::string u, D;

  void add(CLI::App* app) {
    app->add_option("--from-json", from_json, "architecture JSON file");
    app->add_option("--layers", layers);
    app->add_option("--d-hidden", d_hidden);
    app->add_option("--d-head", d_head);
    app->add_option("--n-h", n_h, "attention heads");
    app->add_option("--d-expert", d_expert);
    app->add_option("--n-e", n_e, "routed experts");
    app->add_option("--n-k", n_k, "activated routed experts");
    app->add_option("--n-s", n_s, "shared experts");
  }

  ArchitectureSpec spec() const {
    ArchitectureSpec s;
    bool any = false;
    if (!from_json.empty()) {
      s = arch_from_json(read_json_file(from_json));
      any = true;
    }
    const auto set = [&](std::int64_t v, std::int64_t& field) {
      if (v > 0) {
        field = v;
        any = true;
      }
    };
    set(layers, s.layers);
    set(d_hidden, s.d_hidden);
    set(d_head, s.d_head);
    set(n_h, s.n_h);
    set(d_expert, s.d_expert);
    set(n_e, s.n_e);
    set(n_k, s.n_k);
    if (n_s >= 0) {
      s.n_s = n_s;
      any = true;
    }
    if (!any) throw DomainError("describe the architecture with flags or --from-json");
    s.validate();
    return s;
  }
};

const char* kArchHeader = "layers,d_hidden,d_head,n_h,d_expert,n_e,n_k,n_s";

std::string arch_csv(const ArchitectureSpec& s) {
  std::ostringstream o;
  o << s.layers << ',' << s.d_hidden << ',' << s.d_head << ',' << s.n_h << ','
    << s.d_expert << ',' << s.n_e << ',' << s.n_k << ',' << s.n_s;
  return o.str();
}

int cmd_arch(const Globals& g, const ArchFlags& f, std::ostream& out) {
  ArchitectureSpec spec = f.spec();
  if (auto u = maybe(f.u)) spec = derive_uv_scaling(spec, *u);
  const ParamCount pc = count_params(spec);
  const auto D = maybe(f.D);
  switch (g.mode()) {
    case Output::Json: {
      Json j = {{"spec", to_json(spec)}, {"counts", to_json(pc)}};
      if (D) j["point"] = to_json(to_factor_point(spec, *D));
      out << j.dump(2) << '\n';
      break;
    }
    case Output::Csv:
      out << kArchHeader << ",N,Na,G,S\n"
          << arch_csv(spec) << ',' << num(pc.N, 17) << ',' << num(pc.Na, 17)
          << ',' << num(pc.G, 17) << ',' << num(pc.S, 17) << '\n';
      break;
    case Output::Human:
      print_rows(out, {{"layers", std::to_string(spec.layers)},
                       {"d_hidden", std::to_string(spec.d_hidden)},
                       {"heads x d_head", std::to_string(spec.n_h) + " x " +
                                              std::to_string(spec.d_head)},
                       {"d_expert", std::to_string(spec.d_expert)},
                       {"experts", std::to_string(spec.n_e) + " routed, " +
                                       std::to_string(spec.n_k) + " active, " +
                                       std::to_string(spec.n_s) + " shared"},
                       {"N", format_scaled_number(pc.N, 2) + " (" + num(pc.N, 10) + ")"},
                       {"Na", format_scaled_number(pc.Na, 2) + " (" + num(pc.Na, 10) + ")"},
                       {"Na/N", percent(pc.Na / pc.N)},
                       {"G", num(pc.G)},
                       {"S", num(pc.S, 4)}});
      break;
  }
  return kExitOk;
}

struct SweepFlags {
  ArchFlags arch;
  std::string target;
  std::vector<std::string> levels;
};

int cmd_sweep(const Globals& g, const SweepFlags& f, std::ostream& out,
              std::ostream& err) {
  std::vector<double> levels;
  for (const auto& s : f.levels) levels.push_back(number(s));
  const SweepPlan plan = plan_sweep(f.arch.spec(), parse_factor(f.target), levels);
  for (const auto& l : plan.levels) {
    if (l.extrapolated) {
      err << "warning: level " << num(l.value) << " lies outside the studied range\n";
    }
  }
  if (g.mode() == Output::Json) {
    out << to_json(plan).dump(2) << '\n';
  } else {
    write_sweep_csv(plan, out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// campaign, report, curve
// ---------------------------------------------------------------------------

struct CampaignFlags {
  double sigma = 0;
  std::string out;
};

int cmd_campaign(const Globals& g, const CampaignFlags& f, std::ostream& out,
                 std::ostream& err) {
  const Campaign camp =
      generate_campaign(resolve_constants(g), CampaignLayout{}, f.sigma, g.seed);
  for (const auto& w : camp.warnings) err << "warning: " << w << '\n';
  const auto write = [&](std::ostream& o, bool json) {
    if (json) {
      o << to_json(camp).dump(2) << '\n';
    } else {
      write_csv(camp.records, o);
    }
  };
  if (f.out.empty()) {
    write(out, g.mode() == Output::Json);
    return kExitOk;
  }
  std::ofstream file(f.out);
  if (!file) throw SchemaError("cannot write " + f.out);
  write(file, fs::path(f.out).extension() == ".json");
  if (g.mode() == Output::Json) {
    out << Json{{"path", f.out}, {"records", camp.records.size()},
                {"sigma", f.sigma}, {"seed", g.seed}}
               .dump(2)
        << '\n';
  } else {
    out << "wrote " << camp.records.size() << " records to " << f.out << '\n';
  }
  return kExitOk;
}

struct ReportFlags {
  std::string kind = "table4";
  std::vector<std::string> models;
  std::vector<std::string> thresholds;
};

int cmd_report(const Globals& g, const ReportFlags& f, std::ostream& out) {
  const TableKind kind = parse_table_kind(f.kind);
  std::vector<ModelSpec> models;
  for (const auto& m : f.models) models.push_back(parse_model_spec(m));
  if (models.empty()) models = reference_models();
  std::vector<double> thr;
  for (const auto& t : f.thresholds) thr.push_back(number(t));
  if (thr.empty()) {
    thr = kind == TableKind::Table4 ? std::vector{0.001, 0.005} : std::vector{0.001};
  }
  const RenderedTable t = render_table(kind, models, resolve_constants(g), thr);
  switch (g.mode()) {
    case Output::Json:
      out << Json{{"kind", f.kind}, {"thresholds", thr},
                  {"markdown", t.markdown}, {"csv", t.csv}}
                 .dump(2)
          << '\n';
      break;
    case Output::Csv:
      out << t.csv;
      break;
    case Output::Human:
      out << t.markdown;
      break;
  }
  const bool failed = t.csv.find("error:") != std::string::npos;
  return failed ? kExitOperation : kExitOk;
}

struct CurveFlags {
  std::string target;
  PointFlags point;
  std::string from, to, step;
  std::size_t points = 0;
};

int cmd_curve(const Globals& g, const CurveFlags& f, std::ostream& out,
              std::ostream& err) {
  const ScalingConstants c = resolve_constants(g);
  const double N = maybe(f.point.N).value_or(2.4e9);
  const double D = maybe(f.point.D).value_or(5e10);
  const double Na = maybe(f.point.Na).value_or(476e6);
  const double G = maybe(f.point.G).value_or(optimal_G(c));
  const double S = maybe(f.point.S).value_or(optimal_S(c).value);

  std::vector<double> xs, ys;
  std::vector<std::string> errors;
  std::string column;
  if (f.target == "frontier") {
    column = "C";
    FrontierFlags ff;
    ff.N = f.point.N.empty() ? "1e12" : f.point.N;
    ff.G = f.point.G;
    ff.S = f.point.S;
    if (!f.from.empty()) ff.from = f.from;
    if (!f.to.empty()) ff.to = f.to;
    if (f.points > 0) ff.points = f.points;
    const Frontier fr = frontier_for(c, ff);
    for (const auto& p : fr.points) {
      xs.push_back(p.C);
      ys.push_back(p.has_root ? p.L_star : std::nan(""));
      errors.push_back(p.has_root ? "" : "no interior optimum at this budget");
    }
  } else {
    double lo = 0, hi = 0, step = 0;
    if (f.target == "G") {
      column = "G", lo = 1, hi = 20, step = 0.1;
    } else if (f.target == "S") {
      column = "S", lo = 0, hi = 0.99, step = 0.01;
    } else if (f.target == "Na") {
      column = "Na/N", lo = 0.01, hi = 1, step = 0.01;
    } else {
      throw DomainError("curve target must be G, S, Na or frontier");
    }
    lo = maybe(f.from).value_or(lo);
    hi = maybe(f.to).value_or(hi);
    if (f.points > 1) {
      step = (hi - lo) / static_cast<double>(f.points - 1);
    } else {
      step = maybe(f.step).value_or(step);
    }
    if (!(step > 0) || !(hi >= lo)) {
      throw DomainError("curve grid needs from <= to and a positive step");
    }
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = lo + static_cast<double>(i) * step;
      FactorPoint p{N, D, Na, G, S};
      if (f.target == "G") p.G = x;
      if (f.target == "S") p.S = x;
      if (f.target == "Na") p.Na = x * N;
      xs.push_back(x);
      try {
        ys.push_back(eval_joint_loss(c, p));
        errors.emplace_back();
      } catch (const DomainError& e) {
        ys.push_back(std::nan(""));
        errors.emplace_back(e.what());
      }
    }
  }

  int status = kExitOk;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!errors[i].empty()) {
      err << "error: " << column << "=" << num(xs[i]) << ": " << errors[i] << '\n';
      status = kExitOperation;
    }
  }
  if (g.mode() == Output::Json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      rows.push_back({{"x", xs[i]},
                      {"loss", std::isfinite(ys[i]) ? Json(ys[i]) : Json(nullptr)}});
    }
    out << Json{{"target", f.target}, {"column", column}, {"points", rows}}.dump(2)
        << '\n';
  } else {
    out << column << ",loss\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << num(xs[i], 12) << ',' << (std::isfinite(ys[i]) ? num(ys[i], 12) : "")
          << '\n';
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

struct ConstantsFlags {
  std::string label;
  std::string from_json;
  std::string provenance;
};

int cmd_constants_list(const Globals& g, std::ostream& out) {
  const auto labels = open_registry(g).labels();
  if (g.mode() == Output::Json) {
    out << Json(labels).dump(2) << '\n';
  } else {
    for (const auto& l : labels) out << l << '\n';
  }
  return kExitOk;
}

int cmd_constants_show(const Globals& g, const ConstantsFlags& f,
                       std::ostream& out) {
  Globals copy = g;
  if (!f.label.empty()) copy.constants = f.label;
  const ScalingConstants c = resolve_constants(copy);
  const auto values = c.to_array();
  switch (g.mode()) {
    case Output::Json:
      out << Json{{"label", copy.constants}, {"constants", to_json(c)}}.dump(2)
          << '\n';
      break;
    case Output::Csv:
      for (std::size_t j = 0; j < values.size(); ++j) {
        out << ScalingConstants::kNames[j] << (j + 1 < values.size() ? "," : "\n");
      }
      for (std::size_t j = 0; j < values.size(); ++j) {
        out << num(values[j], 17) << (j + 1 < values.size() ? "," : "\n");
      }
      break;
    case Output::Human: {
      std::vector<std::pair<std::string, std::string>> rows;
      for (std::size_t j = 0; j < values.size(); ++j) {
        rows.emplace_back(std::string(ScalingConstants::kNames[j]), num(values[j], 8));
      }
      print_rows(out, rows);
      break;
    }
  }
  return kExitOk;
}

int cmd_constants_save(const Globals& g, const ConstantsFlags& f,
                       std::ostream& out) {
  ScalingConstants c;
  std::string provenance = f.provenance;
  if (!f.from_json.empty()) {
    c = constants_from_document(read_json_file(f.from_json), f.from_json);
    if (provenance.empty()) provenance = "imported from " + f.from_json;
  } else {
    c = resolve_constants(g);
    if (provenance.empty()) provenance = "copied from " + g.constants;
  }
  c.validate();
  const ConstantsRegistry reg = open_registry(g);
  reg.save(f.label, c, provenance);
  const auto path = reg.dir() / (f.label + ".json");
  if (g.mode() == Output::Json) {
    out << Json{{"label", f.label}, {"path", path.string()}}.dump(2) << '\n';
  } else {
    out << "saved '" << f.label << "' to " << path.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Joint MoE scaling-law workbench", "moelaw"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--constants", g.constants,
                 "registry label or JSON file with the twelve constants")
      ->capture_default_str();
  app.add_option("--registry", g.registry,
                 std::string("registry directory (default $") + kRegistryEnv +
                     " or ./moelaw-registry)");
  app.add_option("--output", g.output, "human, json or csv")
      ->check(CLI::IsMember({"human", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for fits and campaigns");

  PointFlags predict_flags;
  auto* predict = app.add_subcommand("predict", "joint-law loss at one point");
  predict_flags.add(predict);

  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit a law to experiment records");
  fit->add_option("--input", fit_flags.input, "CSV or JSON records");
  fit->add_option("--from-json", fit_flags.from_json,
                  "campaign JSON written by 'campaign --output json'");
  fit->add_option("--law", fit_flags.law,
                  "joint, ND, Na, NDNa, G, NDNaG, S, fine-grained or sparsity")
      ->capture_default_str();
  fit->add_flag("--staged", fit_flags.staged, "seed the joint fit from marginal fits");
  fit->add_option("--starts", fit_flags.starts)
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--max-iterations", fit_flags.max_iterations)
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--tolerance", fit_flags.tolerance)
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--objective", fit_flags.objective)
      ->check(CLI::IsMember({"squared", "huber"}))->capture_default_str();
  fit->add_option("--delta", fit_flags.delta, "Huber transition")
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--holdout", fit_flags.holdout,
                  "tag key=value excluded from the fit and scored separately");
  fit->add_flag("--no-reference-start", fit_flags.no_reference_start,
                "do not start from the built-in constants");
  fit->add_option("--bound", fit_flags.bounds, "name=lo:hi, repeatable");
  fit->add_option("--save", fit_flags.save, "store fitted constants under a label");

  OptimalFlags optimal_flags;
  auto* optimal = app.add_subcommand("optimal", "optimal G, S and activation ratio");
  optimal->add_option("--what", optimal_flags.what)
      ->check(CLI::IsMember({"G", "S", "ratio", "efficiency", "all"}))
      ->capture_default_str();
  add_number(optimal, "--N", optimal_flags.N, "total parameters");
  add_number(optimal, "--G", optimal_flags.G, "default: G_opt");
  add_number(optimal, "--S", optimal_flags.S, "default: S_opt");
  add_number(optimal, "--D", optimal_flags.D, "tokens for the efficiency scan");
  add_number(optimal, "--threshold", optimal_flags.threshold, "loss-gain threshold")
      ->capture_default_str();
  optimal->add_option("--max-steps", optimal_flags.max_steps)
      ->check(CLI::Range(2, 1000000))->capture_default_str();

  RangeFlags range_flags;
  auto* range = app.add_subcommand("range", "practical ranges of G and S");
  range->add_option("--what", range_flags.what)
      ->check(CLI::IsMember({"G", "S", "both"}))->capture_default_str();
  add_number(range, "--N", range_flags.N, "total parameters");
  add_number(range, "--Na", range_flags.Na, "activated parameters");
  add_number(range, "--threshold", range_flags.threshold, "tolerated loss gap")
      ->capture_default_str();

  FrontierFlags frontier_flags;
  auto* frontier = app.add_subcommand("frontier", "compute-optimal frontier");
  add_number(frontier, "--N", frontier_flags.N, "total parameters");
  add_number(frontier, "--G", frontier_flags.G, "default: G_opt");
  add_number(frontier, "--S", frontier_flags.S, "default: S_opt");
  add_number(frontier, "--from", frontier_flags.from, "smallest budget C = D*Na")
      ->capture_default_str();
  add_number(frontier, "--to", frontier_flags.to, "largest budget")
      ->capture_default_str();
  frontier->add_option("--points", frontier_flags.points)
      ->check(CLI::Range(2, 100000))->capture_default_str();

  ArchFlags arch_flags;
  auto* arch = app.add_subcommand("arch", "parameter counts of an architecture");
  arch_flags.add(arch);
  add_number(arch, "--u", arch_flags.u, "expert width multiplier (u-v scaling)");
  add_number(arch, "--D", arch_flags.D, "tokens, to emit a factor point");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "one-factor architecture sweep");
  sweep_flags.arch.add(sweep);
  sweep->add_option("--target", sweep_flags.target, "N, D, Na, G or S")->required();
  sweep->add_option("--levels", sweep_flags.levels, "comma-separated levels")
      ->delimiter(',')->check(kNumber)->required();

  CampaignFlags campaign_flags;
  auto* campaign = app.add_subcommand("campaign", "synthetic 446-run campaign");
  campaign->add_option("--sigma", campaign_flags.sigma, "Gaussian loss noise")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  campaign->add_option("--out", campaign_flags.out, "write to a file (.csv or .json)");

  ReportFlags report_flags;
  auto* report = app.add_subcommand("report", "render table3 or table4");
  report->add_option("--kind", report_flags.kind)
      ->check(CLI::IsMember({"table3", "table4"}))->capture_default_str();
  report->add_option("--model", report_flags.models,
                     "Name:Na:N, repeatable (default: the nine reference models)");
  report->add_option("--thresholds", report_flags.thresholds)
      ->delimiter(',')->check(kNumber);

  CurveFlags curve_flags;
  auto* curve = app.add_subcommand("curve", "loss along one factor, as CSV");
  curve->add_option("--target", curve_flags.target)
      ->check(CLI::IsMember({"G", "S", "Na", "frontier"}))->required();
  curve_flags.point.add(curve);
  add_number(curve, "--from", curve_flags.from, "first grid value");
  add_number(curve, "--to", curve_flags.to, "last grid value");
  add_number(curve, "--step", curve_flags.step, "grid step");
  curve->add_option("--points", curve_flags.points, "grid size (overrides --step)");

  ConstantsFlags constants_flags;
  auto* constants = app.add_subcommand("constants", "manage the constants registry");
  constants->require_subcommand(1);
  auto* c_list = constants->add_subcommand("list", "list labels");
  auto* c_show = constants->add_subcommand("show", "print one constant set");
  c_show->add_option("label", constants_flags.label);
  auto* c_save = constants->add_subcommand("save", "store a constant set");
  c_save->add_option("--label", constants_flags.label)->required();
  c_save->add_option("--from-json", constants_flags.from_json,
                     "constants, registry or fit JSON (default: --constants)");
  c_save->add_option("--provenance", constants_flags.provenance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n'
        << "run 'moelaw --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*predict) return cmd_predict(g, predict_flags, out);
    if (*fit) return cmd_fit(g, fit_flags, out, err);
    if (*optimal) return cmd_optimal(g, optimal_flags, out);
    if (*range) return cmd_range(g, range_flags, out);
    if (*frontier) return cmd_frontier(g, frontier_flags, out);
    if (*arch) return cmd_arch(g, arch_flags, out);
    if (*sweep) return cmd_sweep(g, sweep_flags, out, err);
    if (*campaign) return cmd_campaign(g, campaign_flags, out, err);
    if (*report) return cmd_report(g, report_flags, out);
    if (*curve) return cmd_curve(g, curve_flags, out, err);
    if (*c_list) return cmd_constants_list(g, out);
    if (*c_show) return cmd_constants_show(g, constants_flags, out);
    if (*c_save) return cmd_constants_save(g, constants_flags, out);
  } catch (const std::exception& e) {
    err << "error (" << describe(e) << "): " << e.what() << '\n';
    return kExitOperation;
  }
  return kExitUsage;
}

}  // namespace moelaw::cli
