// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "../law/law_detail.hpp"
#include "fitter_detail.hpp"
#include "moelaw/error.hpp"
#include "moelaw/fitter.hpp"

namespace moelaw {

namespace {

using detail::ParamRole;

bool is_offset(std::string_view model, std::string_view name) {
  if (name == "eps" || name == "iota" || name == "tau" || name == "psi" ||
      name == "e_offset") {
    return true;
  }
  return model == to_string(BaselineId::FineGrained) && name == "c";
}

struct ParamSpec {
  std::string name;
  ParamBounds bounds;
  ParamBounds start;  // sampling box
  bool log_scale = false;
  bool pinned = false;
  double value = 0;  // pinned value
};

struct Prepared {
  std::vector<ExperimentRecord> fit;
  std::vector<ExperimentRecord> holdout;
};

Prepared prepare(std::span<const ExperimentRecord> records,
                 const FitOptions& options) {
  std::string key, value;
  if (!options.holdout_tag.empty()) {
    const auto eq = options.holdout_tag.find('=');
    if (eq == std::string::npos) {
      throw DomainError("holdout tag must look like key=value");
    }
    key = options.holdout_tag.substr(0, eq);
    value = options.holdout_tag.substr(eq + 1);
  }
  std::vector<ExperimentRecord> fit, held;
  for (const auto& r : records) {
    validate(r.point);
    if (!(r.loss > 0) || !std::isfinite(r.loss)) {
      throw DomainError("record " + r.id + ": loss must be positive");
    }
    if (!key.empty() && r.has_tag(key, value)) {
      held.push_back(r);
    } else {
      fit.push_back(r);
    }
  }
  return {deduplicate(fit), deduplicate(held)};
}

std::size_t distinct_values(const std::vector<ExperimentRecord>& rs,
                            double (*get)(const FactorPoint&)) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(get(r.point));
  std::sort(v.begin(), v.end());
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == 0 || std::abs(v[i] - v[i - 1]) >
                      1e-12 * std::max(std::abs(v[i]), std::abs(v[i - 1]))) {
      ++n;
    }
  }
  return n;
}

double get_N(const FactorPoint& p) { return p.N; }
double get_D(const FactorPoint& p) { return p.D; }
double get_Na(const FactorPoint& p) { return p.Na; }
double get_G(const FactorPoint& p) { return p.G; }
double get_S(const FactorPoint& p) { return p.S; }
double get_ratio(const FactorPoint& p) { return p.Na / p.N; }

using Getter = double (*)(const FactorPoint&);

Getter getter(Factor f) {
  switch (f) {
    case Factor::N: return get_N;
    case Factor::D: return get_D;
    case Factor::Na: return get_Na;
    case Factor::G: return get_G;
    case Factor::S: return get_S;
  }
  return get_N;
}

[[noreturn]] void degenerate(const std::string& factor, std::string_view model,
                             std::size_t n) {
  throw DegenerateRecordsError(factor + " has a single value across all " +
                               std::to_string(n) + " records; the " +
                               std::string(model) +
                               " law cannot be identified");
}

ParamBounds start_box(std::string_view model, std::string_view name,
                      double min_loss) {
  if (is_offset(model, name)) return {0.5 * min_loss, min_loss};
  if (name == "n") return {-10.0, -1e-4};
  if (model == to_string(SubLawForm::NaOnly) && name == "h") {
    return {1e-14, 1e-8};
  }
  if (detail::role_of(name) == ParamRole::Exponent) return {0.1, 1.0};
  return {1e-3, 1e5};
}

std::vector<ParamSpec> make_specs(std::string_view model,
                                  std::span<const std::string_view> names,
                                  const std::function<ParamBounds(std::string_view)>& defaults,
                                  const FitOptions& options, double min_loss) {
  std::vector<ParamSpec> specs;
  for (auto name : names) {
    ParamSpec s;
    s.name = std::string(name);
    s.bounds = defaults(name);
    if (const auto it = options.bounds.find(s.name); it != options.bounds.end()) {
      s.bounds = it->second;
    }
    s.log_scale = detail::role_of(name) != ParamRole::Free &&
                  !is_offset(model, name);
    if (!(s.bounds.lo <= s.bounds.hi) || !std::isfinite(s.bounds.lo) ||
        !std::isfinite(s.bounds.hi) || (s.log_scale && !(s.bounds.lo > 0))) {
      throw DomainError("invalid bounds for parameter " + s.name);
    }
    ParamBounds box = start_box(model, name, min_loss);
    box.lo = std::clamp(box.lo, s.bounds.lo, s.bounds.hi);
    box.hi = std::clamp(box.hi, s.bounds.lo, s.bounds.hi);
    if (box.lo > box.hi) std::swap(box.lo, box.hi);
    s.start = box;
    specs.push_back(s);
  }
  return specs;
}

void pin(std::vector<ParamSpec>& specs, std::string_view name, bool at_hi) {
  for (auto& s : specs) {
    if (s.name == name) {
      s.pinned = true;
      s.value = at_hi ? s.bounds.hi : s.bounds.lo;
    }
  }
}

std::vector<double> sample_start(const std::vector<ParamSpec>& specs,
                                 std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x;
  for (const auto& s : specs) {
    const double t = u(rng);
    if (s.start.lo > 0 && s.log_scale) {
      x.push_back(std::exp(std::log(s.start.lo) +
                           t * (std::log(s.start.hi) - std::log(s.start.lo))));
    } else if (s.start.hi < 0 && s.start.lo < 0) {
      // Negative side, log-uniform in magnitude.
      const double a = std::log(-s.start.hi), b = std::log(-s.start.lo);
      x.push_back(-std::exp(a + t * (b - a)));
    } else {
      x.push_back(s.start.lo + t * (s.start.hi - s.start.lo));
    }
  }
  return x;
}

double mean_rho(const Objective& obj, const Eigen::VectorXd& pred,
                const std::vector<double>& observed) {
  double sum = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    sum += obj.rho(pred[static_cast<Eigen::Index>(i)] - observed[i]);
  }
  return observed.empty() ? 0.0 : sum / static_cast<double>(observed.size());
}

struct FitInputs {
  std::string model;
  std::vector<ParamSpec> specs;
  std::optional<std::vector<double>> reference;
  std::vector<std::string> warnings;
};

FitResult run_fit(FitInputs in, const Prepared& data,
                  const FitOptions& options) {
  if (options.starts < 1) throw DomainError("starts must be >= 1");
  if (options.max_iterations < 1) {
    throw DomainError("max_iterations must be >= 1");
  }
  if (options.objective.kind == Objective::Kind::Huber &&
      !(options.objective.delta > 0)) {
    throw DomainError("Huber delta must be > 0");
  }

  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < in.specs.size(); ++j) {
    if (!in.specs[j].pinned) free.push_back(j);
  }
  const std::size_t n = data.fit.size();
  if (n < 2 * free.size()) {
    throw InsufficientRecordsError(
        "the " + in.model + " law has " + std::to_string(free.size()) +
        " free parameters and needs at least " +
        std::to_string(2 * free.size()) + " distinct records, got " +
        std::to_string(n));
  }

  std::vector<FactorPoint> points;
  std::vector<double> observed;
  for (const auto& r : data.fit) {
    points.push_back(r.point);
    observed.push_back(r.loss);
  }
  const auto model = detail::make_model(in.model, points);
  const std::size_t p = in.specs.size();

  // Parameter vector <-> LM coordinates.
  const auto expand = [&](const Eigen::VectorXd& theta) {
    std::vector<double> full(p);
    for (std::size_t j = 0; j < p; ++j) full[j] = in.specs[j].value;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const auto& s = in.specs[free[k]];
      const double t = theta[static_cast<Eigen::Index>(k)];
      full[free[k]] = s.log_scale ? std::exp(t) : t;
    }
    return full;
  };
  const auto to_theta = [&](const std::vector<double>& full) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
      const auto& s = in.specs[free[k]];
      const double v = std::clamp(full[free[k]], s.bounds.lo, s.bounds.hi);
      theta[static_cast<Eigen::Index>(k)] = s.log_scale ? std::log(v) : v;
    }
    return theta;
  };
  Eigen::VectorXd lo(static_cast<Eigen::Index>(free.size()));
  Eigen::VectorXd hi(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto& s = in.specs[free[k]];
    lo[static_cast<Eigen::Index>(k)] = s.log_scale ? std::log(s.bounds.lo) : s.bounds.lo;
    hi[static_cast<Eigen::Index>(k)] = s.log_scale ? std::log(s.bounds.hi) : s.bounds.hi;
  }

  const Objective obj = options.objective;
  const detail::ResidualFn residuals = [&](const Eigen::VectorXd& theta,
                                           Eigen::VectorXd& r,
                                           Eigen::MatrixXd* jac) {
    const auto full = expand(theta);
    Eigen::VectorXd pred;
    Eigen::MatrixXd J;
    model->eval(full, pred, jac ? &J : nullptr);
    const auto rows = static_cast<Eigen::Index>(n);
    r.resize(rows);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double e = pred[i] - observed[static_cast<std::size_t>(i)];
      if (obj.kind == Objective::Kind::Huber && std::abs(e) > obj.delta) {
        // sqrt(2 rho) keeps 0.5 |r|^2 equal to the Huber sum.
        const double m = std::sqrt(2 * obj.delta * std::abs(e) -
                                   obj.delta * obj.delta);
        r[i] = std::copysign(m, e);
        scale[i] = obj.delta / m;
      } else {
        r[i] = e;
      }
    }
    if (jac) {
      jac->resize(rows, static_cast<Eigen::Index>(free.size()));
      for (std::size_t k = 0; k < free.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        const auto j = static_cast<Eigen::Index>(free[k]);
        const double chain = in.specs[free[k]].log_scale ? full[free[k]] : 1.0;
        jac->col(col) = J.col(j).cwiseProduct(scale) * chain;
      }
    }
  };

  // Start list: reference, caller's initial guess, then seeded samples.
  std::vector<std::vector<double>> starts;
  if (in.reference && options.include_reference_start) {
    starts.push_back(*in.reference);
  }
  if (options.initial) {
    if (options.initial->size() != p) {
      throw DomainError("initial guess has " +
                        std::to_string(options.initial->size()) +
                        " values; the " + in.model + " law has " +
                        std::to_string(p));
    }
    starts.push_back(*options.initial);
  }
  for (std::size_t i = starts.size();
       i < static_cast<std::size_t>(options.starts); ++i) {
    starts.push_back(sample_start(in.specs, options.seed, i));
  }
  starts.resize(static_cast<std::size_t>(options.starts));

  FitResult best;
  best.objective_value = std::numeric_limits<double>::infinity();
  detail::LmSettings settings;
  settings.max_iterations = options.max_iterations;
  settings.ftol = options.tolerance;

  std::vector<double> start_objectives;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto outcome = detail::levenberg_marquardt(
        residuals, to_theta(starts[s]), lo, hi, settings);
    const auto full = expand(outcome.x);
    Eigen::VectorXd pred;
    model->eval(full, pred, nullptr);
    double value = mean_rho(obj, pred, observed);
    if (!std::isfinite(value)) value = std::numeric_limits<double>::infinity();
    start_objectives.push_back(value);
    if (value < best.objective_value) {
      best.objective_value = value;
      best.params = full;
      best.best_start = static_cast<int>(s);
      best.converged = outcome.converged;
      best.iterations = outcome.iterations;
    }
  }
  if (best.params.empty()) {
    throw DomainError("every start of the " + in.model +
                      " fit produced a non-finite objective");
  }

  best.model = in.model;
  for (const auto& s : in.specs) {
    best.names.push_back(s.name);
    if (s.pinned) best.pinned.push_back(s.name);
  }
  best.start_objectives = std::move(start_objectives);
  best.warnings = std::move(in.warnings);

  Eigen::VectorXd pred;
  model->eval(best.params, pred, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = pred[static_cast<Eigen::Index>(i)];
    best.record_ids.push_back(data.fit[i].id);
    best.observed.push_back(observed[i]);
    best.predicted.push_back(yhat);
    best.residuals.push_back(yhat - observed[i]);
    best.mean_abs_error += std::abs(yhat - observed[i]);
    best.max_abs_error = std::max(best.max_abs_error, std::abs(yhat - observed[i]));
  }
  best.mean_abs_error /= static_cast<double>(n);
  if (in.model == to_string(SubLawForm::Joint)) {
    best.constants = ScalingConstants::from_array(
        std::span<const double, ScalingConstants::kCount>(best.params.data(),
                                                          best.params.size()));
  }
  if (!best.converged) {
    best.warnings.push_back("best start stopped at the iteration limit");
  }

  if (!options.holdout_tag.empty()) {
    double sum = 0, worst = 0;
    for (const auto& r : data.holdout) {
      const double yhat = predict(best, r.point);
      best.holdout_ids.push_back(r.id);
      best.holdout_observed.push_back(r.loss);
      best.holdout_predicted.push_back(yhat);
      sum += std::abs(yhat - r.loss);
      worst = std::max(worst, std::abs(yhat - r.loss));
    }
    if (!data.holdout.empty()) {
      best.holdout_mae = sum / static_cast<double>(data.holdout.size());
      best.holdout_max_abs_error = worst;
    } else {
      best.warnings.push_back("no record matched the holdout tag " +
                              options.holdout_tag);
    }
  }
  return best;
}

double min_loss(const Prepared& d) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : d.fit) m = std::min(m, r.loss);
  return std::isfinite(m) ? m : 1.0;
}

void few_values_warnings(const Prepared& d, std::span<const Factor> factors,
                         std::vector<std::string>& warnings) {
  for (Factor f : factors) {
    const std::size_t k = distinct_values(d.fit, getter(f));
    if (k >= 2 && k < 3) {
      warnings.push_back(std::string(to_string(f)) + " takes only " +
                         std::to_string(k) +
                         " distinct values; its terms are weakly identified");
    }
  }
}

// Smallest structure term over the box spanned by the records.
double structure_minimum(const ScalingConstants& c, const Prepared& d) {
  double g_lo = std::numeric_limits<double>::infinity(), g_hi = 0;
  double s_lo = std::numeric_limits<double>::infinity(), s_hi = -1;
  for (const auto& r : d.fit) {
    g_lo = std::min(g_lo, r.point.G);
    g_hi = std::max(g_hi, r.point.G);
    s_lo = std::min(s_lo, r.point.S);
    s_hi = std::max(s_hi, r.point.S);
  }
  const auto g_term = [&](double G) { return c.e * G + c.f / G; };
  const auto s_term = [&](double S) { return c.m * S * S + c.n * S; };
  double gmin = std::min(g_term(g_lo), g_term(g_hi));
  if (c.e > 0 && c.f > 0) {
    gmin = std::min(gmin, g_term(std::clamp(std::sqrt(c.f / c.e), g_lo, g_hi)));
  }
  double smin = std::min(s_term(s_lo), s_term(s_hi));
  if (c.m > 0) smin = std::min(smin, s_term(std::clamp(-c.n / (2 * c.m), s_lo, s_hi)));
  return gmin + smin;
}

}  // namespace

double Objective::rho(double r) const {
  const double a = std::abs(r);
  if (kind == Kind::SquaredError || a <= delta) return 0.5 * r * r;
  return delta * (a - 0.5 * delta);
}

ParamBounds default_bounds(SubLawForm form, std::string_view name) {
  if (detail::role_of(name) == ParamRole::Exponent) return {0.05, 1.5};
  if (name == "n") return {-100.0, 0.0};
  if (name == "eps") return {0.1, 5.0};
  if (name == "iota" || name == "tau" || name == "psi") return {-10.0, 10.0};
  if (form == SubLawForm::NaOnly && name == "h") return {1e-20, 1.0};
  return {1e-6, 1e6};
}

ParamBounds default_bounds(BaselineId id, std::string_view name) {
  if (detail::role_of(name) == ParamRole::Exponent) return {0.05, 1.5};
  if (name == "e_offset") return {-10.0, 10.0};
  if (id == BaselineId::FineGrained && name == "c") return {0.1, 5.0};
  return {1e-6, 1e6};
}

FitResult fit_sub_law(SubLawForm form,
                      std::span<const ExperimentRecord> records,
                      const FitOptions& options) {
  if (form == SubLawForm::Joint) return fit_joint(records, options);
  const Prepared data = prepare(records, options);
  const std::string model(to_string(form));
  for (Factor f : referenced_factors(form)) {
    if (distinct_values(data.fit, getter(f)) < 2) {
      degenerate(std::string(to_string(f)), model, data.fit.size());
    }
  }
  FitInputs in;
  in.model = model;
  in.specs = make_specs(
      model, parameter_names(form),
      [form](std::string_view n) { return default_bounds(form, n); }, options,
      min_loss(data));
  few_values_warnings(data, referenced_factors(form), in.warnings);
  return run_fit(std::move(in), data, options);
}

FitResult fit_joint(std::span<const ExperimentRecord> records,
                    const FitOptions& options) {
  const Prepared data = prepare(records, options);
  const std::string model(to_string(SubLawForm::Joint));
  for (Factor f : {Factor::N, Factor::D, Factor::Na}) {
    if (distinct_values(data.fit, getter(f)) < 2) {
      degenerate(std::string(to_string(f)), model, data.fit.size());
    }
  }
  FitInputs in;
  in.model = model;
  in.specs = make_specs(
      model, parameter_names(SubLawForm::Joint),
      [](std::string_view n) { return default_bounds(SubLawForm::Joint, n); },
      options, min_loss(data));
  const auto ref = ScalingConstants{}.to_array();
  in.reference = std::vector<double>(ref.begin(), ref.end());

  if (distinct_values(data.fit, get_S) < 2) {
    // mS^2 + nS is constant: hold both at the bound nearest zero.
    pin(in.specs, "m", false);
    pin(in.specs, "n", true);
    in.warnings.push_back(
        "S has no spread; m and n are unidentifiable and pinned to their "
        "bounds");
  }
  if (distinct_values(data.fit, get_G) < 2) {
    in.warnings.push_back(
        "G has no spread; e and f are only identified through eG + f/G at one "
        "G");
  }
  if (distinct_values(data.fit, get_ratio) < 2) {
    in.warnings.push_back("Na/N has no spread; h is weakly identified");
  }
  few_values_warnings(data, referenced_factors(SubLawForm::Joint), in.warnings);

  FitResult r = run_fit(std::move(in), data, options);
  const double smin = structure_minimum(*r.constants, data);
  if (!(smin > 0)) {
    r.warnings.push_back(
        "fitted eG + f/G + mS^2 + nS is not positive everywhere on the record "
        "hull (minimum " + std::to_string(smin) + ")");
  }
  return r;
}

FitResult fit_baseline(BaselineId id, std::span<const ExperimentRecord> records,
                       const FitOptions& options) {
  const Prepared data = prepare(records, options);
  const std::string model(to_string(id));
  FitInputs in;
  in.model = model;
  in.specs = make_specs(
      model, parameter_names(id),
      [id](std::string_view n) { return default_bounds(id, n); }, options,
      min_loss(data));
  const Factor size = id == BaselineId::FineGrained ? Factor::Na : Factor::N;
  for (Factor f : {size, Factor::D}) {
    if (distinct_values(data.fit, getter(f)) < 2) {
      degenerate(std::string(to_string(f)), model, data.fit.size());
    }
  }
  if (id == BaselineId::FineGrained) {
    if (distinct_values(data.fit, get_G) < 2) {
      pin(in.specs, "gamma", false);
      in.warnings.push_back(
          "G has no spread; gamma is unidentifiable and pinned to its lower "
          "bound");
    }
  } else if (distinct_values(data.fit, get_ratio) < 2) {
    pin(in.specs, "lambda", false);
    pin(in.specs, "delta", false);
    in.warnings.push_back(
        "sparsity has no spread; lambda and delta are unidentifiable and "
        "pinned to their lower bounds");
  }
  return run_fit(std::move(in), data, options);
}

double evaluate_objective(const FitResult& result,
                          std::span<const ExperimentRecord> records,
                          const FitOptions& options) {
  const Prepared data = prepare(records, options);
  std::vector<FactorPoint> points;
  std::vector<double> observed;
  for (const auto& r : data.fit) {
    points.push_back(r.point);
    observed.push_back(r.loss);
  }
  const auto model = detail::make_model(result.model, points);
  Eigen::VectorXd pred;
  model->eval(result.params, pred, nullptr);
  return mean_rho(options.objective, pred, observed);
}

double predict(const FitResult& result, const FactorPoint& p) {
  if (result.model == to_string(BaselineId::FineGrained) ||
      result.model == to_string(BaselineId::Sparsity)) {
    const BaselineId id = parse_baseline_id(result.model);
    return eval_baseline({id, result.params}, baseline_inputs(id, p));
  }
  const SubLawForm form = parse_sub_law_form(result.model);
  if (form == SubLawForm::Joint) {
    const ScalingConstants c =
        result.constants ? *result.constants
                         : SubLawParams{form, result.params}.to_constants();
    return eval_joint_loss(c, p);
  }
  return eval_sub_law({form, result.params}, p);
}

}  // namespace moelaw
