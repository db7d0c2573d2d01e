// taylor: command-line surface over the taylor_core library.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "io.hpp"
#include "taylor/error.hpp"
#include "taylor/geometry.hpp"

namespace taylor::cli {
namespace {

enum class Kind { Number, Integer, Text, Document, Sequence, Function, Set, Flag };

struct OptionSpec {
  std::string name;
  Kind kind;
  std::string help;
  bool required = false;
  std::string fallback;
};

/// Typed access to the parsed options of one invocation.
class Inputs {
 public:
  Inputs(std::map<std::string, Kind> kinds, std::map<std::string, std::string> values, std::set<std::string> given)
      : kinds_(std::move(kinds)), values_(std::move(values)), given_(std::move(given)) {}

  bool has(const std::string& name) const { return values_.count(name) > 0 && !values_.at(name).empty(); }
  bool flag(const std::string& name) const { return given_.count(name) > 0; }

  const std::string& text(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end() || it->second.empty()) {
      throw InputError("--" + name + ": required");
    }
    return it->second;
  }

  double number(const std::string& name) const {
    const std::string& s = text(name);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) {
      throw InputError("--" + name + ": '" + s + "' is not a number");
    }
    return v;
  }

  std::uint64_t integer(const std::string& name) const {
    const std::string& s = text(name);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InputError("--" + name + ": '" + s + "' is not a nonnegative integer");
    }
    return v;
  }

  json document(const std::string& name) const {
    if (!documents_.count(name)) {
      documents_[name] = read_document(text(name), "--" + name);
    }
    return documents_.at(name);
  }

  CoefficientSequence sequence(const std::string& name) const {
    const std::string& s = text(name);
    const json j = is_sequence_name(s) ? json(s) : document(name);
    return parse_sequence(j, "--" + name);
  }

  AnalyticRep function(const std::string& name) const {
    const std::string& s = text(name);
    const json j = is_builtin_name(s) ? json(s) : document(name);
    return parse_function(j, "--" + name);
  }

  /// The document behind a function option, with builtin names as strings.
  json function_document(const std::string& name) const {
    const std::string& s = text(name);
    return is_builtin_name(s) ? json(s) : document(name);
  }

  NatSet set(const std::string& name) const { return parse_set_argument(text(name), "--" + name); }

  std::pair<double, double> interval(const std::string& name) const {
    const std::string& s = text(name);
    const std::size_t comma = s.find(',');
    try {
      std::size_t u1 = 0;
      std::size_t u2 = 0;
      if (comma != std::string::npos) {
        const double a = std::stod(s.substr(0, comma), &u1);
        const double b = std::stod(s.substr(comma + 1), &u2);
        if (u1 == comma && u2 == s.size() - comma - 1 && a < b) {
          return {a, b};
        }
      }
    } catch (const std::exception&) {
    }
    throw InputError("--" + name + ": expected A,B with A < B");
  }

  /// Options as given (or defaulted), documents embedded as parsed JSON.
  json echo() const {
    json out = json::object();
    for (const auto& [name, value] : values_) {
      if (value.empty() && !given_.count(name)) {
        continue;
      }
      const Kind k = kinds_.at(name);
      if (k == Kind::Flag) {
        if (given_.count(name)) {
          out[name] = true;
        }
      } else if (k == Kind::Document || (k == Kind::Sequence && !is_sequence_name(value)) ||
                 (k == Kind::Function && !is_builtin_name(value)) ||
                 (k == Kind::Set && is_document_argument(value))) {
        out[name] = document(name);
      } else {
        out[name] = value;
      }
    }
    return out;
  }

 private:
  static bool is_sequence_name(const std::string& s) { return s == "one" || s == "identity" || s == "even"; }
  static bool is_builtin_name(const std::string& s) {
    return s == "exp" || s == "sin" || s == "cos" || s == "geometric" || s == "identity";
  }
  static bool is_document_argument(const std::string& s) {
    return s == "-" || (!s.empty() && (s.front() == '{' || s.front() == '[')) ||
           (s.find(':') == std::string::npos && s != "all" && s != "empty" &&
            s.find_first_not_of("0123456789,") != std::string::npos);
  }

  std::map<std::string, Kind> kinds_;
  std::map<std::string, std::string> values_;
  std::set<std::string> given_;
  mutable std::map<std::string, json> documents_;
};

struct Context {
  unsigned threads = 1;
  std::optional<CsvWriter> csv;
};

using Handler = std::function<json(const Inputs&, Context&)>;

struct Command {
  std::string name;
  std::string description;
  std::vector<OptionSpec> options;
  bool randomized = false;
  Handler run;
};

RngSpec rng_of(const Inputs& in) { return {in.integer("seed"), in.integer("stream")}; }

double eps_of(const Inputs& in) {
  const double eps = in.number("eps");
  if (!(eps > 0.0)) {
    throw InputError("--eps: must be positive");
  }
  return eps;
}

std::size_t positive(const Inputs& in, const std::string& name) {
  const std::uint64_t v = in.integer(name);
  if (v == 0) {
    throw InputError("--" + name + ": must be at least 1");
  }
  return static_cast<std::size_t>(v);
}

json estimate_json(const McEstimate& e) {
  const McComponents& c = e.components;
  return {{"point", e.point},
          {"stderr", e.std_error},
          {"n_samples", e.n_samples},
          {"numerical_error", e.numerical_error},
          {"components",
           {{"mass_pos", to_json(c.mass_pos)},
            {"mass_neg", to_json(c.mass_neg)},
            {"mass_pos_stderr", c.mass_pos_stderr},
            {"mass_neg_stderr", c.mass_neg_stderr},
            {"fraction_pos", c.fraction_pos},
            {"fraction_neg", c.fraction_neg},
            {"fraction_pos_stderr", c.fraction_pos_stderr},
            {"fraction_neg_stderr", c.fraction_neg_stderr},
            {"normalizers_estimated", c.normalizers_estimated}}}};
}

json coefficients_json(const CoefficientSequence& a, std::size_t degree) {
  json out = json::array();
  for (std::size_t n = 0; n <= degree; ++n) {
    out.push_back(a.at(n));
  }
  return out;
}

json rep_json(const AnalyticRep& rep, std::size_t degree) {
  return {{"name", rep.name},
          {"center", rep.center},
          {"radius", std::isinf(rep.radius_hint) ? json("inf") : json(rep.radius_hint)},
          {"certificate", to_json(rep.coefficients.certificate())},
          {"coefficients", coefficients_json(rep.coefficients, degree)}};
}

std::function<double(double)> oracle_for(const Inputs& in, const AnalyticRep& rep) {
  if (in.has("oracle")) {
    return builtin_reference(in.text("oracle"));
  }
  const json f = in.function_document("fn");
  if (f.is_string()) {
    return builtin_reference(f.get<std::string>());
  }
  if (f.is_object() && f.contains("builtin") && f.at("builtin").is_string()) {
    std::vector<double> params;
    if (f.contains("params")) {
      params = f.at("params").get<std::vector<double>>();
    }
    return builtin_reference(f.at("builtin").get<std::string>(), params);
  }
  throw InputError("--oracle: required for a non-builtin function " + rep.name);
}

const OptionSpec kMeasure{"measure", Kind::Document, "measure description (path, '-' or inline JSON)", true, ""};
const OptionSpec kMeasure2{"measure2", Kind::Document, "second measure description", true, ""};
const OptionSpec kSet{"set", Kind::Set, "set: all, empty, 0,1,2, cofinite:0, range:2-9 or a document", false, "all"};
const OptionSpec kFn{"fn", Kind::Function, "function: builtin name or description", true, ""};

std::vector<Command> commands() {
  std::vector<Command> out;

  out.push_back({"eval", "T(B) with a certified error", {kMeasure, kSet}, false, [](const Inputs& in, Context&) {
                   const TaylorMeasure T = parse_measure(in.document("measure"), "--measure");
                   json r = to_json(evaluate(T, in.set("set"), eps_of(in)));
                   r["certificate"] = to_json(T.certificate());
                   return r;
                 }});

  out.push_back({"decompose",
                 "Jordan decomposition T = T+ - T- on a set",
                 {kMeasure, kSet, {"upto", Kind::Integer, "last index listed in the Hahn table", false, "20"}},
                 false,
                 [](const Inputs& in, Context& ctx) {
                   const TaylorMeasure T = parse_measure(in.document("measure"), "--measure");
                   const NatSet B = in.set("set");
                   const double eps = eps_of(in);
                   const JordanPair J = jordan_decompose(T);
                   const std::size_t upto = in.integer("upto");
                   json hahn = json::array();
                   if (ctx.csv) {
                     ctx.csv->row({"n", "term", "side"});
                   }
                   for (std::size_t n = 0; n <= upto; ++n) {
                     const bool pos = J.hahn_positive(n);
                     if (pos) {
                       hahn.push_back(n);
                     }
                     if (ctx.csv) {
                       ctx.csv->row({std::to_string(n), csv_number(T.term_value(n)), pos ? "positive" : "negative"});
                     }
                   }
                   return json{{"pos_mass", to_json(J.positive(B, eps))},
                               {"neg_mass", to_json(J.negative(B, eps))},
                               {"value", to_json(evaluate(T, B, eps))},
                               {"total_variation", to_json(total_variation(T, B, eps))},
                               {"hahn_positive_upto", hahn}};
                 }});

  out.push_back({"tv", "total variation |T|(B)", {kMeasure, kSet}, false, [](const Inputs& in, Context&) {
                   return to_json(total_variation(parse_measure(in.document("measure"), "--measure"), in.set("set"),
                                                  eps_of(in)));
                 }});

  out.push_back({"inner", "inner product rho(T1, T2)(B)", {kMeasure, kMeasure2, kSet}, false,
                 [](const Inputs& in, Context&) {
                   return to_json(inner_product(parse_measure(in.document("measure"), "--measure"),
                                                parse_measure(in.document("measure2"), "--measure2"), in.set("set"),
                                                eps_of(in)));
                 }});

  out.push_back({"norm", "rho-norm of T on B", {kMeasure, kSet}, false, [](const Inputs& in, Context&) {
                   return to_json(norm(parse_measure(in.document("measure"), "--measure"), in.set("set"), eps_of(in)));
                 }});

  out.push_back({"dist", "rho-distance between two measures", {kMeasure, kMeasure2, kSet}, false,
                 [](const Inputs& in, Context&) {
                   return to_json(distance(parse_measure(in.document("measure"), "--measure"),
                                           parse_measure(in.document("measure2"), "--measure2"), in.set("set"),
                                           eps_of(in)));
                 }});

  out.push_back({"pmf",
                 "power-series pmf f(n | zeta, b): table, quantile and set probability",
                 {{"zeta", Kind::Number, "zeta >= 0", true, ""},
                  {"b", Kind::Sequence, "b: one, identity, even or a coefficient description", false, "one"},
                  {"upto", Kind::Integer, "last tabulated index (default: min(horizon, 50))", false, ""},
                  {"quantile", Kind::Number, "level u in [0, 1]", false, ""},
                  {"set", Kind::Set, "set whose probability is reported", false, ""}},
                 false,
                 [](const Inputs& in, Context& ctx) {
                   const double eps = eps_of(in);
                   const PowerSeriesPmf p(in.number("zeta"), in.sequence("b"), eps);
                   const std::size_t upto =
                       in.has("upto") ? in.integer("upto") : std::min<std::size_t>(p.horizon(), 50);
                   json pmf = json::array();
                   json cdf = json::array();
                   if (ctx.csv) {
                     ctx.csv->row({"n", "pmf", "cdf"});
                   }
                   for (std::size_t n = 0; n <= upto; ++n) {
                     pmf.push_back(p.pmf(n));
                     cdf.push_back(p.cdf(n));
                     if (ctx.csv) {
                       ctx.csv->row({std::to_string(n), csv_number(p.pmf(n)), csv_number(p.cdf(n))});
                     }
                   }
                   json r{{"normalizer", to_json(p.normalizer())}, {"horizon", p.horizon()}, {"pmf", pmf}, {"cdf", cdf}};
                   if (in.has("quantile")) {
                     r["quantile"] = p.quantile(in.number("quantile"));
                   }
                   if (in.has("set")) {
                     r["probability"] = to_json(p.probability(in.set("set"), eps));
                   }
                   return r;
                 }});

  out.push_back({"sample",
                 "iid draws from f(n | zeta, b)",
                 {{"zeta", Kind::Number, "zeta >= 0", true, ""},
                  {"b", Kind::Sequence, "b: one, identity, even or a coefficient description", false, "one"},
                  {"L", Kind::Integer, "number of draws", true, ""},
                  {"sampler", Kind::Text, "auto, inverse or rejection", false, "auto"}},
                 true,
                 [](const Inputs& in, Context& ctx) {
                   const PowerSeriesPmf p(in.number("zeta"), in.sequence("b"), eps_of(in));
                   const std::string name = in.text("sampler");
                   SampleOptions opts;
                   opts.threads = ctx.threads;
                   if (name == "inverse") {
                     opts.kind = SamplerKind::InverseCdf;
                   } else if (name == "rejection") {
                     opts.kind = SamplerKind::Rejection;
                   } else if (name != "auto") {
                     throw InputError("--sampler: expected auto, inverse or rejection");
                   }
                   const Draws d = sample_pmf(p, rng_of(in), positive(in, "L"), opts);
                   std::vector<double> values(d.values.begin(), d.values.end());
                   const std::size_t top = d.values.empty() ? 0 : *std::max_element(d.values.begin(), d.values.end());
                   std::vector<std::uint64_t> counts(top + 1, 0);
                   for (std::size_t v : d.values) {
                     ++counts[v];
                   }
                   if (ctx.csv) {
                     ctx.csv->row({"index", "value"});
                     for (std::size_t i = 0; i < d.values.size(); ++i) {
                       ctx.csv->row({std::to_string(i), std::to_string(d.values[i])});
                     }
                   }
                   return json{{"summary", to_json(summarize(values))},
                               {"counts", counts},
                               {"sampler", d.used == SamplerKind::Rejection ? "rejection" : "inverse"},
                               {"proposals", d.proposals},
                               {"acceptance_rate", d.acceptance_rate()}};
                 }});

  out.push_back({"mc-measure",
                 "Monte Carlo estimate of T(B) from two power-series pmfs",
                 {{"zeta1", Kind::Number, "positive-side zeta", true, ""},
                  {"b1", Kind::Sequence, "positive-side b", false, "one"},
                  {"zeta2", Kind::Number, "negative-side zeta", true, ""},
                  {"b2", Kind::Sequence, "negative-side b", false, "one"},
                  kSet,
                  {"L", Kind::Integer, "draws per side", false, "10000"},
                  {"L1", Kind::Integer, "positive-side draws (overrides --L)", false, ""},
                  {"L2", Kind::Integer, "negative-side draws (overrides --L)", false, ""},
                  {"estimate-normalizers", Kind::Flag, "estimate T+(N) and T-(N) by Monte Carlo", false, ""},
                  {"replications", Kind::Integer, "coverage calibration over this many replications", false, ""},
                  {"exact", Kind::Number, "exact value for calibration", false, ""},
                  {"k-sigma", Kind::Number, "calibration band in standard errors", false, "3"}},
                 true,
                 [](const Inputs& in, Context& ctx) {
                   McOptions opts;
                   opts.threads = ctx.threads;
                   opts.eps = eps_of(in);
                   opts.estimate_normalizers = in.flag("estimate-normalizers");
                   const CoefficientSequence b1 = in.sequence("b1");
                   const CoefficientSequence b2 = in.sequence("b2");
                   const NatSet B = in.set("set");
                   const std::size_t L = positive(in, "L");
                   if (in.has("replications")) {
                     if (!in.has("exact")) {
                       throw InputError("--exact: required with --replications");
                     }
                     const CoverageReport r =
                         calibrate_coverage(in.number("zeta1"), b1, in.number("zeta2"), b2, B, L,
                                            positive(in, "replications"), in.number("exact"), rng_of(in), opts,
                                            in.number("k-sigma"));
                     if (ctx.csv) {
                       ctx.csv->row({"replication", "point", "stderr", "covered"});
                       for (const CoverageRow& row : r.rows) {
                         ctx.csv->row({std::to_string(row.replication), csv_number(row.point),
                                       csv_number(row.std_error), row.covered ? "1" : "0"});
                       }
                     }
                     return json{{"replications", r.rows.size()},
                                 {"covered", r.covered},
                                 {"exact", r.exact},
                                 {"k_sigma", r.k_sigma}};
                   }
                   const std::size_t L1 = in.has("L1") ? positive(in, "L1") : L;
                   const std::size_t L2 = in.has("L2") ? positive(in, "L2") : L;
                   return estimate_json(
                       estimate_measure(in.number("zeta1"), b1, in.number("zeta2"), b2, B, L1, L2, rng_of(in), opts));
                 }});

  out.push_back({"mc-normalizer",
                 "Monte Carlo estimate of sum b_n zeta^n / n! with Poisson draws",
                 {{"zeta", Kind::Number, "zeta > 0", true, ""},
                  {"b", Kind::Sequence, "b: one, identity, even or a coefficient description", false, "one"},
                  {"L", Kind::Integer, "number of draws", true, ""}},
                 true,
                 [](const Inputs& in, Context& ctx) {
                   return estimate_json(estimate_normalizer_poisson(in.number("zeta"), in.sequence("b"),
                                                                    positive(in, "L"), rng_of(in), ctx.threads));
                 }});

  out.push_back({"stm-moments",
                 "closed-form mean and variance of a stochastic Taylor measure",
                 {{"spec", Kind::Document, "stochastic measure description", true, ""},
                  kSet,
                  {"time", Kind::Number, "time in [0, 1] for the Brownian approximation", false, ""}},
                 false,
                 [](const Inputs& in, Context&) {
                   const StmSpec spec = parse_stm(in.document("spec"), "--spec");
                   StmMoments m;
                   if (const auto* b = std::get_if<stm::BrownianApprox>(&spec); b && in.has("time")) {
                     validate(spec);
                     m = brownian_moments_at(*b, in.number("time"));
                   } else {
                     m = stm_moments(spec, in.set("set"), eps_of(in));
                   }
                   return json{{"mean", m.mean},
                               {"variance", m.variance},
                               {"mean_error", m.mean_error},
                               {"variance_error", m.variance_error}};
                 }});

  out.push_back({"stm-sim",
                 "replications of X(B), or one path with --path",
                 {{"spec", Kind::Document, "stochastic measure description", true, ""},
                  kSet,
                  {"reps", Kind::Integer, "number of replications", false, "1"},
                  {"path", Kind::Flag, "simulate one path (random_walk, ar1, brownian)", false, ""}},
                 true,
                 [](const Inputs& in, Context& ctx) {
                   const StmSpec spec = parse_stm(in.document("spec"), "--spec");
                   if (in.flag("path")) {
                     SamplePath p;
                     if (const auto* rw = std::get_if<stm::RandomWalk>(&spec)) {
                       p = simulate_random_walk(*rw, rng_of(in));
                     } else if (const auto* ar = std::get_if<stm::Ar1>(&spec)) {
                       p = simulate_ar1(*ar, rng_of(in));
                     } else if (const auto* br = std::get_if<stm::BrownianApprox>(&spec)) {
                       p = simulate_brownian(*br, rng_of(in));
                     } else {
                       throw Error(ErrorKind::UnsupportedSpec, "paths exist for random_walk, ar1 and brownian");
                     }
                     if (ctx.csv) {
                       ctx.csv->row({"time", "value"});
                       for (std::size_t i = 0; i < p.times.size(); ++i) {
                         ctx.csv->row({csv_number(p.times[i]), csv_number(p.values[i])});
                       }
                     }
                     return json{{"times", p.times}, {"values", p.values}};
                   }
                   const NatSet B = in.set("set");
                   std::optional<TruncationPlan> plan;
                   if (!B.is_finite() && !support_last(spec)) {
                     plan = stm_truncation_plan(spec, eps_of(in));
                   }
                   const std::vector<double> x =
                       replicate_stm(spec, B, plan, positive(in, "reps"), rng_of(in), ctx.threads);
                   if (ctx.csv) {
                     ctx.csv->row({"replication", "value"});
                     for (std::size_t i = 0; i < x.size(); ++i) {
                       ctx.csv->row({std::to_string(i), csv_number(x[i])});
                     }
                   }
                   json r{{"summary", to_json(summarize(x))}};
                   if (plan) {
                     r["truncation"] = {{"N", plan->N}, {"tail_bound", plan->tail_bound}};
                   }
                   if (x.size() <= 100) {
                     r["values"] = x;
                   }
                   return r;
                 }});

  out.push_back({"fn-eval",
                 "evaluate an analytic representation at a point or on a grid",
                 {kFn,
                  {"x", Kind::Number, "evaluation point", false, ""},
                  {"interval", Kind::Text, "A,B for a grid table", false, ""},
                  {"grid", Kind::Integer, "grid points on the interval", false, "1001"}},
                 false,
                 [](const Inputs& in, Context& ctx) {
                   const AnalyticRep rep = in.function("fn");
                   const double eps = eps_of(in);
                   json r;
                   if (in.has("x")) {
                     r = to_json(eval(rep, in.number("x"), eps));
                   }
                   if (in.has("interval")) {
                     const auto [a, b] = in.interval("interval");
                     const std::size_t m = in.integer("grid");
                     if (m < 2) {
                       throw InputError("--grid: must be at least 2");
                     }
                     if (ctx.csv) {
                       ctx.csv->row({"x", "value", "abs_error"});
                     }
                     double worst = 0.0;
                     for (std::size_t i = 0; i < m; ++i) {
                       const double x = i + 1 == m ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1);
                       const MeasureValue v = eval(rep, x, eps);
                       worst = std::max(worst, v.abs_error);
                       if (ctx.csv) {
                         ctx.csv->row({csv_number(x), csv_number(v.value), csv_number(v.abs_error)});
                       }
                     }
                     r["grid_points"] = m;
                     r["max_abs_error"] = worst;
                   }
                   if (r.is_null()) {
                     throw InputError("--x or --interval: one is required");
                   }
                   return r;
                 }});

  out.push_back({"fn-mul",
                 "product of two representations",
                 {kFn,
                  {"fn2", Kind::Function, "second function", true, ""},
                  {"degree", Kind::Integer, "last coefficient reported", false, "10"},
                  {"x", Kind::Number, "evaluation point", false, ""}},
                 false,
                 [](const Inputs& in, Context&) {
                   const AnalyticRep p = multiply(in.function("fn"),
                                                  in.function("fn2"));
                   json r = rep_json(p, in.integer("degree"));
                   if (in.has("x")) {
                     r["eval"] = to_json(eval(p, in.number("x"), eps_of(in)));
                   }
                   return r;
                 }});

  out.push_back({"fn-recenter",
                 "Taylor shift to a new center",
                 {kFn,
                  {"center", Kind::Number, "new center", true, ""},
                  {"degree", Kind::Integer, "last coefficient reported", false, "10"},
                  {"x", Kind::Number, "evaluation point", false, ""}},
                 false,
                 [](const Inputs& in, Context&) {
                   const double eps = eps_of(in);
                   const AnalyticRep r1 = recenter(in.function("fn"), in.number("center"), eps);
                   json r = rep_json(r1, in.integer("degree"));
                   if (in.has("x")) {
                     r["eval"] = to_json(eval(r1, in.number("x"), eps));
                   }
                   return r;
                 }});

  out.push_back({"fn-supdist",
                 "grid sup-distance between a representation and a reference",
                 {kFn,
                  {"degree", Kind::Integer, "truncate the representation at this degree", false, ""},
                  {"oracle", Kind::Text, "reference builtin (default: the function's builtin)", false, ""},
                  {"interval", Kind::Text, "A,B", false, "0,1"},
                  {"grid", Kind::Integer, "grid points", false, "1001"}},
                 false,
                 [](const Inputs& in, Context&) {
                   AnalyticRep rep = in.function("fn");
                   const auto oracle = oracle_for(in, rep);
                   if (in.has("degree")) {
                     rep = truncate(rep, in.integer("degree"));
                   }
                   const auto [a, b] = in.interval("interval");
                   const std::size_t m = in.integer("grid");
                   if (m < 2) {
                     throw InputError("--grid: must be at least 2");
                   }
                   return json{{"sup_distance", sup_distance_on_grid(rep, oracle, a, b, m, eps_of(in))}};
                 }});

  out.push_back({"fn-lpnorm",
                 "L^p norm on a compact interval",
                 {kFn, {"p", Kind::Number, "p >= 1", false, "2"}, {"interval", Kind::Text, "A,B", false, "0,1"}},
                 false,
                 [](const Inputs& in, Context&) {
                   const auto [a, b] = in.interval("interval");
                   return json{{"norm", lp_norm_on_interval(in.function("fn"),
                                                            in.number("p"), a, b, eps_of(in))}};
                 }});

  out.push_back({"axioms",
                 "inner-product axiom residuals over measures",
                 {{"measures", Kind::Document, "array of measure descriptions", false, ""},
                  {"random", Kind::Integer, "use this many random geometric-tail measures", false, ""},
                  {"seed", Kind::Integer, "seed for --random and the bilinearity weights", false, "0"},
                  kSet},
                 false,
                 [](const Inputs& in, Context&) {
                   std::vector<TaylorMeasure> samples;
                   if (in.has("measures")) {
                     const json arr = in.document("measures");
                     if (!arr.is_array()) {
                       throw InputError("--measures: expected an array of measure descriptions");
                     }
                     for (std::size_t i = 0; i < arr.size(); ++i) {
                       samples.push_back(parse_measure(arr[i], "--measures[" + std::to_string(i) + "]"));
                     }
                   } else if (in.has("random")) {
                     std::mt19937_64 rng(in.integer("seed"));
                     std::uniform_real_distribution<double> u(-1.0, 1.0);
                     for (std::uint64_t i = 0; i < in.integer("random"); ++i) {
                       samples.emplace_back(CoefficientSequence({u(rng), u(rng), u(rng)},
                                                                CoefficientSequence::GeometricTail{u(rng), 1.5 * u(rng)}),
                                            2.0 * u(rng));
                     }
                   } else {
                     throw InputError("--measures or --random: one is required");
                   }
                   const HilbertAxiomReport r =
                       hilbert_axiom_report(samples, in.set("set"), eps_of(in), in.integer("seed"));
                   return json{{"pairs", r.pairs},
                               {"symmetry", r.symmetry},
                               {"bilinearity", r.bilinearity},
                               {"cauchy_schwarz_violation", r.cauchy_schwarz_violation},
                               {"rho_parallelogram", r.rho_parallelogram},
                               {"tv_parallelogram", r.tv_parallelogram},
                               {"tv_parallelogram_relative", r.tv_parallelogram_relative}};
                 }});

  return out;
}

bool is_input_kind(ErrorKind k) {
  return k == ErrorKind::InvalidArgument || k == ErrorKind::InvalidPmf || k == ErrorKind::UnsupportedSpec ||
         k == ErrorKind::CenterMismatch;
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cout << json{{"error", kind}, {"message", message}}.dump(2) << '\n';
  std::cerr << "taylor: " << message << '\n';
  return code;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Taylor measures: evaluation, geometry, probability, Monte Carlo and analytic functions", "taylor"};
  app.require_subcommand(1);
  const std::vector<Command> table = commands();
  struct Bound {
    CLI::App* sub;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string csv;
    unsigned threads = 1;
  };
  std::vector<Bound> bound(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Command& cmd = table[i];
    Bound& b = bound[i];
    b.sub = app.add_subcommand(cmd.name, cmd.description);
    std::vector<OptionSpec> specs = cmd.options;
    specs.push_back({"eps", Kind::Number, "absolute error target", false, "1e-12"});
    if (cmd.randomized) {
      specs.push_back({"seed", Kind::Integer, "generator seed (required)", true, ""});
      specs.push_back({"stream", Kind::Integer, "generator stream", false, "0"});
    }
    for (const OptionSpec& spec : specs) {
      b.values[spec.name] = spec.fallback;
      CLI::Option* opt = spec.kind == Kind::Flag ? b.sub->add_flag("--" + spec.name, spec.help)
                                                 : b.sub->add_option("--" + spec.name, b.values[spec.name], spec.help);
      if (spec.required) {
        opt->required();
      }
      b.options[spec.name] = opt;
    }
    b.sub->add_option("--csv", b.csv, "write a CSV table to this path");
    b.sub->add_option("--threads", b.threads, "worker threads (results do not depend on it)")->check(CLI::Range(1U, 256U));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InputError", e.what(), 2);
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    Bound& b = bound[i];
    if (!b.sub->parsed()) {
      continue;
    }
    const Command& cmd = table[i];
    std::map<std::string, Kind> kinds;
    std::set<std::string> given;
    for (const OptionSpec& spec : cmd.options) {
      kinds[spec.name] = spec.kind;
    }
    kinds["eps"] = Kind::Number;
    if (cmd.randomized) {
      kinds["seed"] = Kind::Integer;
      kinds["stream"] = Kind::Integer;
    }
    for (const auto& [name, opt] : b.options) {
      if (opt->count() > 0) {
        given.insert(name);
      }
    }
    try {
      Inputs in(kinds, b.values, given);
      Context ctx;
      ctx.threads = b.threads;
      if (!b.csv.empty()) {
        ctx.csv.emplace(b.csv);
      }
      json doc{{"command", cmd.name}, {"inputs", in.echo()}};
      if (cmd.randomized) {
        doc["seed"] = in.integer("seed");
      }
      doc["result"] = cmd.run(in, ctx);
      std::cout << doc.dump(2) << '\n';
      return 0;
    } catch (const InputError& e) {
      return report_error("InputError", e.what(), 2);
    } catch (const Error& e) {
      return report_error(std::string(to_string(e.kind())), e.what(), is_input_kind(e.kind()) ? 2 : 3);
    } catch (const json::exception& e) {
      return report_error("InputError", e.what(), 2);
    }
  }
  return report_error("InputError", "no subcommand", 2);
}

/// Rebuilds the argument list of a previous result document.
std::vector<std::string> replay_arguments(const std::string& path, const std::vector<std::string>& extra) {
  const json doc = read_document(path, "--from-result");
  if (!doc.is_object() || !doc.contains("command") || !doc.contains("inputs") || !doc.at("command").is_string() ||
      !doc.at("inputs").is_object()) {
    throw InputError("--from-result: not a result document (needs command and inputs)");
  }
  std::vector<std::string> args{doc.at("command").get<std::string>()};
  for (const auto& [name, value] : doc.at("inputs").items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) {
        args.push_back("--" + name);
      }
      continue;
    }
    args.push_back("--" + name);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  for (std::size_t i = 0; i < extra.size(); ++i) {
    if ((extra[i] != "--threads" && extra[i] != "--csv") || i + 1 == extra.size()) {
      throw InputError("--from-result accepts only --threads N and --csv PATH");
    }
    args.push_back(extra[i]);
    args.push_back(extra[++i]);
  }
  return args;
}

}  // namespace
}  // namespace taylor::cli

int main(int argc, char** argv) {
  using namespace taylor::cli;
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front() == "--from-result") {
    try {
      if (args.size() < 2) {
        throw InputError("--from-result: missing path");
      }
      args = replay_arguments(args[1], std::vector<std::string>(args.begin() + 2, args.end()));
    } catch (const InputError& e) {
      return report_error("InputError", e.what(), 2);
    }
  }
  return run(args);
}
