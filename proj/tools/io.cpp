#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <iterator>
#include <sstream>

namespace taylor::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InputError(path + ": " + message);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) {
    fail(path, "expected an object");
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(path + "." + key, "missing field");
  }
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  return j.get<double>();
}

double number_field(const json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), path + "." + key);
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

std::size_t index(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    fail(path, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::size_t index_field(const json& j, const std::string& key, const std::string& path) {
  return index(field(j, key, path), path + "." + key);
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) {
    fail(path, "expected a string");
  }
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) {
    fail(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::size_t> indices(const json& j, const std::string& path) {
  if (!j.is_array()) {
    fail(path, "expected an array of nonnegative integers");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(index(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string line_column(const std::string& textual, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < textual.size(); ++i) {
    if (textual[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::vector<std::size_t> index_list(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + comma, v);
    if (ec != std::errc() || ptr != s.data() + comma) {
      throw InputError(what + ": '" + s.substr(pos, comma - pos) + "' is not a nonnegative integer");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

stm::StepDist parse_step(const json& j, const std::string& path) {
  const std::string kind = text(field(j, "kind", path), path + ".kind");
  if (kind == "normal") {
    return stm::NormalStep{number_or(j, "mean", 0.0, path), number_or(j, "sd", 1.0, path)};
  }
  if (kind == "bernoulli") {
    return stm::BernoulliStep{number_or(j, "p", 0.5, path), number_or(j, "low", -1.0, path),
                              number_or(j, "high", 1.0, path)};
  }
  if (kind == "uniform") {
    return stm::UniformStep{number_or(j, "low", -1.0, path), number_or(j, "high", 1.0, path)};
  }
  fail(path + ".kind", "expected one of normal, bernoulli, uniform");
}

}  // namespace

json read_document(const std::string& arg, const std::string& what) {
  std::string content;
  if (arg == "-") {
    content.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else if (!arg.empty() && (arg.front() == '{' || arg.front() == '[' || arg.front() == '"')) {
    content = arg;
  } else {
    std::ifstream in(arg, std::ios::binary);
    if (!in) {
      throw InputError(what + ": cannot open '" + arg + "'");
    }
    content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + line_column(content, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON");
  }
}

GrowthCertificate parse_certificate(const json& j, const std::string& path) {
  const std::string kind = text(field(j, "kind", path), path + ".kind");
  if (kind == "finite_support") {
    return cert::FiniteSupport{index_field(j, "last", path), number_or(j, "max_abs", kUnbounded, path)};
  }
  if (kind == "bounded") {
    return cert::Bounded{number_field(j, "M", path)};
  }
  if (kind == "geometric_equiv") {
    return cert::GeometricEquiv{number_field(j, "M", path), number_field(j, "b", path)};
  }
  if (kind == "factorial_geometric") {
    return cert::FactorialGeometric{number_field(j, "M", path), number_field(j, "b", path)};
  }
  if (kind == "unverified") {
    return cert::Unverified{};
  }
  fail(path + ".kind", "expected one of finite_support, bounded, geometric_equiv, factorial_geometric, unverified");
}

CoefficientSequence parse_sequence(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "one") {
      return CoefficientSequence::constant(1.0);
    }
    if (name == "identity") {
      return CoefficientSequence::from_rule([](std::size_t n) { return static_cast<double>(n); },
                                            cert::GeometricEquiv{1.0, 1.5});
    }
    if (name == "even") {
      return CoefficientSequence::from_rule([](std::size_t n) { return n % 2 == 0 ? 1.0 : 0.0; }, cert::Bounded{1.0});
    }
    fail(path, "unknown sequence name '" + name + "' (expected one, identity, even)");
  }
  if (!j.is_object()) {
    fail(path, "expected a coefficient description or a sequence name");
  }
  const std::vector<double> prefix = j.contains("prefix") ? numbers(j.at("prefix"), path + ".prefix") : std::vector<double>{};
  CoefficientSequence::Tail tail = CoefficientSequence::ZeroTail{};
  if (j.contains("tail")) {
    const json& t = j.at("tail");
    const std::string tp = path + ".tail";
    const std::string kind = text(field(t, "kind", tp), tp + ".kind");
    if (kind == "constant") {
      tail = CoefficientSequence::ConstantTail{number_field(t, "M", tp)};
    } else if (kind == "geometric") {
      tail = CoefficientSequence::GeometricTail{number_field(t, "M", tp), number_field(t, "b", tp)};
    } else if (kind != "zero") {
      fail(tp + ".kind", "expected one of zero, constant, geometric");
    }
  }
  if (j.contains("certificate")) {
    return CoefficientSequence(prefix, tail, parse_certificate(j.at("certificate"), path + ".certificate"));
  }
  return CoefficientSequence(prefix, tail);
}

TaylorMeasure parse_measure(const json& j, const std::string& path) {
  const double gamma = number_field(j, "gamma", path);
  CoefficientSequence a = parse_sequence(field(j, "coefficients", path), path + ".coefficients");
  if (j.contains("certificate")) {
    a = a.with_certificate(parse_certificate(j.at("certificate"), path + ".certificate"));
  }
  const std::string label = j.contains("label") ? text(j.at("label"), path + ".label") : std::string{};
  return TaylorMeasure(std::move(a), gamma, label);
}

NatSet parse_set(const json& j, const std::string& path) {
  const std::string kind = text(field(j, "kind", path), path + ".kind");
  if (kind == "all") {
    return NatSet::all();
  }
  if (kind == "finite") {
    return NatSet::finite(j.contains("elements") ? indices(j.at("elements"), path + ".elements")
                                                 : std::vector<std::size_t>{});
  }
  if (kind == "cofinite") {
    return NatSet::cofinite(indices(field(j, "elements", path), path + ".elements"));
  }
  fail(path + ".kind", "expected one of finite, cofinite, all");
}

NatSet parse_set_argument(const std::string& arg, const std::string& what) {
  if (arg == "all") {
    return NatSet::all();
  }
  if (arg == "empty") {
    return NatSet::empty();
  }
  if (arg.rfind("finite:", 0) == 0) {
    return NatSet::finite(index_list(arg.substr(7), what));
  }
  if (arg.rfind("cofinite:", 0) == 0) {
    return NatSet::cofinite(index_list(arg.substr(9), what));
  }
  if (arg.rfind("range:", 0) == 0) {
    const std::string body = arg.substr(6);
    const std::size_t dash = body.find('-');
    if (dash == std::string::npos) {
      throw InputError(what + ": range must look like range:FIRST-LAST");
    }
    const auto first = index_list(body.substr(0, dash), what);
    const auto last = index_list(body.substr(dash + 1), what);
    if (first.size() != 1 || last.size() != 1 || first[0] > last[0]) {
      throw InputError(what + ": range must look like range:FIRST-LAST with FIRST <= LAST");
    }
    return NatSet::range(first[0], last[0]);
  }
  if (!arg.empty() && arg.find_first_not_of("0123456789,") == std::string::npos) {
    return NatSet::finite(index_list(arg, what));
  }
  return parse_set(read_document(arg, what), what);
}

AnalyticRep parse_function(const json& j, const std::string& path) {
  if (j.is_string()) {
    return builtin(j.get<std::string>(), 0.0);
  }
  const double center = number_or(j, "center", 0.0, path);
  if (j.contains("builtin")) {
    const std::string name = text(j.at("builtin"), path + ".builtin");
    const std::vector<double> params = j.contains("params") ? numbers(j.at("params"), path + ".params")
                                                            : std::vector<double>{};
    return builtin(name, center, params);
  }
  AnalyticRep rep;
  rep.center = center;
  rep.coefficients = parse_sequence(field(j, "coefficients", path), path + ".coefficients");
  rep.radius_hint = number_or(j, "radius", kUnbounded, path);
  rep.name = j.contains("name") ? text(j.at("name"), path + ".name") : std::string("custom");
  return rep;
}

StmSpec parse_stm(const json& j, const std::string& path) {
  const std::string kind = text(field(j, "kind", path), path + ".kind");
  if (kind == "gaussian_iid") {
    return stm::GaussianIID{number_or(j, "mu", 0.0, path), number_or(j, "sigma", 1.0, path),
                            number_or(j, "gamma", 1.0, path)};
  }
  if (kind == "gaussian_indep") {
    return stm::GaussianIndep{parse_sequence(field(j, "mu", path), path + ".mu"),
                              parse_sequence(field(j, "sigma", path), path + ".sigma"),
                              number_or(j, "gamma", 1.0, path)};
  }
  if (kind == "indicator_gamma") {
    return stm::IndicatorGamma{number_field(j, "p", path), parse_sequence(field(j, "mu", path), path + ".mu"),
                               parse_sequence(field(j, "sigma", path), path + ".sigma")};
  }
  if (kind == "simple_function") {
    return stm::SimpleFunction{numbers(field(j, "c", path), path + ".c"),
                               numbers(field(j, "probs", path), path + ".probs")};
  }
  if (kind == "random_walk") {
    const stm::StepDist step = j.contains("step") ? parse_step(j.at("step"), path + ".step") : stm::NormalStep{};
    return stm::RandomWalk{step, index_field(j, "t", path)};
  }
  if (kind == "ar1") {
    return stm::Ar1{number_field(j, "phi", path), number_or(j, "sigma2", 1.0, path), index_field(j, "t", path)};
  }
  if (kind == "brownian") {
    return stm::BrownianApprox{index_field(j, "n", path), number_or(j, "mu", 0.0, path),
                               number_or(j, "sigma", 1.0, path)};
  }
  fail(path + ".kind",
       "expected one of gaussian_iid, gaussian_indep, indicator_gamma, simple_function, random_walk, ar1, brownian");
}

json to_json(const GrowthCertificate& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, cert::FiniteSupport>) {
          return {{"kind", "finite_support"}, {"last", v.last}, {"max_abs", v.max_abs}};
        } else if constexpr (std::is_same_v<T, cert::Bounded>) {
          return {{"kind", "bounded"}, {"M", v.M}};
        } else if constexpr (std::is_same_v<T, cert::GeometricEquiv>) {
          return {{"kind", "geometric_equiv"}, {"M", v.M}, {"b", v.b}};
        } else if constexpr (std::is_same_v<T, cert::FactorialGeometric>) {
          return {{"kind", "factorial_geometric"}, {"M", v.M}, {"b", v.b}};
        } else {
          return {{"kind", "unverified"}};
        }
      },
      c);
}

json to_json(const NatSet& s) {
  switch (s.kind()) {
    case NatSet::Kind::All: return {{"kind", "all"}};
    case NatSet::Kind::CoFinite: return {{"kind", "cofinite"}, {"elements", s.elements()}};
    case NatSet::Kind::Finite: break;
  }
  return {{"kind", "finite"}, {"elements", s.elements()}};
}

json to_json(const MeasureValue& v) { return {{"value", v.value}, {"abs_error", v.abs_error}}; }

json to_json(const SampleSummary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"variance", s.variance}, {"se_mean", s.se_mean}, {"se_variance", s.se_variance}};
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) {
    throw InputError("--csv: cannot open '" + path + "' for writing");
  }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char ch : f) {
      if (ch == '"') {
        out_ << '"';
      }
      out_ << ch;
    }
    out_ << '"';
  }
  out_ << "\r\n";
}

std::string csv_number(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace taylor::cli
