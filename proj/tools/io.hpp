#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "taylor/analytic.hpp"
#include "taylor/stochastic.hpp"

namespace taylor::cli {

using nlohmann::json;

/// Malformed command line or document; maps to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a document argument: "-" is stdin, a leading '{' or '[' is inline
/// JSON, anything else a file path. `what` names the option in diagnostics.
json read_document(const std::string& arg, const std::string& what);

/// `path` is the dotted field path used in diagnostics.
GrowthCertificate parse_certificate(const json& j, const std::string& path);
/// A coefficient description, or one of the names one, identity, even.
CoefficientSequence parse_sequence(const json& j, const std::string& path);
TaylorMeasure parse_measure(const json& j, const std::string& path);
NatSet parse_set(const json& j, const std::string& path);
/// Shorthand: all, empty, 0,1,2, finite:0,1, cofinite:0,3, range:2-9;
/// anything else is read as a document.
NatSet parse_set_argument(const std::string& arg, const std::string& what);
/// A builtin name, {"builtin", "center", "params"}, or an explicit
/// {"center", "coefficients", "radius"} document.
AnalyticRep parse_function(const json& j, const std::string& path);
StmSpec parse_stm(const json& j, const std::string& path);

json to_json(const GrowthCertificate& c);
json to_json(const NatSet& s);
json to_json(const MeasureValue& v);
json to_json(const SampleSummary& s);

/// RFC 4180 writer: CRLF records, fields quoted when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

std::string csv_number(double x);

}  // namespace taylor::cli
