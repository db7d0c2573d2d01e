#pragma once

// Term-level numerics shared by every series in the library: signed
// log-magnitude terms a_n * gamma^n / n!, growth certificates with the tail
// bounds they imply, truncation planning and compensated summation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ranges>
#include <string>
#include <variant>
#include <vector>

namespace taylor {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// sign * exp(log_abs); sign == 0 encodes an exact zero.
struct LogMagnitude {
  int sign = 0;
  long double log_abs = -std::numeric_limits<long double>::infinity();

  static LogMagnitude of(double x);
  double value() const;
};

namespace cert {

/// a_n == 0 for n > last; |a_n| <= max_abs for n <= last.
struct FiniteSupport {
  std::size_t last = 0;
  double max_abs = kUnbounded;
};

/// |a_n| <= M for every n.
struct Bounded {
  double M = 1.0;
};

/// |a_n| <= 2 M |b|^n for every n.
struct GeometricEquiv {
  double M = 1.0;
  double b = 1.0;
};

/// |a_n| <= M n! |b|^n for every n. Covers sequences such as n! p_n obtained
/// from probability mass functions, whose terms decay only geometrically.
struct FactorialGeometric {
  double M = 1.0;
  double b = 1.0;
};

struct Unverified {};

}  // namespace cert

using GrowthCertificate = std::variant<cert::FiniteSupport, cert::Bounded, cert::GeometricEquiv,
                                       cert::FactorialGeometric, cert::Unverified>;

bool is_unverified(const GrowthCertificate& c);
bool is_finite_support(const GrowthCertificate& c);
/// Upper bound on |a_n| implied by the certificate (kUnbounded if none).
double coefficient_bound(const GrowthCertificate& c, std::size_t n);
std::string describe(const GrowthCertificate& c);

/// |a_n| <= scale * rate^n * (factorial ? n! : 1) for every n.
struct CoefficientEnvelope {
  double scale = 0.0;
  double rate = 0.0;
  bool factorial = false;
};

std::optional<CoefficientEnvelope> envelope_of(const GrowthCertificate& c);
GrowthCertificate certificate_of(const CoefficientEnvelope& e);
/// Envelope of the sequence a_n * |gamma|^n (used when re-presenting a
/// measure at gamma = 1).
CoefficientEnvelope rescale(CoefficientEnvelope e, double gamma);
/// Envelope of alpha * x_n + beta * y_n.
CoefficientEnvelope combine(double alpha, const CoefficientEnvelope& x, double beta,
                            const CoefficientEnvelope& y);

/// A total, deterministic rule n -> a_n together with a growth certificate.
/// Copies share the underlying rule.
class CoefficientSequence {
 public:
  struct ZeroTail {};
  struct ConstantTail {
    double M = 1.0;
  };
  /// a_n = M * b^n for indices past the prefix.
  struct GeometricTail {
    double M = 1.0;
    double b = 1.0;
  };
  using Rule = std::function<double(std::size_t)>;
  using LogRule = std::function<LogMagnitude(std::size_t)>;
  using Tail = std::variant<ZeroTail, ConstantTail, GeometricTail, Rule>;

  /// Zero sequence.
  CoefficientSequence();
  /// Certificate derived from the prefix and tail model.
  CoefficientSequence(std::vector<double> prefix, Tail tail);
  CoefficientSequence(std::vector<double> prefix, Tail tail, GrowthCertificate certificate);

  static CoefficientSequence finite(std::vector<double> prefix);
  static CoefficientSequence constant(double M);
  static CoefficientSequence geometric(double M, double b);
  static CoefficientSequence from_rule(Rule rule, GrowthCertificate certificate);
  /// For coefficients that overflow a double (e.g. n! p_n).
  static CoefficientSequence from_log_rule(LogRule rule, GrowthCertificate certificate);

  double at(std::size_t n) const;
  double operator[](std::size_t n) const { return at(n); }
  LogMagnitude log_at(std::size_t n) const;

  const GrowthCertificate& certificate() const noexcept { return certificate_; }
  CoefficientSequence with_certificate(GrowthCertificate certificate) const;

  /// Meaningful only when !is_rule_backed().
  const std::vector<double>& prefix() const noexcept;
  const Tail& tail() const noexcept;
  bool is_rule_backed() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  GrowthCertificate certificate_;
};

GrowthCertificate derive_certificate(const std::vector<double>& prefix,
                                     const CoefficientSequence::Tail& tail);

/// |a_n| against the certificate bound at n.
bool satisfies_certificate(const CoefficientSequence& seq, std::size_t n);

struct SignedLogTerm {
  std::size_t n = 0;
  int sign = 0;
  long double log_mag = -std::numeric_limits<long double>::infinity();
  /// a_n gamma^n / n! rounded once to double.
  double value = 0.0;
};

/// a_n gamma^n / n!, with 0^0 == 1.
SignedLogTerm term(const CoefficientSequence& seq, double gamma, std::size_t n);
SignedLogTerm term_from(LogMagnitude coefficient, double coefficient_value, double gamma,
                        std::size_t n);
/// Scalar form for callers holding a coefficient value directly.
double term_value(double coefficient, double gamma, std::size_t n);

/// log(n!) in extended precision.
long double log_factorial(std::size_t n);

/// Certified bound on sum_{n > N} |a_n gamma^n / n!|; kUnbounded when none.
double tail_bound(const GrowthCertificate& c, double gamma, std::size_t N);

struct TruncationPlan {
  std::size_t N = 0;
  double tail_bound = 0.0;
};

/// Smallest N with tail_bound(c, gamma, N) <= eps.
/// Throws DivergenceUnknown for unverified or non-convergent certificates.
TruncationPlan plan_truncation(const GrowthCertificate& c, double gamma, double eps);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct PartSums {
  double pos = 0.0;
  double neg = 0.0;
};

/// Positive and negative part sums of the terms selected by `indices`.
template <std::ranges::input_range R>
PartSums sum_terms(const CoefficientSequence& seq, double gamma, R&& indices) {
  CompensatedSum pos;
  CompensatedSum neg;
  for (auto n : indices) {
    const double v = term(seq, gamma, static_cast<std::size_t>(n)).value;
    if (v > 0.0) {
      pos.add(v);
    } else if (v < 0.0) {
      neg.add(-v);
    }
  }
  return {pos.value(), neg.value()};
}

}  // namespace taylor
