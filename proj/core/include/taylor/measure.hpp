#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "taylor/nat_set.hpp"
#include "taylor/term_kernel.hpp"

namespace taylor {

inline constexpr double kDefaultEps = 1e-12;

/// A signed Taylor measure T(B) = sum_{n in B} a_n gamma^n / n!.
///
/// Two measures with the same term function p(n) = a_n gamma^n / n! are the
/// same measure; (gamma, a) is only a presentation. Algebra produces the
/// canonical presentation gamma = 1, a_n = n! p(n), which stores p directly
/// so the combined term function carries no representation drift.
class TaylorMeasure {
 public:
  using TermRule = std::function<double(std::size_t)>;

  /// The zero measure.
  TaylorMeasure();
  TaylorMeasure(CoefficientSequence coefficients, double gamma, std::string label = {});

  /// Canonical presentation from a term function. `certificate` bounds the
  /// canonical coefficients a_n = n! p(n).
  static TaylorMeasure from_terms(TermRule p, GrowthCertificate certificate, std::string label = {});

  double gamma() const noexcept { return gamma_; }
  const CoefficientSequence& coefficients() const noexcept { return coefficients_; }
  const GrowthCertificate& certificate() const noexcept { return coefficients_.certificate(); }
  const std::string& label() const noexcept { return label_; }
  bool is_canonical() const noexcept { return static_cast<bool>(terms_); }

  SignedLogTerm term(std::size_t n) const;
  double term_value(std::size_t n) const { return term(n).value; }

  TaylorMeasure with_label(std::string label) const;

 private:
  CoefficientSequence coefficients_;
  double gamma_ = 1.0;
  std::string label_;
  std::shared_ptr<const TermRule> terms_;
};

struct MeasureValue {
  double value = 0.0;
  /// Certified truncation bound plus a floating summation estimate.
  double abs_error = 0.0;
};

/// Positive/negative part sums of a term function over a set.
struct SeriesSums {
  double pos = 0.0;
  double neg = 0.0;
  double abs_error = 0.0;
};

/// Sums `terms` over B. Infinite sets are truncated by planning against
/// `tail_certificate` at `tail_gamma`; finite sets are summed exactly.
SeriesSums sum_series(const TaylorMeasure::TermRule& terms, const GrowthCertificate& tail_certificate,
                      double tail_gamma, const NatSet& B, double eps);

/// Certificate for the canonical coefficients n! p(n) of T.
GrowthCertificate canonical_certificate(const TaylorMeasure& T);

MeasureValue evaluate(const TaylorMeasure& T, const NatSet& B, double eps = kDefaultEps);
MeasureValue total_variation(const TaylorMeasure& T, const NatSet& B, double eps = kDefaultEps);
double taylor_derivative(const TaylorMeasure& T, std::size_t n);

/// alpha T1 + beta T2 in canonical presentation.
TaylorMeasure linear_combination(double alpha, const TaylorMeasure& T1, double beta, const TaylorMeasure& T2);

/// Jordan decomposition T = T+ - T- with Hahn set A+ = {n : p(n) >= 0}.
class JordanPair {
 public:
  explicit JordanPair(TaylorMeasure T);

  MeasureValue positive(const NatSet& B, double eps = kDefaultEps) const;
  MeasureValue negative(const NatSet& B, double eps = kDefaultEps) const;
  bool hahn_positive(std::size_t n) const;

  const TaylorMeasure& measure() const noexcept { return measure_; }
  /// T+ and T- as measures in their own right (canonical presentation).
  const TaylorMeasure& positive_measure() const noexcept { return positive_; }
  const TaylorMeasure& negative_measure() const noexcept { return negative_; }

 private:
  TaylorMeasure measure_;
  TaylorMeasure positive_;
  TaylorMeasure negative_;
};

JordanPair jordan_decompose(const TaylorMeasure& T);

}  // namespace taylor
