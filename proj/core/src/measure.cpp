#include "taylor/measure.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "taylor/error.hpp"

namespace taylor {

namespace {

double rounding_estimate(double pos, double neg) { return 8.0 * DBL_EPSILON * (pos + neg); }

GrowthCertificate scaled(const GrowthCertificate& c, double w) {
  const double s = std::abs(w);
  return std::visit(
      [s](auto k) -> GrowthCertificate {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, cert::FiniteSupport>) {
          k.max_abs *= s;
        } else if constexpr (std::is_same_v<K, cert::Bounded> || std::is_same_v<K, cert::GeometricEquiv> ||
                             std::is_same_v<K, cert::FactorialGeometric>) {
          k.M *= s;
        }
        return k;
      },
      c);
}

}  // namespace

// ---------------------------------------------------------------------------
// TaylorMeasure

TaylorMeasure::TaylorMeasure() : TaylorMeasure(CoefficientSequence(), 1.0) {}

TaylorMeasure::TaylorMeasure(CoefficientSequence coefficients, double gamma, std::string label)
    : coefficients_(std::move(coefficients)), gamma_(gamma), label_(std::move(label)) {}

TaylorMeasure TaylorMeasure::from_terms(TermRule p, GrowthCertificate certificate, std::string label) {
  auto shared = std::make_shared<const TermRule>(std::move(p));
  auto coefficients = CoefficientSequence::from_log_rule(
      [shared](std::size_t n) {
        LogMagnitude m = LogMagnitude::of((*shared)(n));
        if (m.sign != 0) {
          m.log_abs += log_factorial(n);
        }
        return m;
      },
      std::move(certificate));
  TaylorMeasure T(std::move(coefficients), 1.0, std::move(label));
  T.terms_ = std::move(shared);
  return T;
}

SignedLogTerm TaylorMeasure::term(std::size_t n) const {
  if (terms_) {
    const double v = (*terms_)(n);
    const LogMagnitude m = LogMagnitude::of(v);
    return {n, m.sign, m.log_abs, v};
  }
  return taylor::term(coefficients_, gamma_, n);
}

TaylorMeasure TaylorMeasure::with_label(std::string label) const {
  TaylorMeasure copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

// ---------------------------------------------------------------------------
// Summation

SeriesSums sum_series(const TaylorMeasure::TermRule& terms, const GrowthCertificate& tail_certificate,
                      double tail_gamma, const NatSet& B, double eps) {
  auto add_term = [&terms](std::size_t n, CompensatedSum& pos, CompensatedSum& neg) {
    const double v = terms(n);
    if (v > 0.0) {
      pos.add(v);
    } else if (v < 0.0) {
      neg.add(-v);
    }
  };
  auto finite_sum = [&](const std::vector<std::size_t>& indices) {
    CompensatedSum pos;
    CompensatedSum neg;
    for (std::size_t n : indices) {
      add_term(n, pos, neg);
    }
    return SeriesSums{pos.value(), neg.value(), rounding_estimate(pos.value(), neg.value())};
  };

  if (B.kind() == NatSet::Kind::Finite) {
    return finite_sum(B.elements());
  }

  const TruncationPlan plan = plan_truncation(tail_certificate, tail_gamma, eps);
  CompensatedSum pos;
  CompensatedSum neg;
  for (std::size_t n = 0; n <= plan.N; ++n) {
    add_term(n, pos, neg);
  }
  SeriesSums all{pos.value(), neg.value(), plan.tail_bound + rounding_estimate(pos.value(), neg.value())};
  if (B.kind() == NatSet::Kind::All) {
    return all;
  }
  const SeriesSums excluded = finite_sum(B.elements());
  return {std::max(0.0, all.pos - excluded.pos), std::max(0.0, all.neg - excluded.neg),
          all.abs_error + excluded.abs_error + 2.0 * DBL_EPSILON * (all.pos + all.neg)};
}

GrowthCertificate canonical_certificate(const TaylorMeasure& T) {
  const GrowthCertificate& c = T.certificate();
  if (T.is_canonical()) {
    return c;
  }
  if (const auto* fs = std::get_if<cert::FiniteSupport>(&c)) {
    if (!std::isfinite(fs->max_abs)) {
      return *fs;
    }
    double m = 0.0;
    for (std::size_t n = 0; n <= fs->last; ++n) {
      const SignedLogTerm t = T.term(n);
      if (t.sign != 0) {
        m = std::max(m, static_cast<double>(std::exp(t.log_mag + log_factorial(n))));
      }
    }
    return cert::FiniteSupport{fs->last, m * (1.0 + 1e-12)};
  }
  const auto env = envelope_of(c);
  if (!env) {
    return cert::Unverified{};
  }
  return certificate_of(rescale(*env, T.gamma()));
}

// ---------------------------------------------------------------------------
// Operations

MeasureValue evaluate(const TaylorMeasure& T, const NatSet& B, double eps) {
  const SeriesSums s =
      sum_series([&T](std::size_t n) { return T.term_value(n); }, T.certificate(), T.gamma(), B, eps);
  const double value = s.pos - s.neg;
  return {value, s.abs_error + DBL_EPSILON * std::abs(value)};
}

MeasureValue total_variation(const TaylorMeasure& T, const NatSet& B, double eps) {
  const SeriesSums s =
      sum_series([&T](std::size_t n) { return T.term_value(n); }, T.certificate(), T.gamma(), B, eps);
  const double value = s.pos + s.neg;
  return {value, s.abs_error + DBL_EPSILON * value};
}

double taylor_derivative(const TaylorMeasure& T, std::size_t n) { return T.term_value(n); }

TaylorMeasure linear_combination(double alpha, const TaylorMeasure& T1, double beta, const TaylorMeasure& T2) {
  if (alpha == 0.0 && beta == 0.0) {
    return TaylorMeasure::from_terms([](std::size_t) { return 0.0; }, cert::FiniteSupport{0, 0.0});
  }
  if (alpha == 0.0 || beta == 0.0) {
    const double w = alpha == 0.0 ? beta : alpha;
    const TaylorMeasure& T = alpha == 0.0 ? T2 : T1;
    return TaylorMeasure::from_terms([w, T](std::size_t n) { return w * T.term_value(n); },
                                     scaled(canonical_certificate(T), w));
  }

  const GrowthCertificate c1 = canonical_certificate(T1);
  const GrowthCertificate c2 = canonical_certificate(T2);
  GrowthCertificate combined = cert::Unverified{};
  const auto* fs1 = std::get_if<cert::FiniteSupport>(&c1);
  const auto* fs2 = std::get_if<cert::FiniteSupport>(&c2);
  if (fs1 && fs2) {
    combined = cert::FiniteSupport{std::max(fs1->last, fs2->last),
                                   std::abs(alpha) * fs1->max_abs + std::abs(beta) * fs2->max_abs};
  } else {
    const auto e1 = envelope_of(c1);
    const auto e2 = envelope_of(c2);
    if (e1 && e2) {
      combined = certificate_of(combine(alpha, *e1, beta, *e2));
    }
  }
  return TaylorMeasure::from_terms(
      [alpha, T1, beta, T2](std::size_t n) { return alpha * T1.term_value(n) + beta * T2.term_value(n); },
      std::move(combined));
}

// ---------------------------------------------------------------------------
// Jordan decomposition

JordanPair::JordanPair(TaylorMeasure T) : measure_(std::move(T)) {
  const GrowthCertificate c = canonical_certificate(measure_);
  const TaylorMeasure& m = measure_;
  positive_ = TaylorMeasure::from_terms(
      [m](std::size_t n) {
        const double v = m.term_value(n);
        return v > 0.0 ? v : 0.0;
      },
      c, "T+");
  negative_ = TaylorMeasure::from_terms(
      [m](std::size_t n) {
        const double v = m.term_value(n);
        return v < 0.0 ? -v : 0.0;
      },
      c, "T-");
}

MeasureValue JordanPair::positive(const NatSet& B, double eps) const {
  MeasureValue v = evaluate(positive_, B, eps);
  v.value = std::max(0.0, v.value);
  return v;
}

MeasureValue JordanPair::negative(const NatSet& B, double eps) const {
  MeasureValue v = evaluate(negative_, B, eps);
  v.value = std::max(0.0, v.value);
  return v;
}

bool JordanPair::hahn_positive(std::size_t n) const { return measure_.term_value(n) >= 0.0; }

JordanPair jordan_decompose(const TaylorMeasure& T) { return JordanPair(T); }

}  // namespace taylor
