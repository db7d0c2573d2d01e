#include "taylor/probability.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "taylor/error.hpp"

namespace taylor {

namespace {

constexpr double kPmfSumTolerance = 1e-12;

// Canonical certificate for the sequence n! p_n given a certificate on p_n.
GrowthCertificate factorial_lift(const GrowthCertificate& c) {
  if (const auto* fs = std::get_if<cert::FiniteSupport>(&c)) {
    return cert::FiniteSupport{fs->last, kUnbounded};
  }
  if (const auto* ge = std::get_if<cert::GeometricEquiv>(&c)) {
    return cert::FactorialGeometric{2.0 * ge->M, std::abs(ge->b)};
  }
  if (const auto* bd = std::get_if<cert::Bounded>(&c)) {
    return cert::FactorialGeometric{bd->M, 1.0};
  }
  return cert::Unverified{};
}

}  // namespace

// ---------------------------------------------------------------------------
// PowerSeriesPmf

PowerSeriesPmf::PowerSeriesPmf(double zeta, CoefficientSequence b, double eps) {
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw Error(ErrorKind::InvalidArgument, "zeta must be finite and nonnegative");
  }
  weights_ = TaylorMeasure(b, zeta, "power-series weights");
  form_ = Form{zeta, std::move(b)};
  finish(eps);
}

PowerSeriesPmf PowerSeriesPmf::poisson(double zeta) {
  return PowerSeriesPmf(zeta, CoefficientSequence::constant(1.0));
}

PowerSeriesPmf PowerSeriesPmf::from_weights(TaylorMeasure weights, double eps) {
  PowerSeriesPmf p;
  p.weights_ = std::move(weights);
  p.finish(eps);
  return p;
}

void PowerSeriesPmf::finish(double eps) {
  const TruncationPlan plan = plan_truncation(weights_.certificate(), weights_.gamma(), eps);
  for (std::size_t n = 0; n <= plan.N; ++n) {
    const bool negative = form_ ? form_->b.at(n) < 0.0 : weights_.term_value(n) < 0.0;
    if (negative) {
      throw Error(ErrorKind::InvalidArgument, "pmf weights must be nonnegative (index " + std::to_string(n) + ")");
    }
  }
  const MeasureValue coarse = evaluate(weights_, NatSet::all(), eps);
  if (coarse.value <= coarse.abs_error) {
    throw Error(ErrorKind::DegenerateDistribution, "normalizing constant is zero within its error bound");
  }
  const double fine_eps = std::min(eps, coarse.value * 0x1p-53);
  normalizer_ = evaluate(weights_, NatSet::all(), fine_eps);
  horizon_ = plan_truncation(weights_.certificate(), weights_.gamma(), normalizer_.value * 0x1p-54).N;
}

double PowerSeriesPmf::pmf(std::size_t n) const { return weights_.term_value(n) / normalizer_.value; }

double PowerSeriesPmf::cdf(std::size_t n) const {
  CompensatedSum s;
  for (std::size_t k = 0; k <= n; ++k) {
    s.add(weights_.term_value(k));
    if (k >= horizon_) {
      break;
    }
  }
  return std::min(1.0, s.value() / normalizer_.value);
}

MeasureValue PowerSeriesPmf::probability(const NatSet& B, double eps) const {
  const double z = normalizer_.value;
  const MeasureValue w = evaluate(weights_, B, eps * z);
  return {w.value / z, (w.abs_error + std::abs(w.value) * normalizer_.abs_error / z) / z};
}

std::size_t PowerSeriesPmf::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "quantile level must lie in [0, 1]");
  }
  const double target = u * normalizer_.value;
  const double tail = tail_bound(weights_.certificate(), weights_.gamma(), horizon_);
  if (tail > 0.0 && static_cast<long double>(target) + tail > normalizer_.value) {
    throw Error(ErrorKind::QuantileTailUnresolved,
                "quantile level lies in the unresolved tail past index " + std::to_string(horizon_));
  }
  CompensatedSum s;
  for (std::size_t n = 0; n <= horizon_; ++n) {
    s.add(weights_.term_value(n));
    if (s.value() >= target) {
      return n;
    }
  }
  return horizon_;
}

MeasureValue normalizer(double zeta, const CoefficientSequence& b, double eps) {
  return PowerSeriesPmf(zeta, b, eps).normalizer();
}

// ---------------------------------------------------------------------------
// Positive/negative Taylor probability measures

MeasureValue TaylorProbabilityPair::reconstruct(const NatSet& B, double eps) const {
  MeasureValue out;
  auto add_side = [&](const MeasureValue& mass, const std::optional<PowerSeriesPmf>& q, double sign) {
    if (!q) {
      return;
    }
    const MeasureValue prob = q->probability(B, eps);
    out.value += sign * mass.value * prob.value;
    out.abs_error += mass.abs_error * std::abs(prob.value) + mass.value * prob.abs_error;
  };
  add_side(mass_pos, q_pos, 1.0);
  add_side(mass_neg, q_neg, -1.0);
  out.abs_error += 2.0 * DBL_EPSILON * (mass_pos.value + mass_neg.value);
  return out;
}

TaylorProbabilityPair probability_pair(const TaylorMeasure& T, double eps) {
  const JordanPair J = jordan_decompose(T);
  TaylorProbabilityPair pair{T, J.positive(NatSet::all(), eps), J.negative(NatSet::all(), eps), {}, {}};
  if (pair.mass_pos.value == 0.0 && pair.mass_neg.value == 0.0) {
    throw Error(ErrorKind::DegenerateDistribution, "the zero measure has no Taylor probability measures");
  }
  if (pair.mass_pos.value > 0.0) {
    pair.q_pos = PowerSeriesPmf::from_weights(J.positive_measure(), eps);
  }
  if (pair.mass_neg.value > 0.0) {
    pair.q_neg = PowerSeriesPmf::from_weights(J.negative_measure(), eps);
  }
  return pair;
}

// ---------------------------------------------------------------------------
// Representation of pmfs as Taylor measures

TaylorMeasure from_pmf(const CoefficientSequence& probabilities, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidArgument, "gamma must be finite and positive");
  }
  const GrowthCertificate lifted = factorial_lift(probabilities.certificate());
  const TaylorMeasure as_terms = TaylorMeasure::from_terms(
      [probabilities](std::size_t n) { return probabilities.at(n); }, lifted, "pmf");

  TruncationPlan plan;
  MeasureValue total;
  try {
    plan = plan_truncation(lifted, 1.0, 1e-15);
    total = evaluate(as_terms, NatSet::all(), 1e-15);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidPmf, std::string("cannot certify the total mass: ") + e.what());
  }
  for (std::size_t n = 0; n <= plan.N; ++n) {
    if (probabilities.at(n) < 0.0) {
      throw Error(ErrorKind::InvalidPmf, "negative probability at index " + std::to_string(n));
    }
  }
  if (std::abs(total.value - 1.0) > kPmfSumTolerance) {
    throw Error(ErrorKind::InvalidPmf, "probabilities sum to " + std::to_string(total.value));
  }

  GrowthCertificate c = cert::Unverified{};
  if (const auto* fs = std::get_if<cert::FiniteSupport>(&probabilities.certificate())) {
    double m = 0.0;
    for (std::size_t n = 0; n <= fs->last; ++n) {
      const double p = probabilities.at(n);
      if (p > 0.0) {
        m = std::max(m, static_cast<double>(std::exp(std::log(static_cast<long double>(p)) + log_factorial(n) -
                                                     n * std::log(static_cast<long double>(gamma)))));
      }
    }
    c = cert::FiniteSupport{fs->last, m * (1.0 + 1e-12)};
  } else if (const auto e = envelope_of(lifted)) {
    c = certificate_of({e->scale, e->rate / gamma, e->factorial});
  }

  const long double log_gamma = std::log(static_cast<long double>(gamma));
  auto coefficients = CoefficientSequence::from_log_rule(
      [probabilities, log_gamma](std::size_t n) -> LogMagnitude {
        const double p = probabilities.at(n);
        if (p == 0.0) {
          return {};
        }
        return {1, std::log(static_cast<long double>(p)) + log_factorial(n) - n * log_gamma};
      },
      c);
  return TaylorMeasure(std::move(coefficients), gamma, "from_pmf");
}

TaylorMeasure from_pmf(const PowerSeriesPmf& pmf, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidArgument, "gamma must be finite and positive");
  }
  const double z = pmf.normalizer().value;
  const GrowthCertificate weights_cert = canonical_certificate(pmf.weights());
  GrowthCertificate c = cert::Unverified{};
  if (const auto* fs = std::get_if<cert::FiniteSupport>(&weights_cert)) {
    c = cert::FiniteSupport{fs->last, kUnbounded};
  } else if (const auto e = envelope_of(weights_cert)) {
    c = certificate_of({e->scale / z, e->rate / gamma, e->factorial});
  }
  const TaylorMeasure weights = pmf.weights();
  const long double log_z = std::log(static_cast<long double>(z));
  const long double log_gamma = std::log(static_cast<long double>(gamma));
  auto coefficients = CoefficientSequence::from_log_rule(
      [weights, log_z, log_gamma](std::size_t n) -> LogMagnitude {
        const SignedLogTerm t = weights.term(n);
        if (t.sign == 0) {
          return {};
        }
        return {t.sign, t.log_mag + log_factorial(n) - log_z - n * log_gamma};
      },
      c);
  return TaylorMeasure(std::move(coefficients), gamma, "from_pmf");
}

TaylorMeasure measure_from_densities(double zeta1, const CoefficientSequence& b1, double zeta2,
                                     const CoefficientSequence& b2) {
  if (is_unverified(b1.certificate()) || is_unverified(b2.certificate())) {
    throw Error(ErrorKind::DivergenceUnknown, "both density sides need a growth certificate");
  }
  return linear_combination(1.0, TaylorMeasure(b1, zeta1), -1.0, TaylorMeasure(b2, zeta2))
      .with_label("difference of densities");
}

TaylorMeasure poisson_taylor(double zeta1, double zeta2, PoissonTaylorPresentation presentation) {
  if (!(zeta1 > 0.0) || !(zeta2 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "Poisson rates must be positive");
  }
  switch (presentation) {
    case PoissonTaylorPresentation::Unit: {
      auto a = CoefficientSequence::from_rule(
          [zeta1, zeta2](std::size_t n) {
            return std::pow(zeta1, static_cast<double>(n)) - std::pow(zeta2, static_cast<double>(n));
          },
          cert::GeometricEquiv{1.0, std::max(zeta1, zeta2)});
      return TaylorMeasure(std::move(a), 1.0, "poisson-taylor");
    }
    case PoissonTaylorPresentation::Zeta1: {
      const double r = zeta2 / zeta1;
      auto a = CoefficientSequence::from_rule(
          [r](std::size_t n) { return 1.0 - std::pow(r, static_cast<double>(n)); },
          cert::GeometricEquiv{1.0, std::max(1.0, r)});
      return TaylorMeasure(std::move(a), zeta1, "poisson-taylor");
    }
    case PoissonTaylorPresentation::Zeta2: {
      const double r = zeta1 / zeta2;
      auto a = CoefficientSequence::from_rule(
          [r](std::size_t n) { return std::pow(r, static_cast<double>(n)) - 1.0; },
          cert::GeometricEquiv{1.0, std::max(1.0, r)});
      return TaylorMeasure(std::move(a), zeta2, "poisson-taylor");
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown presentation");
}

}  // namespace taylor
