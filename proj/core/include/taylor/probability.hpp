#pragma once

#include <cstddef>
#include <optional>

#include "taylor/measure.hpp"

namespace taylor {

/// c(zeta, b)^-1 = sum_n b_n zeta^n / n!. Requires b_n >= 0 on the queried
/// indices and a certified b.
MeasureValue normalizer(double zeta, const CoefficientSequence& b, double eps = kDefaultEps);

/// A pmf on N proportional to the terms of a nonnegative Taylor measure.
/// The power-series family f(n | zeta, b) = c(zeta, b) b_n zeta^n / n! is the
/// case where the weight measure is presented as T_{zeta, b}.
class PowerSeriesPmf {
 public:
  struct Form {
    double zeta = 0.0;
    CoefficientSequence b;
  };

  PowerSeriesPmf(double zeta, CoefficientSequence b, double eps = kDefaultEps);
  static PowerSeriesPmf poisson(double zeta);
  /// Weights must be nonnegative; throws DegenerateDistribution on zero mass.
  static PowerSeriesPmf from_weights(TaylorMeasure weights, double eps = kDefaultEps);

  /// Present when constructed from (zeta, b).
  const std::optional<Form>& form() const noexcept { return form_; }
  const TaylorMeasure& weights() const noexcept { return weights_; }
  const MeasureValue& normalizer() const noexcept { return normalizer_; }

  double pmf(std::size_t n) const;
  double cdf(std::size_t n) const;
  /// Q(B) for an arbitrary set, within eps.
  MeasureValue probability(const NatSet& B, double eps = kDefaultEps) const;
  /// Smallest n with CDF(n) >= u.
  std::size_t quantile(double u) const;
  /// Index past which the remaining mass is below one double ulp of 1.
  std::size_t horizon() const noexcept { return horizon_; }

 private:
  PowerSeriesPmf() = default;
  void finish(double eps);

  std::optional<Form> form_;
  TaylorMeasure weights_;
  MeasureValue normalizer_;
  std::size_t horizon_ = 0;
};

/// Normalized Jordan parts of a signed measure:
/// T(B) = mass_pos Q+(B) - mass_neg Q-(B).
struct TaylorProbabilityPair {
  TaylorMeasure measure;
  MeasureValue mass_pos;
  MeasureValue mass_neg;
  /// Omitted when the corresponding side carries no mass.
  std::optional<PowerSeriesPmf> q_pos;
  std::optional<PowerSeriesPmf> q_neg;

  double f_pos(std::size_t n) const { return q_pos ? q_pos->pmf(n) : 0.0; }
  double f_neg(std::size_t n) const { return q_neg ? q_neg->pmf(n) : 0.0; }
  /// mass_pos Q+(B) - mass_neg Q-(B).
  MeasureValue reconstruct(const NatSet& B, double eps = kDefaultEps) const;
};

/// Throws DegenerateDistribution for the zero measure.
TaylorProbabilityPair probability_pair(const TaylorMeasure& T, double eps = kDefaultEps);

/// T with a_n = n! p_n / gamma^n, so that T is a probability measure with
/// pmf p. `probabilities` must be nonnegative and sum to 1 within 1e-12.
TaylorMeasure from_pmf(const CoefficientSequence& probabilities, double gamma);
TaylorMeasure from_pmf(const PowerSeriesPmf& pmf, double gamma);

/// p(n) = b1_n zeta1^n / n! - b2_n zeta2^n / n!, canonical presentation.
TaylorMeasure measure_from_densities(double zeta1, const CoefficientSequence& b1, double zeta2,
                                     const CoefficientSequence& b2);

enum class PoissonTaylorPresentation {
  Unit,   ///< gamma = 1, a_n = zeta1^n - zeta2^n
  Zeta1,  ///< gamma = zeta1, a_n = 1 - (zeta2 / zeta1)^n
  Zeta2,  ///< gamma = zeta2, a_n = (zeta1 / zeta2)^n - 1
};

/// The difference of two Poisson weight measures in one of its equivalent
/// presentations.
TaylorMeasure poisson_taylor(double zeta1, double zeta2,
                             PoissonTaylorPresentation presentation = PoissonTaylorPresentation::Unit);

}  // namespace taylor
