#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "taylor/measure.hpp"

namespace taylor {

/// rho(T1, T2)(B) = sum_{n in B} a_{n,1} a_{n,2} (gamma_1 gamma_2)^n / n!,
/// evaluated through the presentation-free form n! p1(n) p2(n).
MeasureValue inner_product(const TaylorMeasure& T1, const TaylorMeasure& T2, const NatSet& B,
                           double eps = kDefaultEps);

/// sqrt(rho(T, T)(B)).
MeasureValue norm(const TaylorMeasure& T, const NatSet& B, double eps = kDefaultEps);

/// ||T1 - T2||_rho on B.
MeasureValue distance(const TaylorMeasure& T1, const TaylorMeasure& T2, const NatSet& B,
                      double eps = kDefaultEps);

/// Certificate for the summands n! p1(n) p2(n) viewed as the terms of a
/// gamma = 1 measure.
GrowthCertificate product_certificate(const GrowthCertificate& canonical1, const GrowthCertificate& canonical2);

/// A finite-support measure with dyadic-rational terms within rho-distance
/// `tol` of T. `max_support` = 0 lets the truncation plan choose the support;
/// otherwise the support is {0..max_support} and must be wide enough.
TaylorMeasure rational_approximation(const TaylorMeasure& T, double tol, std::size_t max_support = 0);

struct HilbertAxiomReport {
  std::size_t pairs = 0;
  /// All residuals below are relative to the natural scale of the pair.
  double symmetry = 0.0;
  double bilinearity = 0.0;
  /// max(0, rho12^2 - rho11 rho22) / (rho11 rho22)
  double cauchy_schwarz_violation = 0.0;
  double rho_parallelogram = 0.0;
  /// Parallelogram residual of the total-variation norm, absolute and
  /// relative. Generic pairs violate it.
  double tv_parallelogram = 0.0;
  double tv_parallelogram_relative = 0.0;
};

HilbertAxiomReport hilbert_axiom_report(const std::vector<TaylorMeasure>& samples, const NatSet& B,
                                        double eps = kDefaultEps, std::uint64_t seed = 0);

}  // namespace taylor
