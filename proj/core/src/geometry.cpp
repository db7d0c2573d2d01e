#include "taylor/geometry.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>

#include "taylor/error.hpp"

namespace taylor {

namespace {

double safe_ratio(double num, double den) {
  if (den <= 0.0) {
    return num == 0.0 ? 0.0 : kUnbounded;
  }
  return num / den;
}

}  // namespace

GrowthCertificate product_certificate(const GrowthCertificate& canonical1, const GrowthCertificate& canonical2) {
  const auto* fs1 = std::get_if<cert::FiniteSupport>(&canonical1);
  const auto* fs2 = std::get_if<cert::FiniteSupport>(&canonical2);
  if (fs1 && fs2) {
    return cert::FiniteSupport{std::min(fs1->last, fs2->last), fs1->max_abs * fs2->max_abs};
  }
  if (fs1 || fs2) {
    return cert::FiniteSupport{fs1 ? fs1->last : fs2->last, kUnbounded};
  }
  const auto e1 = envelope_of(canonical1);
  const auto e2 = envelope_of(canonical2);
  if (!e1 || !e2 || (e1->factorial && e2->factorial)) {
    return cert::Unverified{};
  }
  return certificate_of({e1->scale * e2->scale, e1->rate * e2->rate, e1->factorial || e2->factorial});
}

MeasureValue inner_product(const TaylorMeasure& T1, const TaylorMeasure& T2, const NatSet& B, double eps) {
  GrowthCertificate tail = cert::Unverified{};
  if (!B.is_finite()) {
    if (is_unverified(T1.certificate()) || is_unverified(T2.certificate())) {
      throw Error(ErrorKind::DivergenceUnknown, "inner product over an infinite set needs certified operands");
    }
    tail = product_certificate(canonical_certificate(T1), canonical_certificate(T2));
    if (is_unverified(tail)) {
      throw Error(ErrorKind::DivergenceUnknown,
                  "the operands' certificates do not imply convergence of the inner product");
    }
  }
  auto summand = [&T1, &T2](std::size_t n) -> double {
    const SignedLogTerm t1 = T1.term(n);
    if (t1.sign == 0) {
      return 0.0;
    }
    const SignedLogTerm t2 = T2.term(n);
    if (t2.sign == 0) {
      return 0.0;
    }
    return t1.sign * t2.sign * static_cast<double>(std::exp(t1.log_mag + t2.log_mag + log_factorial(n)));
  };
  const SeriesSums s = sum_series(summand, tail, 1.0, B, eps);
  const double value = s.pos - s.neg;
  return {value, s.abs_error + DBL_EPSILON * std::abs(value)};
}

MeasureValue norm(const TaylorMeasure& T, const NatSet& B, double eps) {
  const MeasureValue ip = inner_product(T, T, B, eps);
  if (ip.value < 0.0) {
    if (-ip.value > ip.abs_error) {
      throw Error(ErrorKind::NegativeRadicand, "rho(T, T) is negative beyond its error bound");
    }
    return {0.0, std::sqrt(ip.abs_error)};
  }
  const double v = std::sqrt(ip.value);
  const double err = v > 0.0 ? std::min(std::sqrt(ip.abs_error), ip.abs_error / v) : std::sqrt(ip.abs_error);
  return {v, err};
}

MeasureValue distance(const TaylorMeasure& T1, const TaylorMeasure& T2, const NatSet& B, double eps) {
  return norm(linear_combination(1.0, T1, -1.0, T2), B, eps);
}

TaylorMeasure rational_approximation(const TaylorMeasure& T, double tol, std::size_t max_support) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  }
  const GrowthCertificate c = canonical_certificate(T);
  if (is_unverified(c)) {
    throw Error(ErrorKind::DivergenceUnknown, "cannot bound the approximation error of an unverified measure");
  }
  const GrowthCertificate squared = product_certificate(c, c);
  // Half of tol^2 / 2 for the omitted tail, half for rounding, leaving room
  // for floating error in a recomputed distance.
  const double budget = tol * tol / 4.0;

  std::size_t N = 0;
  if (max_support == 0) {
    N = plan_truncation(squared, 1.0, budget).N;
  } else {
    N = max_support;
    if (tail_bound(squared, 1.0, N) > budget) {
      throw Error(ErrorKind::InvalidArgument, "support too small for the requested tolerance");
    }
  }

  const long double log_per_index = std::log(static_cast<long double>(budget) / (N + 1));
  std::vector<double> q(N + 1, 0.0);
  double max_coefficient = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    const double p = T.term_value(n);
    if (p == 0.0) {
      continue;
    }
    // n! delta^2 <= budget / (N + 1) with delta = 2^-(k+1).
    const long double log2_delta = 0.5L * (log_per_index - log_factorial(n)) / std::log(2.0L);
    const int k = static_cast<int>(std::clamp<long double>(std::ceil(-1.0L - log2_delta), 0.0L, 1100.0L));
    const double scaled_p = std::ldexp(p, k);
    q[n] = std::abs(scaled_p) >= 0x1p53 ? p : std::ldexp(std::nearbyint(scaled_p), -k);
    if (q[n] != 0.0) {
      max_coefficient = std::max(
          max_coefficient,
          static_cast<double>(std::exp(std::log(std::abs(static_cast<long double>(q[n]))) + log_factorial(n))));
    }
  }
  return TaylorMeasure::from_terms([q = std::move(q)](std::size_t n) { return n < q.size() ? q[n] : 0.0; },
                                   cert::FiniteSupport{N, max_coefficient * (1.0 + 1e-12)}, "dyadic");
}

HilbertAxiomReport hilbert_axiom_report(const std::vector<TaylorMeasure>& samples, const NatSet& B, double eps,
                                        std::uint64_t seed) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "axiom report needs at least two measures");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coefficient(-2.0, 2.0);

  const std::size_t m = samples.size();
  std::vector<double> self(m);
  std::vector<double> tv(m);
  for (std::size_t i = 0; i < m; ++i) {
    self[i] = inner_product(samples[i], samples[i], B, eps).value;
    tv[i] = total_variation(samples[i], B, eps).value;
  }

  HilbertAxiomReport r;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const TaylorMeasure& Ti = samples[i];
      const TaylorMeasure& Tj = samples[j];
      const double rij = inner_product(Ti, Tj, B, eps).value;
      const double rji = inner_product(Tj, Ti, B, eps).value;
      const double scale = std::sqrt(self[i] * self[j]);
      r.symmetry = std::max(r.symmetry, safe_ratio(std::abs(rij - rji), scale));

      const double alpha = coefficient(rng);
      const double beta = coefficient(rng);
      const TaylorMeasure& Tk = samples[(j + 1) % m];
      const std::size_t k = (j + 1) % m;
      const double lhs = inner_product(linear_combination(alpha, Ti, beta, Tj), Tk, B, eps).value;
      const double rhs = alpha * inner_product(Ti, Tk, B, eps).value + beta * inner_product(Tj, Tk, B, eps).value;
      const double bil_scale = (std::abs(alpha) * std::sqrt(self[i]) + std::abs(beta) * std::sqrt(self[j])) *
                               std::sqrt(self[k]);
      r.bilinearity = std::max(r.bilinearity, safe_ratio(std::abs(lhs - rhs), bil_scale));

      r.cauchy_schwarz_violation =
          std::max(r.cauchy_schwarz_violation, safe_ratio(std::max(0.0, rij * rij - self[i] * self[j]), self[i] * self[j]));

      const TaylorMeasure sum = linear_combination(1.0, Ti, 1.0, Tj);
      const TaylorMeasure diff = linear_combination(1.0, Ti, -1.0, Tj);
      const double ns = inner_product(sum, sum, B, eps).value;
      const double nd = inner_product(diff, diff, B, eps).value;
      r.rho_parallelogram = std::max(
          r.rho_parallelogram, safe_ratio(std::abs(ns + nd - 2.0 * self[i] - 2.0 * self[j]), 2.0 * (self[i] + self[j])));

      const double ts = total_variation(sum, B, eps).value;
      const double td = total_variation(diff, B, eps).value;
      const double tv_res = std::abs(ts * ts + td * td - 2.0 * tv[i] * tv[i] - 2.0 * tv[j] * tv[j]);
      r.tv_parallelogram = std::max(r.tv_parallelogram, tv_res);
      r.tv_parallelogram_relative =
          std::max(r.tv_parallelogram_relative, safe_ratio(tv_res, 2.0 * (tv[i] * tv[i] + tv[j] * tv[j])));
      ++r.pairs;
    }
  }
  return r;
}

}  // namespace taylor
