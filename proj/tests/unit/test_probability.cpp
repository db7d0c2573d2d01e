#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "taylor/error.hpp"
#include "taylor/probability.hpp"

namespace taylor {
namespace {

TaylorMeasure three_terms() { return TaylorMeasure(CoefficientSequence::finite({1.0, -2.0, 3.0}), 1.0); }

CoefficientSequence identity_b() {
  return CoefficientSequence::from_rule([](std::size_t n) { return static_cast<double>(n); },
                                        cert::GeometricEquiv{1.0, 1.5});
}

CoefficientSequence even_b() {
  return CoefficientSequence::from_rule([](std::size_t n) { return n % 2 == 0 ? 1.0 : 0.0; }, cert::Bounded{1.0});
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

TEST(Normalizer, Examples) {
  EXPECT_NEAR(normalizer(1.0, CoefficientSequence::constant(1.0)).value, std::exp(1.0), 1e-12);
  EXPECT_EQ(normalizer(0.0, CoefficientSequence::finite({5.0, 2.0})).value, 5.0);
  EXPECT_NEAR(normalizer(2.0, identity_b()).value, 2.0 * std::exp(2.0), 1e-11);
}

TEST(Normalizer, Errors) {
  EXPECT_EQ(kind_of([] { normalizer(1.0, CoefficientSequence()); }), ErrorKind::DegenerateDistribution);
  EXPECT_EQ(kind_of([] { normalizer(1.0, CoefficientSequence::from_rule([](std::size_t) { return 1.0; },
                                                                         cert::Unverified{})); }),
            ErrorKind::DivergenceUnknown);
}

TEST(Pmf, PoissonValues) {
  const PowerSeriesPmf p = PowerSeriesPmf::poisson(1.0);
  EXPECT_NEAR(p.pmf(0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(p.quantile(0.367), 0U);
  EXPECT_EQ(p.quantile(0.0), 0U);
  EXPECT_EQ(p.quantile(0.37), 1U);
  for (std::size_t n = 0; n < 25; ++n) {
    const double expected = (boost::multiprecision::exp(testing::Big(-1)) / testing::big_factorial(n)).convert_to<double>();
    EXPECT_LE(testing::ulps(p.pmf(n), expected), 8.0) << n;
  }
}

TEST(Pmf, PointMassAtZero) {
  const PowerSeriesPmf p(0.0, CoefficientSequence::constant(1.0));
  EXPECT_EQ(p.pmf(0), 1.0);
  for (std::size_t n = 1; n < 10; ++n) {
    EXPECT_EQ(p.pmf(n), 0.0);
  }
  EXPECT_EQ(p.quantile(0.999), 0U);
}

TEST(Pmf, SumsToOneAndCdfMonotone) {
  for (double zeta : {0.1, 1.0, 4.0, 20.0}) {
    const PowerSeriesPmf p = PowerSeriesPmf::poisson(zeta);
    CompensatedSum s;
    double previous = 0.0;
    for (std::size_t n = 0; n <= p.horizon(); ++n) {
      s.add(p.pmf(n));
      EXPECT_GE(p.cdf(n), previous);
      previous = p.cdf(n);
    }
    EXPECT_NEAR(s.value(), 1.0, 1e-13);
    EXPECT_NEAR(p.probability(NatSet::all()).value, 1.0, 1e-12);
  }
}

TEST(Pmf, QuantileIsSmallestIndex) {
  const PowerSeriesPmf p = PowerSeriesPmf::poisson(3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double v = u(rng);
    const std::size_t q = p.quantile(v);
    EXPECT_GE(p.cdf(q), v);
    if (q > 0) {
      EXPECT_LT(p.cdf(q - 1), v);
    }
  }
}

TEST(Pmf, QuantileTailUnresolved) {
  const PowerSeriesPmf p = PowerSeriesPmf::poisson(1.0);
  EXPECT_EQ(kind_of([&] { p.quantile(1.0); }), ErrorKind::QuantileTailUnresolved);
  EXPECT_EQ(kind_of([&] { p.quantile(1.5); }), ErrorKind::InvalidArgument);
  const PowerSeriesPmf finite(1.0, CoefficientSequence::finite({1.0, 1.0, 2.0}));
  EXPECT_EQ(finite.quantile(1.0), 2U);
}

TEST(Pmf, NegativeWeightsRejected) {
  EXPECT_THROW(PowerSeriesPmf(1.0, CoefficientSequence::finite({1.0, -1.0})), Error);
}

TEST(ProbabilityPair, ThreeTerms) {
  const TaylorMeasure T = TaylorMeasure::from_terms(
      [](std::size_t n) { return n == 0 ? 1.0 : n == 1 ? -2.0 : n == 2 ? 1.5 : 0.0; }, cert::FiniteSupport{2, 3.0});
  const TaylorProbabilityPair P = probability_pair(T);
  EXPECT_EQ(P.mass_pos.value, 2.5);
  EXPECT_EQ(P.mass_neg.value, 2.0);
  EXPECT_DOUBLE_EQ(P.f_pos(0), 0.4);
  EXPECT_DOUBLE_EQ(P.f_pos(2), 0.6);
  EXPECT_EQ(P.f_pos(1), 0.0);
  EXPECT_EQ(P.f_neg(1), 1.0);
  EXPECT_EQ(P.f_neg(0), 0.0);
  EXPECT_DOUBLE_EQ(P.reconstruct(NatSet::finite({0, 1})).value, -1.0);
  EXPECT_DOUBLE_EQ(evaluate(T, NatSet::finite({0, 1})).value, -1.0);
}

TEST(ProbabilityPair, PositiveMeasureOmitsNegativeSide) {
  const TaylorProbabilityPair P = probability_pair(TaylorMeasure(CoefficientSequence::constant(1.0), 1.0));
  EXPECT_EQ(P.mass_neg.value, 0.0);
  EXPECT_FALSE(P.q_neg.has_value());
  ASSERT_TRUE(P.q_pos.has_value());
  for (std::size_t n = 0; n < 20; ++n) {
    EXPECT_NEAR(P.f_pos(n), std::exp(-1.0) / std::tgamma(n + 1.0), 1e-15);
  }
}

TEST(ProbabilityPair, ZeroMeasureIsDegenerate) {
  EXPECT_EQ(kind_of([] { probability_pair(TaylorMeasure()); }), ErrorKind::DegenerateDistribution);
}

TEST(ProbabilityPair, ReconstructionMatchesEvaluateRandomized) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const TaylorMeasure T(
        CoefficientSequence({u(rng), u(rng), u(rng)}, CoefficientSequence::GeometricTail{u(rng), 1.5 * u(rng)}),
        2.0 * u(rng));
    std::vector<std::size_t> e(rng() % 5);
    for (auto& v : e) {
      v = rng() % 12;
    }
    const NatSet B = rng() % 2 == 0 ? NatSet::finite(e) : NatSet::cofinite(e);
    const TaylorProbabilityPair P = probability_pair(T);
    const MeasureValue lhs = evaluate(T, B);
    const MeasureValue rhs = P.reconstruct(B);
    EXPECT_LE(std::abs(lhs.value - rhs.value), lhs.abs_error + rhs.abs_error + 1e-14) << trial;
    if (P.q_pos) {
      EXPECT_NEAR(P.q_pos->probability(NatSet::all()).value, 1.0, 1e-12);
    }
    if (P.q_neg) {
      EXPECT_NEAR(P.q_neg->probability(NatSet::all()).value, 1.0, 1e-12);
    }
    for (std::size_t n = 0; n < 30; ++n) {
      EXPECT_FALSE(P.f_pos(n) > 0.0 && P.f_neg(n) > 0.0);
    }
  }
}

TEST(FromPmf, GeometricCoefficients) {
  const CoefficientSequence p = CoefficientSequence::from_rule([](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n) - 1); },
                                                              cert::GeometricEquiv{0.25, 0.5});
  const TaylorMeasure T = from_pmf(p, 1.0);
  EXPECT_DOUBLE_EQ(T.coefficients().at(0), 0.5);
  EXPECT_DOUBLE_EQ(T.coefficients().at(1), 0.25);
  EXPECT_DOUBLE_EQ(T.coefficients().at(2), 0.25);
  EXPECT_DOUBLE_EQ(T.coefficients().at(3), 0.375);
}

TEST(FromPmf, PointMass) {
  const TaylorMeasure T = from_pmf(CoefficientSequence::finite({1.0}), 7.0);
  EXPECT_EQ(T.coefficients().at(0), 1.0);
  EXPECT_EQ(T.coefficients().at(1), 0.0);
  EXPECT_EQ(T.coefficients().at(5), 0.0);
  EXPECT_EQ(evaluate(T, NatSet::all()).value, 1.0);
}

TEST(FromPmf, PoissonRoundTrip) {
  const PowerSeriesPmf poisson = PowerSeriesPmf::poisson(2.0);
  const TaylorMeasure T = from_pmf(poisson, 2.0);
  for (std::size_t n = 0; n < 40; ++n) {
    EXPECT_NEAR(T.coefficients().at(n), std::exp(-2.0), 1e-15);
  }
  const TaylorProbabilityPair P = probability_pair(T);
  EXPECT_LE(std::abs(P.mass_pos.value - 1.0), P.mass_pos.abs_error);
  EXPECT_EQ(P.mass_neg.value, 0.0);
  for (std::size_t n = 0; n < 40; ++n) {
    EXPECT_LE(std::abs(P.f_pos(n) - poisson.pmf(n)), 1e-15);
  }
}

TEST(FromPmf, InvalidPmf) {
  EXPECT_EQ(kind_of([] { from_pmf(CoefficientSequence::finite({0.5, 0.6}), 1.0); }), ErrorKind::InvalidPmf);
  EXPECT_EQ(kind_of([] { from_pmf(CoefficientSequence::finite({1.5, -0.5}), 1.0); }), ErrorKind::InvalidPmf);
}

TEST(FromPmf, RoundTripIsGammaIndependent) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(1 + rng() % 20);
    double total = 0.0;
    for (double& v : w) {
      v = u(rng) < 0.2 ? 0.0 : u(rng);
      total += v;
    }
    if (total == 0.0) {
      w[0] = total = 1.0;
    }
    for (double& v : w) {
      v /= total;
    }
    const CoefficientSequence p = CoefficientSequence::finite(w);
    for (double gamma : {0.5, 1.0, 3.0}) {
      const TaylorProbabilityPair P = probability_pair(from_pmf(p, gamma));
      EXPECT_FALSE(P.q_neg.has_value());
      for (std::size_t n = 0; n < w.size() + 3; ++n) {
        EXPECT_NEAR(P.f_pos(n), n < w.size() ? w[n] : 0.0, 1e-12);
      }
    }
  }
}

TEST(MeasureFromDensities, PoissonTaylor) {
  const CoefficientSequence one = CoefficientSequence::constant(1.0);
  const TaylorMeasure T = measure_from_densities(2.0, one, 1.0, one);
  EXPECT_NEAR(evaluate(T, NatSet::all()).value, std::exp(2.0) - std::exp(1.0), 1e-10);
  EXPECT_DOUBLE_EQ(evaluate(T, NatSet::finite({0, 1, 2})).value, 2.5);
  const TaylorMeasure Z = measure_from_densities(1.5, one, 1.5, one);
  EXPECT_EQ(evaluate(Z, NatSet::all()).value, 0.0);
}

TEST(MeasureFromDensities, UnverifiedSide) {
  const CoefficientSequence u = CoefficientSequence::from_rule([](std::size_t) { return 1.0; }, cert::Unverified{});
  EXPECT_EQ(kind_of([&] { measure_from_densities(1.0, u, 1.0, CoefficientSequence::constant(1.0)); }),
            ErrorKind::DivergenceUnknown);
}

TEST(PoissonTaylor, PresentationsAgree) {
  const TaylorMeasure unit = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Unit);
  const TaylorMeasure z1 = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Zeta1);
  const TaylorMeasure z2 = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Zeta2);
  for (std::size_t n = 0; n <= 60; ++n) {
    const testing::Big exact =
        (boost::multiprecision::pow(testing::Big(2), static_cast<unsigned>(n)) - 1) / testing::big_factorial(n);
    const double e = exact.convert_to<double>();
    EXPECT_LE(testing::ulps(unit.term_value(n), e), 4.0) << n;
    EXPECT_LE(testing::ulps(z1.term_value(n), e), 4.0) << n;
    EXPECT_LE(testing::ulps(z2.term_value(n), e), 4.0) << n;
  }
}

TEST(Normalizer, EvenIndicatorIsCosh) {
  EXPECT_NEAR(normalizer(1.0, even_b()).value, std::cosh(1.0), 1e-12);
}

}  // namespace
}  // namespace taylor
