#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <ranges>
#include <vector>

#include "oracle.hpp"
#include "taylor/error.hpp"
#include "taylor/term_kernel.hpp"

namespace taylor {
namespace {

using testing::Big;
using testing::big_term;
using testing::oracle_term;
using testing::ulps;

CoefficientSequence mixed_prefix() { return CoefficientSequence::finite({1.0, -2.0, 3.0}); }

TEST(Term, UnitCoefficientsAtOne) {
  const SignedLogTerm t = term(CoefficientSequence::constant(1.0), 1.0, 3);
  EXPECT_EQ(t.sign, 1);
  EXPECT_LE(ulps(t.value, 1.0 / 6.0), 1.0);
}

TEST(Term, ZeroToTheZeroIsOne) {
  const SignedLogTerm t = term(CoefficientSequence::constant(1.0), 0.0, 0);
  EXPECT_EQ(t.sign, 1);
  EXPECT_EQ(t.value, 1.0);
  EXPECT_EQ(term(CoefficientSequence::constant(1.0), 0.0, 1).sign, 0);
}

TEST(Term, NegativeCoefficient) {
  const SignedLogTerm t = term(mixed_prefix(), 2.0, 1);
  EXPECT_EQ(t.sign, -1);
  EXPECT_EQ(t.value, -4.0);
}

TEST(Term, SignZeroIffLogMagnitudeIsMinusInfinity) {
  const auto seq = mixed_prefix();
  for (std::size_t n = 0; n < 6; ++n) {
    const SignedLogTerm t = term(seq, 1.5, n);
    EXPECT_EQ(t.sign == 0, std::isinf(t.log_mag) && t.log_mag < 0) << n;
  }
}

TEST(Term, NegativeGammaAlternatesSign) {
  const auto ones = CoefficientSequence::constant(1.0);
  for (std::size_t n = 0; n < 10; ++n) {
    EXPECT_EQ(term(ones, -1.0, n).sign, n % 2 == 0 ? 1 : -1);
  }
}

TEST(Term, MatchesMultiprecisionOracleWithinFourUlp) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> index(0, 170);
  std::uniform_real_distribution<double> gamma_dist(-50.0, 50.0);
  std::uniform_real_distribution<double> coef_dist(-1e6, 1e6);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = index(rng);
    const double gamma = gamma_dist(rng);
    const double a = coef_dist(rng);
    const double expected = oracle_term(a, gamma, n);
    if (!std::isnormal(expected)) {
      continue;
    }
    const SignedLogTerm t = term(CoefficientSequence::constant(a), gamma, n);
    ASSERT_LE(ulps(t.value, expected), 4.0) << "n=" << n << " gamma=" << gamma << " a=" << a;
    const double from_log = t.sign * std::exp(static_cast<double>(t.log_mag));
    // The log form carries ~|log| * 2^-64 relative error in extended precision.
    EXPECT_NEAR(from_log / expected, 1.0, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 2000);
}

TEST(Term, LargeIndicesStayFinite) {
  const auto ones = CoefficientSequence::constant(1.0);
  const SignedLogTerm t = term(ones, 300.0, 300);
  EXPECT_EQ(t.sign, 1);
  EXPECT_TRUE(std::isfinite(t.value));
  const double expected = big_term(1.0, 300.0, 300).convert_to<double>();
  EXPECT_LE(ulps(t.value, expected), 64.0);
  const SignedLogTerm tiny = term(ones, 1.0, 5000);
  EXPECT_EQ(tiny.value, 0.0);
  EXPECT_EQ(tiny.sign, 1);
  EXPECT_TRUE(std::isfinite(tiny.log_mag));
}

TEST(Certificate, FinitePrefixReportsFiniteSupport) {
  const auto c = CoefficientSequence::finite({1.0, 0.0, 2.0, 0.0, 0.0}).certificate();
  ASSERT_TRUE(std::holds_alternative<cert::FiniteSupport>(c));
  EXPECT_EQ(std::get<cert::FiniteSupport>(c).last, 2U);
  EXPECT_EQ(std::get<cert::FiniteSupport>(c).max_abs, 2.0);
}

TEST(Certificate, DerivedKinds) {
  EXPECT_TRUE(std::holds_alternative<cert::Bounded>(CoefficientSequence::constant(3.0).certificate()));
  EXPECT_TRUE(std::holds_alternative<cert::GeometricEquiv>(CoefficientSequence::geometric(1.0, 0.5).certificate()));
  EXPECT_TRUE(std::holds_alternative<cert::Bounded>(CoefficientSequence::geometric(2.0, -1.0).certificate()));
  EXPECT_TRUE(is_unverified(CoefficientSequence::from_rule([](std::size_t) { return 1.0; }, cert::Unverified{}).certificate()));
}

TEST(Certificate, SpotChecksHold) {
  const CoefficientSequence seqs[] = {
      CoefficientSequence({5.0, -4.0, 3.0}, CoefficientSequence::GeometricTail{2.0, 1.5}),
      CoefficientSequence({-9.0}, CoefficientSequence::ConstantTail{-2.0}),
      CoefficientSequence::geometric(-3.0, -0.25),
      CoefficientSequence::finite({0.5, 7.0}),
  };
  for (const auto& s : seqs) {
    for (std::size_t n = 0; n < 200; ++n) {
      EXPECT_TRUE(satisfies_certificate(s, n)) << describe(s.certificate()) << " n=" << n;
    }
  }
}

TEST(TailBound, BoundedAtOne) {
  const double b = tail_bound(cert::Bounded{1.0}, 1.0, 10);
  // 1/11! * 12/11 = 2.7330e-8, stated as 2.73e-8 to three figures.
  EXPECT_LE(b, 2.735e-8);
  Big direct = 0;
  for (std::size_t n = 11; n <= 60; ++n) {
    direct += big_term(1.0, 1.0, n);
  }
  EXPECT_GE(b, direct.convert_to<double>());
}

TEST(TailBound, FiniteSupportIsExactlyZeroPastSupport) {
  EXPECT_EQ(tail_bound(cert::FiniteSupport{2, 1.0}, 5.0, 2), 0.0);
  EXPECT_EQ(tail_bound(cert::FiniteSupport{2, 1.0}, 5.0, 9), 0.0);
  EXPECT_GT(tail_bound(cert::FiniteSupport{2, 1.0}, 5.0, 1), 0.0);
}

TEST(TailBound, GeometricEquiv) {
  const double b = tail_bound(cert::GeometricEquiv{1.0, 2.0}, 1.0, 20);
  // 2 * 2^21/21! * 22/20 = 9.030e-14, stated as 9.0e-14 to two figures.
  EXPECT_LE(b, 9.05e-14);
  Big direct = 0;
  for (std::size_t n = 21; n <= 80; ++n) {
    direct += 2 * big_term(1.0, 2.0, n);
  }
  EXPECT_GE(b, direct.convert_to<double>());
}

TEST(TailBound, UnverifiedIsUnbounded) { EXPECT_EQ(tail_bound(cert::Unverified{}, 1.0, 5), kUnbounded); }

TEST(TailBound, DominatesTwoHundredTermsRandomized) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double M = 0.1 + 10.0 * u(rng);
    const double b = -3.0 + 6.0 * u(rng);
    const double gamma = -8.0 + 16.0 * u(rng);
    const std::size_t N = static_cast<std::size_t>(40.0 * u(rng));
    const auto seq = trial % 2 == 0 ? CoefficientSequence::constant(M) : CoefficientSequence::geometric(M, b);
    Big direct = 0;
    for (std::size_t n = N + 1; n <= N + 200; ++n) {
      direct += boost::multiprecision::abs(big_term(seq.at(n), gamma, n));
    }
    EXPECT_GE(tail_bound(seq.certificate(), gamma, N), direct.convert_to<double>())
        << describe(seq.certificate()) << " gamma=" << gamma << " N=" << N;
  }
}

TEST(TailBound, NonIncreasingInN) {
  const GrowthCertificate certs[] = {cert::Bounded{2.0}, cert::GeometricEquiv{1.0, 3.0},
                                     cert::FactorialGeometric{1.0, 0.5}, cert::FiniteSupport{30, 2.0}};
  for (const auto& c : certs) {
    double prev = kUnbounded;
    for (std::size_t N = 0; N < 120; ++N) {
      const double b = tail_bound(c, 1.7, N);
      EXPECT_LE(b, prev) << describe(c) << " N=" << N;
      prev = b;
    }
  }
}

TEST(Plan, BoundedAtOne) {
  const TruncationPlan p = plan_truncation(cert::Bounded{1.0}, 1.0, 1e-12);
  EXPECT_GE(p.N, 14U);
  EXPECT_LE(p.N, 17U);
  EXPECT_LE(p.tail_bound, 1e-12);
  EXPECT_GT(tail_bound(cert::Bounded{1.0}, 1.0, p.N - 1), 1e-12);
}

TEST(Plan, FiniteSupport) {
  const TruncationPlan p = plan_truncation(cert::FiniteSupport{5, 1.0}, 100.0, 1e-300);
  EXPECT_EQ(p.N, 5U);
  EXPECT_EQ(p.tail_bound, 0.0);
}

TEST(Plan, UnverifiedThrows) {
  try {
    plan_truncation(cert::Unverified{}, 1.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergenceUnknown);
  }
}

TEST(Plan, FactorialOutsideRadiusThrows) {
  EXPECT_THROW(plan_truncation(cert::FactorialGeometric{1.0, 1.0}, 1.0, 1e-6), Error);
}

TEST(Plan, MinimalityRandomized) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const GrowthCertificate c = trial % 2 == 0 ? GrowthCertificate(cert::Bounded{0.5 + 5 * u(rng)})
                                               : GrowthCertificate(cert::GeometricEquiv{0.5 + u(rng), 4 * u(rng)});
    const double gamma = -20.0 + 40.0 * u(rng);
    const double eps = std::pow(10.0, -1.0 - 14.0 * u(rng));
    const TruncationPlan p = plan_truncation(c, gamma, eps);
    EXPECT_LE(p.tail_bound, eps);
    EXPECT_EQ(p.tail_bound, tail_bound(c, gamma, p.N));
    if (p.N > 0) {
      EXPECT_GT(tail_bound(c, gamma, p.N - 1), eps);
    }
  }
}

TEST(SumTerms, MixedSigns) {
  const PartSums s = sum_terms(mixed_prefix(), 1.0, std::vector<int>{0, 1, 2});
  EXPECT_EQ(s.pos, 2.5);
  EXPECT_EQ(s.neg, 2.0);
}

TEST(SumTerms, PartialExponential) {
  const PartSums s = sum_terms(CoefficientSequence::constant(1.0), 1.0, std::views::iota(0, 21));
  EXPECT_NEAR(s.pos, std::exp(1.0), 1e-15);
  EXPECT_EQ(s.neg, 0.0);
}

TEST(SumTerms, EmptyRange) {
  const PartSums s = sum_terms(mixed_prefix(), 3.0, std::vector<int>{});
  EXPECT_EQ(s.pos, 0.0);
  EXPECT_EQ(s.neg, 0.0);
}

TEST(SumTerms, PermutationInvariant) {
  std::mt19937_64 rng(3);
  const auto seq = CoefficientSequence::geometric(1.7, -1.3);
  std::vector<int> idx(80);
  std::iota(idx.begin(), idx.end(), 0);
  const PartSums base = sum_terms(seq, 2.5, idx);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const PartSums s = sum_terms(seq, 2.5, idx);
    const double scale = std::max(base.pos, base.neg);
    const double ulp = std::nextafter(scale, 1e300) - scale;
    EXPECT_LE(std::abs(s.pos - base.pos), 8 * ulp);
    EXPECT_LE(std::abs(s.neg - base.neg), 8 * ulp);
  }
}

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

}  // namespace
}  // namespace taylor
