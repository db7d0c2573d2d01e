#include "taylor/term_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "taylor/error.hpp"

namespace taylor {

namespace {

constexpr std::size_t kFactorialTableMax = 170;
// Relative inflation applied to computed bounds so rounding cannot push a
// certified bound below the quantity it bounds.
constexpr double kBoundSlack = 1.0 + 1e-12;

const std::array<long double, kFactorialTableMax + 1>& factorial_table() {
  static const auto table = [] {
    std::array<long double, kFactorialTableMax + 1> t{};
    t[0] = 1.0L;
    for (std::size_t k = 1; k <= kFactorialTableMax; ++k) {
      t[k] = t[k - 1] * static_cast<long double>(k);
    }
    return t;
  }();
  return table;
}

long double lgamma_ld(long double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgammal_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Bound on sum_{n > N} M g^n / n! by ratio-test domination once N is past
// the hump of the series, capped by the global bound M e^g.
double ratio_tail(double M, double g, std::size_t N) {
  if (M == 0.0 || g == 0.0) {
    return 0.0;
  }
  const double global = M * std::exp(g);
  const long double next = static_cast<long double>(N) + 2.0L;
  if (next <= g) {
    return global * kBoundSlack;
  }
  const long double log_first = std::log(static_cast<long double>(M)) +
                                (static_cast<long double>(N) + 1.0L) * std::log(static_cast<long double>(g)) -
                                log_factorial(N + 1);
  const long double log_ratio_sum = -std::log1p(-static_cast<long double>(g) / next);
  const double bound = static_cast<double>(std::exp(log_first + log_ratio_sum));
  return std::min(global, bound) * kBoundSlack;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// LogMagnitude

LogMagnitude LogMagnitude::of(double x) {
  if (x == 0.0) {
    return {};
  }
  return {x > 0.0 ? 1 : -1, std::log(std::abs(static_cast<long double>(x)))};
}

double LogMagnitude::value() const {
  if (sign == 0) {
    return 0.0;
  }
  return sign * static_cast<double>(std::exp(log_abs));
}

// ---------------------------------------------------------------------------
// Certificates

bool is_unverified(const GrowthCertificate& c) { return std::holds_alternative<cert::Unverified>(c); }

bool is_finite_support(const GrowthCertificate& c) {
  return std::holds_alternative<cert::FiniteSupport>(c);
}

double coefficient_bound(const GrowthCertificate& c, std::size_t n) {
  return std::visit(
      [n](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, cert::FiniteSupport>) {
          return n <= k.last ? k.max_abs : 0.0;
        } else if constexpr (std::is_same_v<K, cert::Bounded>) {
          return k.M;
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          return 2.0 * k.M * std::pow(std::abs(k.b), static_cast<double>(n));
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          if (k.b == 0.0) {
            return n == 0 ? k.M : 0.0;
          }
          return static_cast<double>(std::exp(std::log(static_cast<long double>(k.M)) + log_factorial(n) +
                                              n * std::log(std::abs(static_cast<long double>(k.b)))));
        } else {
          return kUnbounded;
        }
      },
      c);
}

std::string describe(const GrowthCertificate& c) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, cert::FiniteSupport>) {
          os << "FiniteSupport(" << k.last << ", max_abs=" << k.max_abs << ")";
        } else if constexpr (std::is_same_v<K, cert::Bounded>) {
          os << "Bounded(" << k.M << ")";
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          os << "GeometricEquiv(" << k.M << ", " << k.b << ")";
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          os << "FactorialGeometric(" << k.M << ", " << k.b << ")";
        } else {
          os << "Unverified";
        }
      },
      c);
  return os.str();
}

std::optional<CoefficientEnvelope> envelope_of(const GrowthCertificate& c) {
  return std::visit(
      [](const auto& k) -> std::optional<CoefficientEnvelope> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, cert::FiniteSupport>) {
          if (!std::isfinite(k.max_abs)) {
            return std::nullopt;
          }
          return CoefficientEnvelope{k.max_abs, 1.0, false};
        } else if constexpr (std::is_same_v<K, cert::Bounded>) {
          return CoefficientEnvelope{k.M, 1.0, false};
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          return CoefficientEnvelope{2.0 * k.M, std::abs(k.b), false};
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          return CoefficientEnvelope{k.M, std::abs(k.b), true};
        } else {
          return std::nullopt;
        }
      },
      c);
}

GrowthCertificate certificate_of(const CoefficientEnvelope& e) {
  if (e.factorial) {
    return cert::FactorialGeometric{e.scale, e.rate};
  }
  if (e.rate == 1.0) {
    return cert::Bounded{e.scale};
  }
  return cert::GeometricEquiv{e.scale / 2.0, e.rate};
}

CoefficientEnvelope rescale(CoefficientEnvelope e, double gamma) {
  e.rate *= std::abs(gamma);
  return e;
}

CoefficientEnvelope combine(double alpha, const CoefficientEnvelope& x, double beta,
                            const CoefficientEnvelope& y) {
  if (alpha == 0.0) {
    return {std::abs(beta) * y.scale, y.rate, y.factorial};
  }
  if (beta == 0.0) {
    return {std::abs(alpha) * x.scale, x.rate, x.factorial};
  }
  return {std::abs(alpha) * x.scale + std::abs(beta) * y.scale, std::max(x.rate, y.rate),
          x.factorial || y.factorial};
}

GrowthCertificate derive_certificate(const std::vector<double>& prefix,
                                     const CoefficientSequence::Tail& tail) {
  const double prefix_max = max_abs(prefix);
  return std::visit(
      [&](const auto& t) -> GrowthCertificate {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, CoefficientSequence::ZeroTail>) {
          std::size_t last = 0;
          for (std::size_t i = prefix.size(); i > 0; --i) {
            if (prefix[i - 1] != 0.0) {
              last = i - 1;
              break;
            }
          }
          return cert::FiniteSupport{last, prefix_max};
        } else if constexpr (std::is_same_v<T, CoefficientSequence::ConstantTail>) {
          return cert::Bounded{std::max(std::abs(t.M), prefix_max)};
        } else if constexpr (std::is_same_v<T, CoefficientSequence::GeometricTail>) {
          const double b = std::abs(t.b);
          if (b == 1.0) {
            return cert::Bounded{std::max(std::abs(t.M), prefix_max)};
          }
          if (b == 0.0) {
            // M * 0^n vanishes past n = 0.
            if (prefix.empty()) {
              return cert::FiniteSupport{0, std::abs(t.M)};
            }
            return derive_certificate(prefix, CoefficientSequence::ZeroTail{});
          }
          double M = std::abs(t.M) / 2.0;
          for (std::size_t n = 0; n < prefix.size(); ++n) {
            M = std::max(M, std::abs(prefix[n]) / (2.0 * std::pow(b, static_cast<double>(n))));
          }
          return cert::GeometricEquiv{M, b};
        } else {
          return cert::Unverified{};
        }
      },
      tail);
}

// ---------------------------------------------------------------------------
// CoefficientSequence

struct CoefficientSequence::Impl {
  std::vector<double> prefix;
  Tail tail;
  LogRule log_rule;
};

CoefficientSequence::CoefficientSequence()
    : CoefficientSequence(std::vector<double>{}, ZeroTail{}) {}

CoefficientSequence::CoefficientSequence(std::vector<double> prefix, Tail tail)
    : impl_(std::make_shared<const Impl>(Impl{std::move(prefix), std::move(tail), {}})),
      certificate_(derive_certificate(impl_->prefix, impl_->tail)) {}

CoefficientSequence::CoefficientSequence(std::vector<double> prefix, Tail tail,
                                         GrowthCertificate certificate)
    : impl_(std::make_shared<const Impl>(Impl{std::move(prefix), std::move(tail), {}})),
      certificate_(std::move(certificate)) {}

CoefficientSequence CoefficientSequence::finite(std::vector<double> prefix) {
  return {std::move(prefix), ZeroTail{}};
}

CoefficientSequence CoefficientSequence::constant(double M) { return {{}, ConstantTail{M}}; }

CoefficientSequence CoefficientSequence::geometric(double M, double b) {
  return {{}, GeometricTail{M, b}};
}

CoefficientSequence CoefficientSequence::from_rule(Rule rule, GrowthCertificate certificate) {
  return {{}, std::move(rule), std::move(certificate)};
}

CoefficientSequence CoefficientSequence::from_log_rule(LogRule rule, GrowthCertificate certificate) {
  CoefficientSequence seq;
  seq.impl_ = std::make_shared<const Impl>(Impl{{}, ZeroTail{}, std::move(rule)});
  seq.certificate_ = std::move(certificate);
  return seq;
}

double CoefficientSequence::at(std::size_t n) const {
  const Impl& d = *impl_;
  if (d.log_rule) {
    return d.log_rule(n).value();
  }
  if (n < d.prefix.size()) {
    return d.prefix[n];
  }
  return std::visit(
      [n](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ZeroTail>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ConstantTail>) {
          return t.M;
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          return t.M * std::pow(t.b, static_cast<double>(n));
        } else {
          return t(n);
        }
      },
      d.tail);
}

LogMagnitude CoefficientSequence::log_at(std::size_t n) const {
  const Impl& d = *impl_;
  if (d.log_rule) {
    return d.log_rule(n);
  }
  if (n >= d.prefix.size()) {
    if (const auto* g = std::get_if<GeometricTail>(&d.tail)) {
      if (g->M == 0.0 || (g->b == 0.0 && n > 0)) {
        return {};
      }
      if (n == 0) {
        return LogMagnitude::of(g->M);
      }
      const int sign = (g->M > 0 ? 1 : -1) * ((g->b < 0.0 && (n & 1U)) ? -1 : 1);
      return {sign, std::log(std::abs(static_cast<long double>(g->M))) +
                        n * std::log(std::abs(static_cast<long double>(g->b)))};
    }
  }
  return LogMagnitude::of(at(n));
}

CoefficientSequence CoefficientSequence::with_certificate(GrowthCertificate certificate) const {
  CoefficientSequence copy = *this;
  copy.certificate_ = std::move(certificate);
  return copy;
}

const std::vector<double>& CoefficientSequence::prefix() const noexcept { return impl_->prefix; }

const CoefficientSequence::Tail& CoefficientSequence::tail() const noexcept { return impl_->tail; }

bool CoefficientSequence::is_rule_backed() const noexcept {
  return static_cast<bool>(impl_->log_rule) || std::holds_alternative<Rule>(impl_->tail);
}

bool satisfies_certificate(const CoefficientSequence& seq, std::size_t n) {
  const LogMagnitude a = seq.log_at(n);
  if (a.sign == 0) {
    return true;
  }
  const double bound = coefficient_bound(seq.certificate(), n);
  if (bound == kUnbounded) {
    return !is_finite_support(seq.certificate()) || n <= std::get<cert::FiniteSupport>(seq.certificate()).last;
  }
  if (bound <= 0.0) {
    return false;
  }
  return a.log_abs <= std::log(static_cast<long double>(bound)) + 1e-12L;
}

// ---------------------------------------------------------------------------
// Terms

long double log_factorial(std::size_t n) {
  if (n <= kFactorialTableMax) {
    return std::log(factorial_table()[n]);
  }
  return lgamma_ld(static_cast<long double>(n) + 1.0L);
}

SignedLogTerm term_from(LogMagnitude coefficient, double coefficient_value, double gamma, std::size_t n) {
  SignedLogTerm t;
  t.n = n;
  if (coefficient.sign == 0) {
    return t;
  }
  if (n == 0) {
    t.sign = coefficient.sign;
    t.log_mag = coefficient.log_abs;
    t.value = std::isfinite(coefficient_value) ? coefficient_value : coefficient.value();
    return t;
  }
  if (gamma == 0.0) {
    return t;
  }
  t.sign = coefficient.sign * ((gamma < 0.0 && (n & 1U)) ? -1 : 1);
  const long double g = std::abs(static_cast<long double>(gamma));
  const long double log_factor = static_cast<long double>(n) * std::log(g) - log_factorial(n);
  t.log_mag = coefficient.log_abs + log_factor;

  long double magnitude = 0.0L;
  bool direct = false;
  if (std::isfinite(coefficient_value) && n <= kFactorialTableMax) {
    const long double factor = std::pow(g, static_cast<long double>(n)) / factorial_table()[n];
    if (std::isfinite(factor) && factor > 0.0L) {
      magnitude = std::abs(static_cast<long double>(coefficient_value)) * factor;
      direct = std::isfinite(magnitude);
    }
  }
  if (!direct) {
    magnitude = std::exp(t.log_mag);
  }
  t.value = t.sign * static_cast<double>(magnitude);
  return t;
}

SignedLogTerm term(const CoefficientSequence& seq, double gamma, std::size_t n) {
  if (!std::holds_alternative<CoefficientSequence::Rule>(seq.tail())) {
    // log_at covers log rules and geometric tails that overflow a double.
    const LogMagnitude a = seq.log_at(n);
    const double v = a.sign == 0 ? 0.0 : seq.at(n);
    return term_from(a, std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(), gamma, n);
  }
  const double v = seq.at(n);
  return term_from(LogMagnitude::of(v), v, gamma, n);
}

double term_value(double coefficient, double gamma, std::size_t n) {
  return term_from(LogMagnitude::of(coefficient), coefficient, gamma, n).value;
}

// ---------------------------------------------------------------------------
// Tail bounds and truncation

double tail_bound(const GrowthCertificate& c, double gamma, std::size_t N) {
  const double g = std::abs(gamma);
  return std::visit(
      [g, N](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, cert::FiniteSupport>) {
          if (N >= k.last) {
            return 0.0;
          }
          if (!std::isfinite(k.max_abs)) {
            return kUnbounded;
          }
          if (k.last - N > 100000) {
            return k.max_abs * std::exp(g) * kBoundSlack;
          }
          CompensatedSum s;
          for (std::size_t n = N + 1; n <= k.last; ++n) {
            s.add(term_value(k.max_abs, g, n));
          }
          return s.value() * kBoundSlack;
        } else if constexpr (std::is_same_v<K, cert::Bounded>) {
          return ratio_tail(k.M, g, N);
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          return ratio_tail(2.0 * k.M, std::abs(k.b) * g, N);
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          const double r = std::abs(k.b) * g;
          if (k.M == 0.0 || r == 0.0) {
            return 0.0;
          }
          if (r >= 1.0) {
            return kUnbounded;
          }
          return k.M * std::pow(r, static_cast<double>(N) + 1.0) / (1.0 - r) * kBoundSlack;
        } else {
          return kUnbounded;
        }
      },
      c);
}

TruncationPlan plan_truncation(const GrowthCertificate& c, double gamma, double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "truncation tolerance must be positive");
  }
  if (is_unverified(c)) {
    throw Error(ErrorKind::DivergenceUnknown, "unverified certificate on an infinite index set");
  }
  if (const auto* fs = std::get_if<cert::FiniteSupport>(&c)) {
    return {fs->last, 0.0};
  }
  const double at_zero = tail_bound(c, gamma, 0);
  if (at_zero <= eps) {
    return {0, at_zero};
  }
  constexpr std::size_t kMaxN = std::size_t{1} << 40;
  std::size_t lo = 0;  // tail(lo) > eps
  std::size_t hi = 1;
  double hi_bound = tail_bound(c, gamma, hi);
  while (hi_bound > eps) {
    if (hi_bound == kUnbounded && !std::holds_alternative<cert::Bounded>(c) &&
        !std::holds_alternative<cert::GeometricEquiv>(c)) {
      throw Error(ErrorKind::DivergenceUnknown,
                  "certificate " + describe(c) + " does not guarantee convergence at this gamma");
    }
    if (hi >= kMaxN) {
      throw Error(ErrorKind::DivergenceUnknown, "truncation horizon exceeds 2^40 terms");
    }
    lo = hi;
    hi *= 2;
    hi_bound = tail_bound(c, gamma, hi);
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double b = tail_bound(c, gamma, mid);
    if (b <= eps) {
      hi = mid;
      hi_bound = b;
    } else {
      lo = mid;
    }
  }
  return {hi, hi_bound};
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace taylor
