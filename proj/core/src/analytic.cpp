#include "taylor/analytic.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>

#include "taylor/error.hpp"

namespace taylor {

namespace {

constexpr double kSlack = 1.0 + 1e-12;

// Signed sum of terms given as (sign, log magnitude), returned in log form.
class LogSum {
 public:
  void add(int sign, long double log_abs) {
    if (sign != 0) {
      terms_.push_back({sign, log_abs});
    }
  }
  void add(const LogMagnitude& m) { add(m.sign, m.log_abs); }

  LogMagnitude value() const {
    if (terms_.empty()) {
      return {};
    }
    long double top = terms_.front().log_abs;
    for (const auto& t : terms_) {
      top = std::max(top, t.log_abs);
    }
    long double sum = 0.0L;
    long double c = 0.0L;
    for (const auto& t : terms_) {
      const long double y = t.sign * std::exp(t.log_abs - top) - c;
      const long double s = sum + y;
      c = (s - sum) - y;
      sum = s;
    }
    if (sum == 0.0L) {
      return {};
    }
    return {sum > 0.0L ? 1 : -1, top + std::log(std::abs(sum))};
  }

 private:
  std::vector<LogMagnitude> terms_;
};

// Memoized log-form rule shared by copies of a sequence.
class LazyRule {
 public:
  explicit LazyRule(std::function<LogMagnitude(std::size_t)> compute) : compute_(std::move(compute)) {}

  LogMagnitude operator()(std::size_t n) {
    std::lock_guard lock(mutex_);
    if (n >= cache_.size()) {
      cache_.resize(n + 1);
    }
    if (!cache_[n]) {
      cache_[n] = compute_(n);
    }
    return *cache_[n];
  }

 private:
  std::function<LogMagnitude(std::size_t)> compute_;
  std::mutex mutex_;
  std::vector<std::optional<LogMagnitude>> cache_;
};

CoefficientSequence lazy_sequence(std::function<LogMagnitude(std::size_t)> compute, GrowthCertificate c) {
  auto rule = std::make_shared<LazyRule>(std::move(compute));
  return CoefficientSequence::from_log_rule([rule](std::size_t n) { return (*rule)(n); }, std::move(c));
}

// a_n / n! in log form.
LogMagnitude scaled_log(const CoefficientSequence& a, std::size_t n) {
  LogMagnitude m = a.log_at(n);
  if (m.sign != 0) {
    m.log_abs -= log_factorial(n);
  }
  return m;
}

const cert::FiniteSupport* finite_values(const GrowthCertificate& c) {
  const auto* fs = std::get_if<cert::FiniteSupport>(&c);
  return fs && std::isfinite(fs->max_abs) ? fs : nullptr;
}

void require_same_center(const AnalyticRep& r1, const AnalyticRep& r2) {
  if (r1.center != r2.center) {
    throw Error(ErrorKind::CenterMismatch, "representations have different centers; recenter first");
  }
}

double finite_or_throw(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, "coefficient overflows a double");
  }
  return v;
}

// max_l (l + 1) / q^l, the constant in (l + 1) b^l <= K (q b)^l.
double growth_constant(double q) {
  double best = 1.0;
  for (int l = 0; l < 100000; ++l) {
    const double v = (l + 1.0) / std::pow(q, static_cast<double>(l));
    if (v < best && l > 10) {
      break;
    }
    best = std::max(best, v);
  }
  return best * kSlack;
}

GrowthCertificate product_rep_certificate(const GrowthCertificate& c1, const GrowthCertificate& c2) {
  auto e1 = envelope_of(c1);
  auto e2 = envelope_of(c2);
  if (!e1 || !e2) {
    return cert::Unverified{};
  }
  // A factorial envelope with rate 0 only allows a_0.
  for (auto* e : {&*e1, &*e2}) {
    if (e->factorial && e->rate == 0.0) {
      *e = {e->scale, 0.0, false};
    }
  }
  if (!e1->factorial && !e2->factorial) {
    return certificate_of({e1->scale * e2->scale * kSlack, e1->rate + e2->rate, false});
  }
  if (e1->factorial != e2->factorial) {
    const CoefficientEnvelope& f = e1->factorial ? *e1 : *e2;
    const CoefficientEnvelope& g = e1->factorial ? *e2 : *e1;
    return certificate_of({f.scale * g.scale * std::exp(g.rate / f.rate) * kSlack, f.rate, true});
  }
  constexpr double q = 1.01;
  return certificate_of({growth_constant(q) * e1->scale * e2->scale, q * std::max(e1->rate, e2->rate), true});
}

AnalyticRep make(double center, CoefficientSequence a, double radius, std::string name) {
  return {center, std::move(a), radius, std::move(name)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Builtins

AnalyticRep exp_rep(double center) {
  return make(center, CoefficientSequence::constant(std::exp(center)), kUnbounded, "exp");
}

namespace {

AnalyticRep periodic_rep(std::array<double, 4> cycle, double center, std::string name) {
  double M = 0.0;
  for (double v : cycle) {
    M = std::max(M, std::abs(v));
  }
  auto a = CoefficientSequence::from_rule([cycle](std::size_t n) { return cycle[n % 4]; }, cert::Bounded{M});
  return make(center, std::move(a), kUnbounded, std::move(name));
}

}  // namespace

AnalyticRep sin_rep(double center) {
  const double s = std::sin(center);
  const double c = std::cos(center);
  return periodic_rep({s, c, -s, -c}, center, "sin");
}

AnalyticRep cos_rep(double center) {
  const double s = std::sin(center);
  const double c = std::cos(center);
  return periodic_rep({c, -s, -c, s}, center, "cos");
}

AnalyticRep polynomial_rep(const std::vector<double>& p, double center) {
  // a_n = sum_{k >= n} k! / (k - n)! p_k center^(k - n)
  std::vector<double> a(p.size(), 0.0);
  for (std::size_t n = 0; n < p.size(); ++n) {
    CompensatedSum s;
    for (std::size_t k = n; k < p.size(); ++k) {
      long double falling = 1.0L;
      for (std::size_t j = k - n + 1; j <= k; ++j) {
        falling *= static_cast<long double>(j);
      }
      s.add(static_cast<double>(falling * p[k] * std::pow(static_cast<long double>(center), k - n)));
    }
    a[n] = finite_or_throw(s.value());
  }
  return make(center, CoefficientSequence::finite(std::move(a)), kUnbounded, "polynomial");
}

AnalyticRep geometric_rep(double center) {
  if (!(std::abs(center) < 1.0)) {
    throw Error(ErrorKind::OutOfDomain, "1/(1-x) needs |center| < 1");
  }
  const double r = 1.0 / (1.0 - center);
  const long double log_r = -std::log1p(-static_cast<long double>(center));
  auto a = CoefficientSequence::from_log_rule(
      [log_r](std::size_t n) { return LogMagnitude{1, log_factorial(n) + (static_cast<long double>(n) + 1.0L) * log_r}; },
      cert::FactorialGeometric{r * kSlack, r * kSlack});
  return make(center, std::move(a), 1.0 - std::abs(center), "geometric");
}

AnalyticRep identity_rep(double center) {
  return make(center, CoefficientSequence::finite({center, 1.0}), kUnbounded, "identity");
}

AnalyticRep constant_rep(double value, double center) {
  return make(center, CoefficientSequence::finite({value}), kUnbounded, "constant");
}

AnalyticRep builtin(std::string_view name, double center, const std::vector<double>& params) {
  if (name == "exp") {
    return exp_rep(center);
  }
  if (name == "sin") {
    return sin_rep(center);
  }
  if (name == "cos") {
    return cos_rep(center);
  }
  if (name == "polynomial") {
    return polynomial_rep(params, center);
  }
  if (name == "geometric") {
    return geometric_rep(center);
  }
  if (name == "identity") {
    return identity_rep(center);
  }
  if (name == "constant") {
    if (params.size() != 1) {
      throw Error(ErrorKind::InvalidArgument, "constant needs exactly one parameter");
    }
    return constant_rep(params.front(), center);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown builtin '" + std::string(name) + "'");
}

std::function<double(double)> builtin_reference(std::string_view name, const std::vector<double>& params) {
  if (name == "exp") {
    return [](double x) { return std::exp(x); };
  }
  if (name == "sin") {
    return [](double x) { return std::sin(x); };
  }
  if (name == "cos") {
    return [](double x) { return std::cos(x); };
  }
  if (name == "polynomial") {
    return [params](double x) {
      long double v = 0.0L;
      for (std::size_t k = params.size(); k > 0; --k) {
        v = v * x + params[k - 1];
      }
      return static_cast<double>(v);
    };
  }
  if (name == "geometric") {
    return [](double x) { return 1.0 / (1.0 - x); };
  }
  if (name == "identity") {
    return [](double x) { return x; };
  }
  if (name == "constant" && params.size() == 1) {
    const double v = params.front();
    return [v](double) { return v; };
  }
  throw Error(ErrorKind::InvalidArgument, "no reference for '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Evaluation

MeasureValue eval(const AnalyticRep& rep, double x, double eps) {
  const double h = x - rep.center;
  if (!(std::abs(h) < rep.radius_hint)) {
    throw Error(ErrorKind::OutOfDomain, "x lies outside the validity radius of the representation");
  }
  if (h == 0.0) {
    return {rep.coefficients.at(0), 0.0};
  }
  return evaluate(TaylorMeasure(rep.coefficients, h), NatSet::all(), eps);
}

// ---------------------------------------------------------------------------
// Algebra

AnalyticRep add(double alpha, const AnalyticRep& r1, double beta, const AnalyticRep& r2) {
  require_same_center(r1, r2);
  const double radius = std::min(r1.radius_hint, r2.radius_hint);
  const GrowthCertificate& c1 = r1.coefficients.certificate();
  const GrowthCertificate& c2 = r2.coefficients.certificate();
  const auto* f1 = finite_values(c1);
  const auto* f2 = finite_values(c2);
  if (f1 && f2) {
    std::vector<double> a(std::max(f1->last, f2->last) + 1);
    for (std::size_t n = 0; n < a.size(); ++n) {
      a[n] = finite_or_throw(alpha * r1.coefficients.at(n) + beta * r2.coefficients.at(n));
    }
    return make(r1.center, CoefficientSequence::finite(std::move(a)), radius, "sum");
  }

  GrowthCertificate c = cert::Unverified{};
  const auto* s1 = std::get_if<cert::FiniteSupport>(&c1);
  const auto* s2 = std::get_if<cert::FiniteSupport>(&c2);
  if (s1 && s2) {
    c = cert::FiniteSupport{std::max(s1->last, s2->last), kUnbounded};
  } else {
    const auto e1 = envelope_of(c1);
    const auto e2 = envelope_of(c2);
    if (e1 && e2) {
      CoefficientEnvelope e = combine(alpha, *e1, beta, *e2);
      e.scale *= kSlack;
      c = certificate_of(e);
    }
  }
  const CoefficientSequence a1 = r1.coefficients;
  const CoefficientSequence a2 = r2.coefficients;
  const LogMagnitude la = LogMagnitude::of(alpha);
  const LogMagnitude lb = LogMagnitude::of(beta);
  auto a = lazy_sequence(
      [a1, a2, la, lb](std::size_t n) {
        LogSum s;
        const LogMagnitude x = a1.log_at(n);
        const LogMagnitude y = a2.log_at(n);
        s.add(la.sign * x.sign, la.log_abs + x.log_abs);
        s.add(lb.sign * y.sign, lb.log_abs + y.log_abs);
        return s.value();
      },
      c);
  return make(r1.center, std::move(a), radius, "sum");
}

AnalyticRep multiply(const AnalyticRep& r1, const AnalyticRep& r2) {
  require_same_center(r1, r2);
  const double radius = std::min(r1.radius_hint, r2.radius_hint);
  const CoefficientSequence a1 = r1.coefficients;
  const CoefficientSequence a2 = r2.coefficients;
  // c_l / l! = sum_n (a_{1,n} / n!) (a_{2,l-n} / (l-n)!)
  auto coefficient = [a1, a2](std::size_t l) {
    LogSum s;
    for (std::size_t n = 0; n <= l; ++n) {
      const LogMagnitude x = scaled_log(a1, n);
      if (x.sign == 0) {
        continue;
      }
      const LogMagnitude y = scaled_log(a2, l - n);
      s.add(x.sign * y.sign, x.log_abs + y.log_abs);
    }
    LogMagnitude c = s.value();
    if (c.sign != 0) {
      c.log_abs += log_factorial(l);
    }
    return c;
  };

  const GrowthCertificate& c1 = a1.certificate();
  const GrowthCertificate& c2 = a2.certificate();
  const auto* s1 = std::get_if<cert::FiniteSupport>(&c1);
  const auto* s2 = std::get_if<cert::FiniteSupport>(&c2);
  if (s1 && s2 && std::isfinite(s1->max_abs) && std::isfinite(s2->max_abs)) {
    std::vector<double> a(s1->last + s2->last + 1);
    for (std::size_t l = 0; l < a.size(); ++l) {
      a[l] = finite_or_throw(coefficient(l).value());
    }
    return make(r1.center, CoefficientSequence::finite(std::move(a)), radius, "product");
  }
  GrowthCertificate c = cert::Unverified{};
  if (s1 && s2) {
    c = cert::FiniteSupport{s1->last + s2->last, kUnbounded};
  } else {
    c = product_rep_certificate(c1, c2);
  }
  return make(r1.center, lazy_sequence(coefficient, c), radius, "product");
}

AnalyticRep power(const AnalyticRep& rep, std::size_t n) {
  if (n == 0) {
    return constant_rep(1.0, rep.center);
  }
  std::optional<AnalyticRep> result;
  AnalyticRep base = rep;
  while (true) {
    if (n & 1U) {
      result = result ? multiply(*result, base) : base;
    }
    n >>= 1U;
    if (n == 0) {
      break;
    }
    base = multiply(base, base);
  }
  result->name = "power";
  return *result;
}

AnalyticRep truncate(const AnalyticRep& rep, std::size_t degree) {
  std::vector<double> a(degree + 1);
  for (std::size_t n = 0; n <= degree; ++n) {
    a[n] = finite_or_throw(rep.coefficients.at(n));
  }
  return make(rep.center, CoefficientSequence::finite(std::move(a)), rep.radius_hint, "truncation");
}

// ---------------------------------------------------------------------------
// Recentering

namespace {

// Certificate of m -> a_{k+m} / scale with log(scale) returned alongside.
struct ShiftedCertificate {
  GrowthCertificate certificate;
  long double log_scale = 0.0L;
};

ShiftedCertificate shifted_certificate(const GrowthCertificate& c, std::size_t k, double h) {
  const long double lk = static_cast<long double>(k);
  return std::visit(
      [&](const auto& cc) -> ShiftedCertificate {
        using K = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<K, cert::Bounded>) {
          return {cert::Bounded{1.0}, std::log(static_cast<long double>(cc.M))};
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          const long double b = std::abs(static_cast<long double>(cc.b));
          return {cert::GeometricEquiv{1.0, std::abs(cc.b)},
                  std::log(static_cast<long double>(cc.M)) + (b > 0.0L ? lk * std::log(b) : 0.0L)};
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          // (k+m)! <= k! m! ((1+d)/d)^k (1+d)^m, with d chosen so that
          // b (1+d) |h| sits halfway between b |h| and 1.
          const double b = std::abs(cc.b);
          const double bh = b * std::abs(h);
          if (bh >= 1.0) {
            throw Error(ErrorKind::OutOfDomain, "shift exceeds the certified convergence radius");
          }
          const double d = bh > 0.0 ? (1.0 + bh) / (2.0 * bh) - 1.0 : 1.0;
          const long double log_b = b > 0.0 ? std::log(static_cast<long double>(b)) : 0.0L;
          return {cert::FactorialGeometric{1.0, b * (1.0 + d)},
                  std::log(static_cast<long double>(cc.M)) + log_factorial(k) +
                      lk * (log_b + std::log1p(static_cast<long double>(d)) - std::log(static_cast<long double>(d)))};
        } else {
          throw Error(ErrorKind::DivergenceUnknown, "cannot recenter a representation with an unverified certificate");
        }
      },
      c);
}

GrowthCertificate recentered_certificate(const GrowthCertificate& c, double h) {
  const double ah = std::abs(h);
  return std::visit(
      [&](const auto& cc) -> GrowthCertificate {
        using K = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<K, cert::Bounded>) {
          return cert::Bounded{cc.M * std::exp(ah) * kSlack};
        } else if constexpr (std::is_same_v<K, cert::GeometricEquiv>) {
          const double b = std::abs(cc.b);
          return cert::GeometricEquiv{cc.M * std::exp(b * ah) * kSlack, b};
        } else if constexpr (std::is_same_v<K, cert::FactorialGeometric>) {
          const double q = 1.0 - std::abs(cc.b) * ah;
          return cert::FactorialGeometric{cc.M / q * kSlack, std::abs(cc.b) / q * kSlack};
        } else {
          return cert::Unverified{};
        }
      },
      c);
}

}  // namespace

AnalyticRep recenter(const AnalyticRep& rep, double new_center, double eps) {
  const double h = new_center - rep.center;
  if (!(std::abs(h) < rep.radius_hint)) {
    throw Error(ErrorKind::OutOfDomain, "new center lies outside the validity radius");
  }
  const double radius = rep.radius_hint - std::abs(h);
  if (h == 0.0) {
    AnalyticRep copy = rep;
    copy.center = new_center;
    return copy;
  }
  const CoefficientSequence a = rep.coefficients;
  const GrowthCertificate& c = a.certificate();
  const long double log_h = std::log(std::abs(static_cast<long double>(h)));
  const int h_sign = h < 0.0 ? -1 : 1;
  auto shifted_term = [a, log_h, h_sign](std::size_t k, std::size_t m) {
    const LogMagnitude x = a.log_at(k + m);
    if (x.sign == 0) {
      return LogMagnitude{};
    }
    const int sign = x.sign * ((h_sign < 0 && (m & 1U)) ? -1 : 1);
    return LogMagnitude{sign, x.log_abs + static_cast<long double>(m) * log_h - log_factorial(m)};
  };

  if (const auto* fs = std::get_if<cert::FiniteSupport>(&c)) {
    std::vector<double> out(fs->last + 1);
    for (std::size_t k = 0; k <= fs->last; ++k) {
      LogSum s;
      for (std::size_t m = 0; k + m <= fs->last; ++m) {
        s.add(shifted_term(k, m));
      }
      out[k] = finite_or_throw(s.value().value());
    }
    return make(new_center, CoefficientSequence::finite(std::move(out)), radius, rep.name);
  }

  GrowthCertificate new_cert = recentered_certificate(c, h);
  auto coefficient = [a, c, h, eps, shifted_term](std::size_t k) {
    const ShiftedCertificate sc = shifted_certificate(c, k, h);
    const LogMagnitude ak = a.log_at(k);
    const long double budget = std::log(static_cast<long double>(eps)) + std::max(0.0L, ak.sign ? ak.log_abs : 0.0L);
    const long double scaled_tol = std::exp(budget - sc.log_scale);
    const double tol = static_cast<double>(std::clamp<long double>(scaled_tol, 1e-300L, 1e300L));
    const TruncationPlan plan = plan_truncation(sc.certificate, h, tol);
    LogSum s;
    for (std::size_t m = 0; m <= plan.N; ++m) {
      s.add(shifted_term(k, m));
    }
    return s.value();
  };
  return make(new_center, lazy_sequence(coefficient, std::move(new_cert)), radius, rep.name);
}

// ---------------------------------------------------------------------------
// Diagnostics on compact intervals

double sup_distance_on_grid(const AnalyticRep& rep, const std::function<double(double)>& oracle, double a, double b,
                            std::size_t m, double eps) {
  if (m < 2 || !(a <= b)) {
    throw Error(ErrorKind::InvalidArgument, "grid needs m >= 2 points on an interval a <= b");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = i + 1 == m ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1);
    worst = std::max(worst, std::abs(eval(rep, x, eps).value - oracle(x)));
  }
  return worst;
}

double lp_norm_on_interval(const AnalyticRep& rep, double p, double a, double b, double eps) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidArgument, "p must be finite and at least 1");
  }
  if (!(a <= b)) {
    throw Error(ErrorKind::InvalidArgument, "interval needs a <= b");
  }
  if (!(std::abs(a - rep.center) < rep.radius_hint) || !(std::abs(b - rep.center) < rep.radius_hint)) {
    throw Error(ErrorKind::OutOfDomain, "interval leaves the validity radius");
  }
  if (a == b) {
    return 0.0;
  }
  const double point_eps = std::max(eps * 1e-3, 1e-300);
  auto f = [&](double x) { return std::pow(std::abs(eval(rep, x, point_eps).value), p); };

  constexpr int kMaxDepth = 22;
  // Simpson on n intervals from endpoint sum, odd-node sum and even interior sum.
  std::size_t n = 2;
  const double ends = f(a) + f(b);
  double even = 0.0;
  double odd = f(0.5 * (a + b));
  auto simpson = [&](std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    return h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
  };
  double previous_simpson = simpson(n);
  double previous_estimate = previous_simpson;
  for (int depth = 1; depth <= kMaxDepth; ++depth) {
    n *= 2;
    even += odd;
    CompensatedSum s;
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; i += 2) {
      s.add(f(a + h * static_cast<double>(i)));
    }
    odd = s.value();
    const double current = simpson(n);
    const double estimate = current + (current - previous_simpson) / 15.0;
    if (depth >= 2 && std::abs(estimate - previous_estimate) <= eps) {
      return std::pow(std::max(0.0, estimate), 1.0 / p);
    }
    previous_simpson = current;
    previous_estimate = estimate;
  }
  throw Error(ErrorKind::QuadratureStall, "quadrature did not settle within the depth cap");
}

}  // namespace taylor
