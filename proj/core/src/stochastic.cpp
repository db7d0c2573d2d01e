#include "taylor/stochastic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "taylor/error.hpp"

namespace taylor {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw Error(ErrorKind::InvalidArgument, message);
  }
}

double draw_step(const stm::StepDist& step, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const stm::NormalStep& s) { return rng.normal(s.mean, s.sd); },
                        [&](const stm::BernoulliStep& s) { return rng.uniform() < s.p ? s.high : s.low; },
                        [&](const stm::UniformStep& s) { return s.low + (s.high - s.low) * rng.uniform(); },
                    },
                    step);
}

struct SeriesValue {
  double value = 0.0;
  double error = 0.0;
};

// sum_{n in B} (a_n gamma^n / n!)^2; the omitted tail is at most the square
// of the omitted absolute sum.
SeriesValue squared_sum(const CoefficientSequence& a, double gamma, const NatSet& B, double eps) {
  std::vector<std::size_t> indices;
  double tail = 0.0;
  if (B.is_finite()) {
    indices = B.elements();
  } else {
    const TruncationPlan plan = plan_truncation(a.certificate(), gamma, std::sqrt(eps));
    indices = B.members_up_to(plan.N);
    tail = plan.tail_bound * plan.tail_bound;
  }
  CompensatedSum s;
  for (std::size_t n : indices) {
    const double t = term(a, gamma, n).value;
    s.add(t * t);
  }
  return {s.value(), tail + 4.0 * DBL_EPSILON * s.value()};
}

SeriesValue linear_sum(const CoefficientSequence& a, double gamma, const NatSet& B, double eps) {
  const MeasureValue v = evaluate(TaylorMeasure(a, gamma), B, eps);
  return {v.value, v.abs_error};
}

CoefficientEnvelope gaussian_envelope(const CoefficientSequence& mu, const CoefficientSequence& sigma) {
  const auto em = envelope_of(mu.certificate());
  const auto es = envelope_of(sigma.certificate());
  if (!em || !es) {
    throw Error(ErrorKind::DivergenceUnknown, "mean and scale sequences need growth certificates");
  }
  return combine(1.0, *em, 6.0, *es);
}

std::size_t count_in_range(const NatSet& B, std::size_t first, std::size_t last) {
  if (last < first) {
    return 0;
  }
  std::size_t k = 0;
  for (std::size_t n : B.members_up_to(last)) {
    k += n >= first ? 1 : 0;
  }
  return k;
}

}  // namespace

void validate(const StmSpec& spec) {
  auto check_step = [](const stm::StepDist& step) {
    std::visit(Overloaded{
                   [](const stm::NormalStep& s) {
                     require(std::isfinite(s.mean) && s.sd >= 0.0 && std::isfinite(s.sd), "normal step parameters");
                   },
                   [](const stm::BernoulliStep& s) {
                     require(s.p >= 0.0 && s.p <= 1.0, "Bernoulli step probability must lie in [0, 1]");
                   },
                   [](const stm::UniformStep& s) { require(s.low <= s.high, "uniform step needs low <= high"); },
               },
               step);
  };
  std::visit(Overloaded{
                 [](const stm::GaussianIID& s) {
                   require(std::isfinite(s.mu) && std::isfinite(s.gamma), "mu and gamma must be finite");
                   require(s.sigma >= 0.0 && std::isfinite(s.sigma), "sigma must be finite and nonnegative");
                 },
                 [](const stm::GaussianIndep& s) { require(std::isfinite(s.gamma), "gamma must be finite"); },
                 [](const stm::IndicatorGamma& s) { require(s.p >= 0.0 && s.p <= 1.0, "P(A) must lie in [0, 1]"); },
                 [](const stm::SimpleFunction& s) {
                   require(!s.c.empty() && s.c.size() == s.probs.size(), "c and probs must have equal nonzero length");
                   CompensatedSum total;
                   for (double p : s.probs) {
                     require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
                     total.add(p);
                   }
                   require(std::abs(total.value() - 1.0) <= 1e-12, "probabilities must sum to 1");
                 },
                 [&](const stm::RandomWalk& s) { check_step(s.step); },
                 [](const stm::Ar1& s) {
                   require(s.phi >= 0.0 && s.phi <= 1.0, "phi must lie in [0, 1]");
                   require(s.sigma2 > 0.0 && std::isfinite(s.sigma2), "sigma2 must be positive");
                 },
                 [](const stm::BrownianApprox& s) {
                   require(s.n >= 1, "n must be at least 1");
                   require(std::isfinite(s.mu), "mu must be finite");
                   require(s.sigma > 0.0 && std::isfinite(s.sigma), "sigma must be positive");
                 },
             },
             spec);
}

double step_mean(const stm::StepDist& step) {
  return std::visit(Overloaded{
                        [](const stm::NormalStep& s) { return s.mean; },
                        [](const stm::BernoulliStep& s) { return s.low + s.p * (s.high - s.low); },
                        [](const stm::UniformStep& s) { return 0.5 * (s.low + s.high); },
                    },
                    step);
}

double step_variance(const stm::StepDist& step) {
  return std::visit(Overloaded{
                        [](const stm::NormalStep& s) { return s.sd * s.sd; },
                        [](const stm::BernoulliStep& s) {
                          const double d = s.high - s.low;
                          return s.p * (1.0 - s.p) * d * d;
                        },
                        [](const stm::UniformStep& s) {
                          const double d = s.high - s.low;
                          return d * d / 12.0;
                        },
                    },
                    step);
}

std::optional<std::size_t> support_last(const StmSpec& spec) {
  return std::visit(
      Overloaded{
          [](const stm::GaussianIID&) -> std::optional<std::size_t> { return std::nullopt; },
          [](const stm::GaussianIndep& s) -> std::optional<std::size_t> {
            const auto* m = std::get_if<cert::FiniteSupport>(&s.mu.certificate());
            const auto* d = std::get_if<cert::FiniteSupport>(&s.sigma.certificate());
            if (m && d) {
              return std::max(m->last, d->last);
            }
            return std::nullopt;
          },
          [](const stm::IndicatorGamma& s) -> std::optional<std::size_t> {
            const auto* m = std::get_if<cert::FiniteSupport>(&s.mu.certificate());
            const auto* d = std::get_if<cert::FiniteSupport>(&s.sigma.certificate());
            if (m && d) {
              return std::max(m->last, d->last);
            }
            return std::nullopt;
          },
          [](const stm::SimpleFunction& s) -> std::optional<std::size_t> { return s.c.size() - 1; },
          [](const stm::RandomWalk& s) -> std::optional<std::size_t> { return s.t; },
          [](const stm::Ar1& s) -> std::optional<std::size_t> { return s.t == 0 ? 0 : s.t - 1; },
          [](const stm::BrownianApprox& s) -> std::optional<std::size_t> { return s.n; },
      },
      spec);
}

TruncationPlan stm_truncation_plan(const StmSpec& spec, double eps) {
  validate(spec);
  if (const auto last = support_last(spec)) {
    return {*last, 0.0};
  }
  return std::visit(
      Overloaded{
          [eps](const stm::GaussianIID& s) {
            return plan_truncation(cert::Bounded{std::abs(s.mu) + 6.0 * s.sigma}, s.gamma, eps);
          },
          [eps](const stm::GaussianIndep& s) {
            return plan_truncation(certificate_of(gaussian_envelope(s.mu, s.sigma)), s.gamma, eps);
          },
          [eps](const stm::IndicatorGamma& s) {
            return plan_truncation(certificate_of(gaussian_envelope(s.mu, s.sigma)), 1.0, eps);
          },
          [](const auto&) -> TruncationPlan { throw Error(ErrorKind::UnsupportedSpec, "spec has no plan"); },
      },
      spec);
}

StmRealization realize(const StmSpec& spec, std::size_t N, Rng& rng) {
  StmRealization r;
  r.terms.assign(N + 1, 0.0);
  std::visit(Overloaded{
                 [&](const stm::GaussianIID& s) {
                   for (std::size_t n = 0; n <= N; ++n) {
                     r.terms[n] = term_value(rng.normal(s.mu, s.sigma), s.gamma, n);
                   }
                 },
                 [&](const stm::GaussianIndep& s) {
                   for (std::size_t n = 0; n <= N; ++n) {
                     r.terms[n] = term_value(rng.normal(s.mu.at(n), s.sigma.at(n)), s.gamma, n);
                   }
                 },
                 [&](const stm::IndicatorGamma& s) {
                   r.factor = rng.bernoulli(s.p) ? 1.0 : 0.0;
                   for (std::size_t n = 0; n <= N; ++n) {
                     r.terms[n] = term_value(rng.normal(s.mu.at(n), s.sigma.at(n)), 1.0, n);
                   }
                 },
                 [&](const stm::SimpleFunction& s) {
                   const double u = rng.uniform();
                   CompensatedSum cumulative;
                   std::size_t k = s.c.size() - 1;
                   for (std::size_t i = 0; i < s.c.size(); ++i) {
                     cumulative.add(s.probs[i]);
                     if (u < cumulative.value()) {
                       k = i;
                       break;
                     }
                   }
                   if (k <= N) {
                     r.terms[k] = s.c[k];
                   }
                 },
                 [&](const stm::RandomWalk& s) {
                   for (std::size_t n = 1; n <= s.t; ++n) {
                     const double x = draw_step(s.step, rng);
                     if (n <= N) {
                       r.terms[n] = x;
                     }
                   }
                 },
                 [&](const stm::Ar1& s) {
                   const double sd = std::sqrt(s.sigma2);
                   for (std::size_t i = 1; i <= s.t; ++i) {
                     const double e = rng.normal(0.0, sd);
                     const std::size_t j = s.t - i;
                     if (j <= N) {
                       r.terms[j] = std::pow(s.phi, static_cast<double>(j)) * e;
                     }
                   }
                 },
                 [&](const stm::BrownianApprox& s) {
                   const double scale = s.sigma * std::sqrt(static_cast<double>(s.n));
                   for (std::size_t k = 1; k <= s.n; ++k) {
                     const double z = rng.normal(s.mu, s.sigma);
                     if (k <= N) {
                       r.terms[k] = (z - s.mu) / scale;
                     }
                   }
                 },
             },
             spec);
  return r;
}

double sample_stm(const StmSpec& spec, const NatSet& B, const std::optional<TruncationPlan>& plan, RngSpec rng) {
  validate(spec);
  if (B.is_empty()) {
    return 0.0;
  }
  std::size_t N = 0;
  const auto last = support_last(spec);
  if (B.is_finite()) {
    N = B.elements().back();
  } else if (last) {
    N = *last;
  } else if (plan) {
    N = plan->N;
  } else {
    throw Error(ErrorKind::DivergenceUnknown, "an infinite set needs a truncation plan for this spec");
  }
  if (last) {
    N = std::min(N, *last);
  }
  Rng g(rng);
  const StmRealization r = realize(spec, N, g);
  CompensatedSum s;
  for (std::size_t n : B.members_up_to(N)) {
    s.add(r.terms[n]);
  }
  return r.factor * s.value();
}

std::vector<double> replicate_stm(const StmSpec& spec, const NatSet& B, const std::optional<TruncationPlan>& plan,
                                  std::size_t replications, RngSpec rng, unsigned threads) {
  validate(spec);
  std::vector<double> out(replications);
  for_each_chunk(replications, 64, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      out[r] = sample_stm(spec, B, plan, rng.substream(r));
    }
  });
  return out;
}

StmMoments stm_moments(const StmSpec& spec, const NatSet& B, double eps) {
  validate(spec);
  return std::visit(
      Overloaded{
          [&](const stm::GaussianIID& s) {
            const auto ones = CoefficientSequence::constant(1.0);
            const SeriesValue m = linear_sum(ones, s.gamma, B, eps);
            const SeriesValue v = squared_sum(ones, s.gamma, B, eps);
            return StmMoments{s.mu * m.value, s.sigma * s.sigma * v.value, std::abs(s.mu) * m.error,
                              s.sigma * s.sigma * v.error};
          },
          [&](const stm::GaussianIndep& s) {
            const SeriesValue m = linear_sum(s.mu, s.gamma, B, eps);
            const SeriesValue v = squared_sum(s.sigma, s.gamma, B, eps);
            return StmMoments{m.value, v.value, m.error, v.error};
          },
          [&](const stm::IndicatorGamma& s) {
            // X = I_A Y with Y independent of A:
            // Var X = P E[Y^2] - P^2 (E Y)^2 = P sum sigma_n^2/(n!)^2 + P (1 - P) (E Y)^2.
            const SeriesValue m = linear_sum(s.mu, 1.0, B, eps);
            const SeriesValue v = squared_sum(s.sigma, 1.0, B, eps);
            const double p = s.p;
            return StmMoments{p * m.value, p * v.value + p * (1.0 - p) * m.value * m.value, p * m.error,
                              p * v.error + p * (1.0 - p) * (2.0 * std::abs(m.value) + m.error) * m.error};
          },
          [&](const stm::SimpleFunction& s) {
            CompensatedSum mean;
            for (std::size_t k = 0; k < s.c.size(); ++k) {
              if (B.contains(k)) {
                mean.add(s.c[k] * s.probs[k]);
              }
            }
            const double mu = mean.value();
            CompensatedSum var;
            for (std::size_t k = 0; k < s.c.size(); ++k) {
              const double d = (B.contains(k) ? s.c[k] : 0.0) - mu;
              var.add(s.probs[k] * d * d);
            }
            return StmMoments{mu, var.value(), 4.0 * DBL_EPSILON * std::abs(mu), 4.0 * DBL_EPSILON * var.value()};
          },
          [&](const stm::RandomWalk& s) {
            const double k = static_cast<double>(count_in_range(B, 1, s.t));
            return StmMoments{k * step_mean(s.step), k * step_variance(s.step), 0.0, 0.0};
          },
          [&](const stm::Ar1& s) {
            CompensatedSum var;
            if (s.t > 0) {
              for (std::size_t j : B.members_up_to(s.t - 1)) {
                var.add(s.sigma2 * std::pow(s.phi, 2.0 * static_cast<double>(j)));
              }
            }
            return StmMoments{0.0, var.value(), 0.0, 4.0 * DBL_EPSILON * var.value()};
          },
          [](const stm::BrownianApprox&) -> StmMoments {
            throw Error(ErrorKind::UnsupportedSpec, "Brownian approximation moments are given per time point");
          },
      },
      spec);
}

StmMoments brownian_moments_at(const stm::BrownianApprox& spec, double t) {
  validate(spec);
  require(t >= 0.0 && t <= 1.0, "t must lie in [0, 1]");
  const double n = static_cast<double>(spec.n);
  const double k = std::floor(t * n);
  const double w = t * n - k;
  // X_t = X_{k/n} + w (Z_{k+1} - mu) / (sigma sqrt(n)).
  return {0.0, (k + w * w) / n, 0.0, 0.0};
}

SamplePath simulate_random_walk(const stm::RandomWalk& spec, RngSpec rng) {
  validate(spec);
  SamplePath path{{}, {}, rng};
  path.times.reserve(spec.t + 1);
  path.values.reserve(spec.t + 1);
  path.times.push_back(0.0);
  path.values.push_back(0.0);
  Rng g(rng);
  CompensatedSum s;
  for (std::size_t k = 1; k <= spec.t; ++k) {
    s.add(draw_step(spec.step, g));
    path.times.push_back(static_cast<double>(k));
    path.values.push_back(s.value());
  }
  return path;
}

SamplePath simulate_ar1(const stm::Ar1& spec, RngSpec rng) {
  validate(spec);
  SamplePath path{{0.0}, {0.0}, rng};
  Rng g(rng);
  const double sd = std::sqrt(spec.sigma2);
  double s = 0.0;
  for (std::size_t k = 1; k <= spec.t; ++k) {
    s = spec.phi * s + g.normal(0.0, sd);
    path.times.push_back(static_cast<double>(k));
    path.values.push_back(s);
  }
  return path;
}

SamplePath simulate_brownian(const stm::BrownianApprox& spec, RngSpec rng) {
  validate(spec);
  SamplePath path{{}, {}, rng};
  path.times.reserve(spec.n + 1);
  path.values.reserve(spec.n + 1);
  path.times.push_back(0.0);
  path.values.push_back(0.0);
  Rng g(rng);
  const double n = static_cast<double>(spec.n);
  const double scale = spec.sigma * std::sqrt(n);
  CompensatedSum s;
  for (std::size_t k = 1; k <= spec.n; ++k) {
    s.add((g.normal(spec.mu, spec.sigma) - spec.mu) / scale);
    path.times.push_back(static_cast<double>(k) / n);
    path.values.push_back(s.value());
  }
  return path;
}

double interpolate(const SamplePath& path, double t) {
  require(!path.times.empty() && path.times.size() == path.values.size(), "path must be nonempty");
  if (t <= path.times.front()) {
    return path.values.front();
  }
  if (t >= path.times.back()) {
    return path.values.back();
  }
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - path.times.begin());
  const double t0 = path.times[i - 1];
  const double t1 = path.times[i];
  const double w = (t - t0) / (t1 - t0);
  return path.values[i - 1] + w * (path.values[i] - path.values[i - 1]);
}

MartingaleProxy martingale_increment_proxy(const stm::RandomWalk& spec, std::size_t replications, RngSpec rng,
                                           unsigned threads) {
  validate(spec);
  stm::RandomWalk extended = spec;
  extended.t = spec.t + 1;
  std::vector<double> level(replications);
  std::vector<double> increment(replications);
  for_each_chunk(replications, 64, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const SamplePath p = simulate_random_walk(extended, rng.substream(r));
      level[r] = p.values[spec.t];
      increment[r] = p.values[spec.t + 1] - p.values[spec.t];
    }
  });
  std::vector<double> nonnegative;
  std::vector<double> negative;
  for (std::size_t r = 0; r < replications; ++r) {
    (level[r] >= 0.0 ? nonnegative : negative).push_back(increment[r]);
  }
  return {summarize(nonnegative), summarize(negative)};
}

}  // namespace taylor
