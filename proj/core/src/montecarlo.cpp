#include "taylor/montecarlo.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "taylor/error.hpp"

namespace taylor {

namespace {

struct ProportionEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
};

ProportionEstimate proportion_in(const std::vector<std::size_t>& draws, const NatSet& B) {
  const std::size_t L = draws.size();
  std::size_t k = 0;
  for (std::size_t n : draws) {
    k += B.contains(n) ? 1 : 0;
  }
  const double f = static_cast<double>(k) / static_cast<double>(L);
  // Sample variance of the indicators with the L - 1 denominator.
  const double s2 = static_cast<double>(k) * static_cast<double>(L - k) /
                    (static_cast<double>(L) * static_cast<double>(L - 1));
  return {f, std::sqrt(s2 / static_cast<double>(L))};
}

void require_samples(std::size_t L, const char* name) {
  if (L < 2) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be at least 2");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Samplers

InverseCdfSampler::InverseCdfSampler(const PowerSeriesPmf& pmf) {
  const std::size_t N = pmf.horizon();
  cumulative_.resize(N + 1);
  CompensatedSum s;
  for (std::size_t n = 0; n <= N; ++n) {
    s.add(pmf.weights().term_value(n));
    cumulative_[n] = s.value();
  }
  const double total = cumulative_.back();
  for (double& c : cumulative_) {
    c /= total;
  }
  cumulative_.back() = 1.0;
}

std::size_t InverseCdfSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
}

namespace {

const PowerSeriesPmf::Form& rejection_form(const PowerSeriesPmf& pmf) {
  if (!pmf.form()) {
    throw Error(ErrorKind::NoSamplerAvailable, "rejection sampling needs a (zeta, b) power-series form");
  }
  if (!std::holds_alternative<cert::Bounded>(pmf.form()->b.certificate())) {
    throw Error(ErrorKind::NoSamplerAvailable, "rejection sampling needs a Bounded certificate on b");
  }
  return *pmf.form();
}

}  // namespace

RejectionSampler::RejectionSampler(const PowerSeriesPmf& pmf)
    : proposal_(PowerSeriesPmf::poisson(rejection_form(pmf).zeta)),
      b_(pmf.form()->b),
      M_(std::get<cert::Bounded>(pmf.form()->b.certificate()).M) {
  if (!(M_ > 0.0)) {
    throw Error(ErrorKind::NoSamplerAvailable, "rejection bound must be positive");
  }
}

std::size_t RejectionSampler::operator()(Rng& rng, std::uint64_t& proposals) const {
  constexpr std::uint64_t kMaxProposals = std::uint64_t{1} << 32;
  for (std::uint64_t tries = 0; tries < kMaxProposals; ++tries) {
    const std::size_t n = proposal_(rng);
    ++proposals;
    if (rng.uniform() * M_ < b_.at(n)) {
      return n;
    }
  }
  throw Error(ErrorKind::NoSamplerAvailable, "rejection sampler failed to accept a proposal");
}

Draws sample_pmf(const PowerSeriesPmf& pmf, RngSpec rng, std::size_t L, SampleOptions options) {
  if (L < 1) {
    throw Error(ErrorKind::InvalidArgument, "L must be at least 1");
  }
  Draws out;
  out.values.resize(L);
  const std::size_t chunks = (L + kChunkSize - 1) / kChunkSize;
  std::vector<std::uint64_t> proposals(chunks, 0);

  if (options.kind == SamplerKind::Rejection) {
    const RejectionSampler sampler(pmf);
    out.used = SamplerKind::Rejection;
    for_each_chunk(L, kChunkSize, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
      Rng g(rng.substream(c));
      for (std::size_t i = begin; i < end; ++i) {
        out.values[i] = sampler(g, proposals[c]);
      }
    });
  } else {
    const InverseCdfSampler sampler(pmf);
    out.used = SamplerKind::InverseCdf;
    for_each_chunk(L, kChunkSize, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
      Rng g(rng.substream(c));
      for (std::size_t i = begin; i < end; ++i) {
        out.values[i] = sampler(g);
      }
      proposals[c] = end - begin;
    });
  }
  for (std::uint64_t p : proposals) {
    out.proposals += p;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimators

McEstimate estimate_normalizer_poisson(double zeta, const CoefficientSequence& b, std::size_t L, RngSpec rng,
                                       unsigned threads) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    throw Error(ErrorKind::InvalidArgument, "zeta must be finite and positive");
  }
  require_samples(L, "L");
  const Draws draws = sample_pmf(PowerSeriesPmf::poisson(zeta), rng, L, {SamplerKind::InverseCdf, threads});
  std::vector<double> y(L);
  for (std::size_t i = 0; i < L; ++i) {
    y[i] = b.at(draws.values[i]);
  }
  const SampleSummary s = summarize(y);
  const double scale = std::exp(zeta);
  McEstimate e;
  e.point = scale * s.mean;
  e.std_error = scale * s.se_mean;
  e.n_samples = L;
  e.numerical_error = 4.0 * DBL_EPSILON * std::abs(e.point);
  e.components.mass_pos = {e.point, e.numerical_error};
  e.components.mass_pos_stderr = e.std_error;
  e.components.normalizers_estimated = true;
  return e;
}

McEstimate estimate_measure(double zeta1, const CoefficientSequence& b1, double zeta2,
                            const CoefficientSequence& b2, const NatSet& B, std::size_t L1, std::size_t L2,
                            RngSpec rng, McOptions options) {
  require_samples(L1, "L1");
  require_samples(L2, "L2");
  const PowerSeriesPmf pmf1(zeta1, b1, options.eps);
  const PowerSeriesPmf pmf2(zeta2, b2, options.eps);

  const SampleOptions sample_options{SamplerKind::Auto, options.threads};
  const ProportionEstimate f1 = proportion_in(sample_pmf(pmf1, rng.substream(1), L1, sample_options).values, B);
  const ProportionEstimate f2 = proportion_in(sample_pmf(pmf2, rng.substream(2), L2, sample_options).values, B);

  McComponents c;
  c.fraction_pos = f1.fraction;
  c.fraction_neg = f2.fraction;
  c.fraction_pos_stderr = f1.std_error;
  c.fraction_neg_stderr = f2.std_error;
  c.normalizers_estimated = options.estimate_normalizers;
  if (options.estimate_normalizers) {
    const McEstimate z1 = estimate_normalizer_poisson(zeta1, b1, L1, rng.substream(3), options.threads);
    const McEstimate z2 = estimate_normalizer_poisson(zeta2, b2, L2, rng.substream(4), options.threads);
    c.mass_pos = {z1.point, z1.numerical_error};
    c.mass_neg = {z2.point, z2.numerical_error};
    c.mass_pos_stderr = z1.std_error;
    c.mass_neg_stderr = z2.std_error;
  } else {
    c.mass_pos = pmf1.normalizer();
    c.mass_neg = pmf2.normalizer();
  }

  // Variance of a product of independent estimators X Y:
  // x^2 Var Y + y^2 Var X + Var X Var Y.
  auto product_variance = [](double x, double sx, double y, double sy) {
    return x * x * sy * sy + y * y * sx * sx + sx * sx * sy * sy;
  };
  McEstimate e;
  e.point = c.mass_pos.value * c.fraction_pos - c.mass_neg.value * c.fraction_neg;
  e.std_error = std::sqrt(product_variance(c.mass_pos.value, c.mass_pos_stderr, c.fraction_pos, f1.std_error) +
                          product_variance(c.mass_neg.value, c.mass_neg_stderr, c.fraction_neg, f2.std_error));
  e.n_samples = L1 + L2;
  e.numerical_error = c.mass_pos.abs_error * c.fraction_pos + c.mass_neg.abs_error * c.fraction_neg +
                      4.0 * DBL_EPSILON * (c.mass_pos.value * c.fraction_pos + c.mass_neg.value * c.fraction_neg);
  e.components = c;
  return e;
}

CoverageReport calibrate_coverage(double zeta1, const CoefficientSequence& b1, double zeta2,
                                  const CoefficientSequence& b2, const NatSet& B, std::size_t L,
                                  std::size_t replications, double exact, RngSpec rng, McOptions options,
                                  double k_sigma) {
  CoverageReport report;
  report.exact = exact;
  report.k_sigma = k_sigma;
  report.rows.reserve(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    const McEstimate e = estimate_measure(zeta1, b1, zeta2, b2, B, L, L, rng.substream(r), options);
    const double band = std::max(k_sigma * e.std_error, e.numerical_error);
    const bool covered = std::abs(e.point - exact) <= band;
    report.rows.push_back({r, e.point, e.std_error, covered});
    report.covered += covered ? 1 : 0;
  }
  return report;
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.n = values.size();
  if (s.n == 0) {
    return s;
  }
  CompensatedSum sum;
  for (double v : values) {
    sum.add(v);
  }
  s.mean = sum.value() / static_cast<double>(s.n);
  if (s.n < 2) {
    return s;
  }
  CompensatedSum m2;
  CompensatedSum m4;
  for (double v : values) {
    const double d = v - s.mean;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  const double n = static_cast<double>(s.n);
  s.variance = m2.value() / (n - 1.0);
  s.se_mean = std::sqrt(s.variance / n);
  const double mu2 = m2.value() / n;
  const double mu4 = m4.value() / n;
  s.se_variance = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
  return s;
}

}  // namespace taylor
