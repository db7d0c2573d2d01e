#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "taylor/probability.hpp"
#include "taylor/rng.hpp"

namespace taylor {

/// Inverse-CDF sampling from a cumulative table that reaches the pmf horizon.
class InverseCdfSampler {
 public:
  explicit InverseCdfSampler(const PowerSeriesPmf& pmf);
  std::size_t operator()(Rng& rng) const;
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> cumulative_;
};

/// Rejection sampling with a Poisson(zeta) proposal accepted with
/// probability b_n / M. Requires the (zeta, b) form and a Bounded(M)
/// certificate on b.
class RejectionSampler {
 public:
  explicit RejectionSampler(const PowerSeriesPmf& pmf);
  /// Adds the number of proposals used to `proposals`.
  std::size_t operator()(Rng& rng, std::uint64_t& proposals) const;
  double bound() const noexcept { return M_; }

 private:
  InverseCdfSampler proposal_;
  CoefficientSequence b_;
  double M_ = 1.0;
};

enum class SamplerKind { Auto, InverseCdf, Rejection };

struct SampleOptions {
  SamplerKind kind = SamplerKind::Auto;
  unsigned threads = 1;
};

struct Draws {
  std::vector<std::size_t> values;
  std::uint64_t proposals = 0;
  SamplerKind used = SamplerKind::InverseCdf;

  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(values.size()) / static_cast<double>(proposals);
  }
};

/// L iid draws. Auto uses the inverse CDF, since every constructed pmf has a
/// certified normalizer. Throws NoSamplerAvailable when the requested
/// strategy's precondition fails.
Draws sample_pmf(const PowerSeriesPmf& pmf, RngSpec rng, std::size_t L, SampleOptions options = {});

struct McComponents {
  /// T+(N) and T-(N), exact within eps or estimated.
  MeasureValue mass_pos;
  MeasureValue mass_neg;
  double mass_pos_stderr = 0.0;
  double mass_neg_stderr = 0.0;
  /// Fractions of draws that landed in B.
  double fraction_pos = 0.0;
  double fraction_neg = 0.0;
  double fraction_pos_stderr = 0.0;
  double fraction_neg_stderr = 0.0;
  bool normalizers_estimated = false;
};

struct McEstimate {
  double point = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  /// Deterministic error from certified normalizers and rounding; a
  /// statistical check should allow max(k * std_error, numerical_error).
  double numerical_error = 0.0;
  McComponents components;
};

struct McOptions {
  bool estimate_normalizers = false;
  unsigned threads = 1;
  double eps = kDefaultEps;
};

/// T(B) ~ T+(N) (1/L1) sum I(n1_i in B) - T-(N) (1/L2) sum I(n2_j in B)
/// with n1 ~ f(. | zeta1, b1) and n2 ~ f(. | zeta2, b2). Each side and each
/// normalizer estimate uses its own substream.
McEstimate estimate_measure(double zeta1, const CoefficientSequence& b1, double zeta2,
                            const CoefficientSequence& b2, const NatSet& B, std::size_t L1, std::size_t L2,
                            RngSpec rng, McOptions options = {});

/// (e^zeta / L) sum b_{n_i} with n_i iid Poisson(zeta).
McEstimate estimate_normalizer_poisson(double zeta, const CoefficientSequence& b, std::size_t L, RngSpec rng,
                                       unsigned threads = 1);

struct CoverageRow {
  std::size_t replication = 0;
  double point = 0.0;
  double std_error = 0.0;
  bool covered = false;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  std::size_t covered = 0;
  double exact = 0.0;
  double k_sigma = 3.0;
};

/// Replication r uses rng.substream(r).
CoverageReport calibrate_coverage(double zeta1, const CoefficientSequence& b1, double zeta2,
                                  const CoefficientSequence& b2, const NatSet& B, std::size_t L,
                                  std::size_t replications, double exact, RngSpec rng, McOptions options = {},
                                  double k_sigma = 3.0);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  double se_mean = 0.0;
  /// Large-sample standard error of the variance from the fourth moment.
  double se_variance = 0.0;
};

SampleSummary summarize(std::span<const double> values);

}  // namespace taylor
