#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "taylor/montecarlo.hpp"

namespace taylor {

namespace stm {

/// a_n iid N(mu, sigma^2), fixed gamma.
struct GaussianIID {
  double mu = 0.0;
  double sigma = 1.0;
  double gamma = 1.0;
};

/// a_n independent N(mu_n, sigma_n^2), fixed gamma.
struct GaussianIndep {
  CoefficientSequence mu;
  CoefficientSequence sigma;
  double gamma = 1.0;
};

/// gamma = I_A with P(A) = p, independent of a_n ~ N(mu_n, sigma_n^2), so
/// X(B) = I_A sum_{n in B} a_n / n!.
struct IndicatorGamma {
  double p = 0.5;
  CoefficientSequence mu;
  CoefficientSequence sigma;
};

/// gamma = 1, a_n = n! c_n I_{A_n} with {A_n} a partition, P(A_n) = probs[n].
struct SimpleFunction {
  std::vector<double> c;
  std::vector<double> probs;
};

struct NormalStep {
  double mean = 0.0;
  double sd = 1.0;
};

/// `high` with probability p, `low` otherwise.
struct BernoulliStep {
  double p = 0.5;
  double low = -1.0;
  double high = 1.0;
};

struct UniformStep {
  double low = -1.0;
  double high = 1.0;
};

using StepDist = std::variant<NormalStep, BernoulliStep, UniformStep>;

/// gamma = 1, a_0 = 0, a_n = n! X_n for 1 <= n <= t.
struct RandomWalk {
  StepDist step = NormalStep{};
  std::size_t t = 0;
};

/// S_t = phi S_{t-1} + e_t, S_0 = 0; gamma = 1, a_j = phi^j j! e_{t-j}
/// for 0 <= j < t.
struct Ar1 {
  double phi = 0.5;
  double sigma2 = 1.0;
  std::size_t t = 1;
};

/// X_{k/n} = (S_k - k mu) / (sigma sqrt(n)) for normal steps Z ~ N(mu, sigma^2);
/// gamma = 1, a_k = k! (Z_k - mu) / (sigma sqrt(n)) for 1 <= k <= n.
struct BrownianApprox {
  std::size_t n = 1;
  double mu = 0.0;
  double sigma = 1.0;
};

}  // namespace stm

using StmSpec = std::variant<stm::GaussianIID, stm::GaussianIndep, stm::IndicatorGamma, stm::SimpleFunction,
                             stm::RandomWalk, stm::Ar1, stm::BrownianApprox>;

/// Throws InvalidArgument when a parameter is outside its domain.
void validate(const StmSpec& spec);

double step_mean(const stm::StepDist& step);
double step_variance(const stm::StepDist& step);

/// Index of the last possibly nonzero coefficient, when the spec has finite
/// support.
std::optional<std::size_t> support_last(const StmSpec& spec);

/// Truncation for infinite sets on Gaussian specs: the omitted terms are
/// bounded through the envelope |mu_n| + 6 sigma_n.
TruncationPlan stm_truncation_plan(const StmSpec& spec, double eps = kDefaultEps);

/// One realized omega: terms[n] = a_n(omega) gamma(omega)^n / n! for
/// n <= N, and the common factor I_A (1 for every other spec).
struct StmRealization {
  double factor = 1.0;
  std::vector<double> terms;
};

StmRealization realize(const StmSpec& spec, std::size_t N, Rng& rng);

/// X(omega)(B) for one draw. Infinite B needs `plan` unless the spec has
/// finite support; throws DivergenceUnknown otherwise.
double sample_stm(const StmSpec& spec, const NatSet& B, const std::optional<TruncationPlan>& plan, RngSpec rng);

/// Replication r uses rng.substream(r).
std::vector<double> replicate_stm(const StmSpec& spec, const NatSet& B, const std::optional<TruncationPlan>& plan,
                                  std::size_t replications, RngSpec rng, unsigned threads = 1);

struct StmMoments {
  double mean = 0.0;
  double variance = 0.0;
  /// Truncation and rounding bounds on the two values.
  double mean_error = 0.0;
  double variance_error = 0.0;
};

/// Closed-form moments of X(B). Throws UnsupportedSpec for BrownianApprox;
/// use brownian_moments_at for a fixed time.
StmMoments stm_moments(const StmSpec& spec, const NatSet& B, double eps = kDefaultEps);

/// Mean and variance of X_t for t in [0, 1].
StmMoments brownian_moments_at(const stm::BrownianApprox& spec, double t);

struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  RngSpec rng;
};

/// S_0 = 0, S_k = X_1 + ... + X_k for k <= t.
SamplePath simulate_random_walk(const stm::RandomWalk& spec, RngSpec rng);
SamplePath simulate_ar1(const stm::Ar1& spec, RngSpec rng);
/// Grid values X_{k/n}, k = 0..n.
SamplePath simulate_brownian(const stm::BrownianApprox& spec, RngSpec rng);
/// Linear interpolation of a path at time t.
double interpolate(const SamplePath& path, double t);

struct MartingaleProxy {
  /// S_{t+1} - S_t over replications with S_t >= 0 and S_t < 0.
  SampleSummary nonnegative;
  SampleSummary negative;
};

MartingaleProxy martingale_increment_proxy(const stm::RandomWalk& spec, std::size_t replications, RngSpec rng,
                                           unsigned threads = 1);

}  // namespace taylor
