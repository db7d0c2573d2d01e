// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "taylor/analytic.hpp"
#include "taylor/geometry.hpp"
#include "taylor/montecarlo.hpp"
#include "taylor/stochastic.hpp"

namespace {

using namespace taylor;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) {
        detail += "; ";
      }
      detail += what;
    }
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

CoefficientSequence one() { return CoefficientSequence::constant(1.0); }

Check exponential_mass() {
  Check c;
  for (double gamma : {-2.0, -1.0, 0.5, 1.0, 2.0}) {
    const TaylorMeasure T(one(), gamma);
    double best = 1e300;
    MeasureValue v;
    for (int rep = 0; rep < 20; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      v = evaluate(T, NatSet::all(), 1e-13);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    const double rel = std::abs(v.value - std::exp(gamma)) / std::exp(gamma);
    c.require(rel <= 1e-12, "gamma=" + fmt(gamma) + " rel=" + fmt(rel));
    c.require(best < 1.0, "gamma=" + fmt(gamma) + " ms=" + fmt(best));
  }
  return c;
}

double ulps(double a, double b) {
  if (a == b) {
    return 0.0;
  }
  const double m = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / (std::nextafter(m, 1e300) - m);
}

Check poisson_taylor_mass() {
  Check c;
  const TaylorMeasure unit = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Unit);
  const TaylorMeasure z1 = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Zeta1);
  const TaylorMeasure z2 = poisson_taylor(2.0, 1.0, PoissonTaylorPresentation::Zeta2);
  const double exact = std::exp(2.0) - std::exp(1.0);
  for (const TaylorMeasure* T : {&unit, &z1, &z2}) {
    const double v = evaluate(*T, NatSet::all(), 1e-12).value;
    c.require(std::abs(v - exact) <= 1e-10, "mass=" + fmt(v));
  }
  double worst = 0.0;
  for (std::size_t n = 0; n <= 60; ++n) {
    worst = std::max({worst, ulps(unit.term_value(n), z1.term_value(n)), ulps(unit.term_value(n), z2.term_value(n)),
                      ulps(z1.term_value(n), z2.term_value(n))});
  }
  c.require(worst <= 4.0, "presentation ulps=" + fmt(worst));
  return c;
}

TaylorMeasure random_measure(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double gamma = 3.0 * u(rng);
  switch (rng() % 3) {
    case 0: return TaylorMeasure(CoefficientSequence::constant(2.0 * u(rng)), gamma);
    case 1:
      return TaylorMeasure(
          CoefficientSequence({u(rng), u(rng)}, CoefficientSequence::GeometricTail{u(rng), 2.0 * u(rng)}), gamma);
    default: {
      std::vector<double> prefix(1 + rng() % 12);
      for (double& v : prefix) {
        v = 5.0 * u(rng);
      }
      return TaylorMeasure(CoefficientSequence::finite(prefix), gamma);
    }
  }
}

NatSet random_set(std::mt19937_64& rng) {
  std::vector<std::size_t> e(rng() % 6);
  for (auto& v : e) {
    v = rng() % 15;
  }
  switch (rng() % 3) {
    case 0: return NatSet::finite(e);
    case 1: return NatSet::cofinite(e);
    default: return NatSet::all();
  }
}

Check jordan_suite() {
  Check c;
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const TaylorMeasure T = random_measure(rng);
    const NatSet B = random_set(rng);
    const JordanPair J = jordan_decompose(T);
    const MeasureValue v = evaluate(T, B);
    const MeasureValue tv = total_variation(T, B);
    const MeasureValue p = J.positive(B);
    const MeasureValue n = J.negative(B);
    const double err = p.abs_error + n.abs_error;
    c.require(std::abs(v.value - (p.value - n.value)) <= v.abs_error + err, "T != T+ - T- at trial " + std::to_string(trial));
    c.require(std::abs(tv.value - (p.value + n.value)) <= tv.abs_error + err, "|T| != T+ + T- at trial " + std::to_string(trial));
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t k = 0; k < 25; ++k) {
      (J.hahn_positive(k) ? pos : neg).push_back(k);
    }
    c.require(J.negative(NatSet::finite(pos)).value == 0.0 && J.positive(NatSet::finite(neg)).value == 0.0,
              "singularity at trial " + std::to_string(trial));
  }
  const JordanPair parity = jordan_decompose(TaylorMeasure(one(), -1.0));
  const double cp = parity.positive(NatSet::all()).value;
  const double sn = parity.negative(NatSet::all()).value;
  c.require(std::abs(cp - std::cosh(1.0)) <= 1e-12 && std::abs(sn - std::sinh(1.0)) <= 1e-12,
            "parity (" + fmt(cp) + ", " + fmt(sn) + ")");
  return c;
}

Check hilbert_axioms() {
  Check c;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TaylorMeasure> samples;
  for (int i = 0; i < 15; ++i) {
    samples.emplace_back(
        CoefficientSequence({u(rng), u(rng), u(rng)}, CoefficientSequence::GeometricTail{u(rng), 1.5 * u(rng)}),
        2.0 * u(rng));
  }
  const HilbertAxiomReport r = hilbert_axiom_report(samples, NatSet::all(), 1e-14, 7);
  c.require(r.pairs >= 100, "pairs=" + std::to_string(r.pairs));
  c.require(r.symmetry <= 1e-9, "symmetry=" + fmt(r.symmetry));
  c.require(r.bilinearity <= 1e-9, "bilinearity=" + fmt(r.bilinearity));
  c.require(r.cauchy_schwarz_violation <= 1e-9, "cauchy-schwarz=" + fmt(r.cauchy_schwarz_violation));
  c.require(r.rho_parallelogram <= 1e-9, "rho parallelogram=" + fmt(r.rho_parallelogram));
  const TaylorMeasure e0 = TaylorMeasure::from_terms([](std::size_t n) { return n == 0 ? 1.0 : 0.0; },
                                                     cert::FiniteSupport{0, 1.0});
  const TaylorMeasure e1 = TaylorMeasure::from_terms([](std::size_t n) { return n == 1 ? 1.0 : 0.0; },
                                                     cert::FiniteSupport{1, 1.0});
  const HilbertAxiomReport tv = hilbert_axiom_report({e0, e1}, NatSet::all());
  c.require(tv.tv_parallelogram >= 0.5, "tv parallelogram=" + fmt(tv.tv_parallelogram));
  return c;
}

Check round_trip() {
  Check c;
  const std::array<double, 3> gammas = {0.5, 1.0, 3.0};
  auto check_pmf = [&](const std::string& name, const CoefficientSequence& p, std::size_t upto) {
    std::vector<std::vector<double>> recovered;
    for (double gamma : gammas) {
      const TaylorProbabilityPair P = probability_pair(from_pmf(p, gamma));
      c.require(!P.q_neg.has_value(), name + " has a negative side");
      std::vector<double> row;
      double worst = 0.0;
      for (std::size_t n = 0; n <= upto; ++n) {
        row.push_back(P.f_pos(n));
        worst = std::max(worst, std::abs(P.f_pos(n) - p.at(n)));
      }
      c.require(worst <= 1e-12, name + " gamma=" + fmt(gamma) + " err=" + fmt(worst));
      recovered.push_back(std::move(row));
    }
    for (std::size_t g = 1; g < recovered.size(); ++g) {
      for (std::size_t n = 0; n <= upto; ++n) {
        if (std::abs(recovered[g][n] - recovered[0][n]) > 1e-12) {
          c.require(false, name + " depends on gamma at n=" + std::to_string(n));
          return;
        }
      }
    }
  };
  check_pmf("geometric",
            CoefficientSequence::from_rule([](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n) - 1); },
                                           cert::GeometricEquiv{0.25, 0.5}),
            60);
  const PowerSeriesPmf poisson = PowerSeriesPmf::poisson(2.0);
  check_pmf("poisson",
            CoefficientSequence::from_rule([poisson](std::size_t n) { return poisson.pmf(n); },
                                           cert::GeometricEquiv{1.0, 0.5}),
            60);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(1 + rng() % 25);
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
    check_pmf("finite#" + std::to_string(trial), CoefficientSequence::finite(w), w.size() + 2);
  }
  return c;
}

Check mc_calibration() {
  Check c;
  const NatSet B = NatSet::finite({0, 1, 2});
  const CoverageReport r = calibrate_coverage(2.0, one(), 1.0, one(), B, 10'000, 200, 2.5, {20240601, 0});
  c.require(r.covered >= 193, "coverage=" + std::to_string(r.covered) + "/200");
  const auto t0 = std::chrono::steady_clock::now();
  const McEstimate big = estimate_measure(2.0, one(), 1.0, one(), B, 1'000'000, 1'000'000, {7, 0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 5.0, "L=1e6 took " + fmt(secs) + " s");
  c.require(std::abs(big.point - 2.5) <= 3.0 * big.std_error, "L=1e6 point=" + fmt(big.point));
  const CoefficientSequence b = CoefficientSequence::from_rule([](std::size_t n) { return static_cast<double>(n); },
                                                               cert::GeometricEquiv{1.0, 1.5});
  const McEstimate z = estimate_normalizer_poisson(2.0, b, 1'000'000, {8, 0});
  c.require(std::abs(z.point - 2.0 * std::exp(2.0)) <= 3.0 * z.std_error, "normalizer=" + fmt(z.point));
  return c;
}

Check stm_moments_suite() {
  Check c;
  const std::size_t R = 100'000;
  auto within = [&](const std::string& name, const std::vector<double>& x, double mean, double var) {
    const SampleSummary s = summarize(x);
    c.require(std::abs(s.mean - mean) <= 3.0 * s.se_mean, name + " mean=" + fmt(s.mean));
    c.require(std::abs(s.variance - var) <= 3.0 * s.se_variance, name + " var=" + fmt(s.variance));
  };
  const stm::GaussianIID g{1.0, 1.0, 1.0};
  const StmMoments gm = stm_moments(g, NatSet::all());
  c.require(std::abs(gm.mean - std::numbers::e) <= 1e-12 && std::abs(gm.variance - 2.2795853) <= 1e-7,
            "closed form gaussian");
  within("gaussian", replicate_stm(g, NatSet::all(), stm_truncation_plan(g), R, {1, 0}), std::numbers::e, gm.variance);

  const stm::Ar1 ar{0.5, 1.0, 3};
  c.require(stm_moments(ar, NatSet::all()).variance == 1.3125, "closed form ar1");
  within("ar1", replicate_stm(ar, NatSet::all(), std::nullopt, R, {2, 0}), 0.0, 1.3125);

  const stm::BrownianApprox br{100, 0.0, 1.0};
  std::vector<double> inc;
  std::vector<double> end;
  for (std::uint64_t r = 0; r < R; ++r) {
    const SamplePath p = simulate_brownian(br, RngSpec{3, 0}.substream(r));
    inc.push_back(p.values[1] - p.values[0]);
    end.push_back(p.values.back());
  }
  within("brownian increment", inc, 0.0, 1.0 / 100.0);
  const SampleSummary e = summarize(end);
  c.require(std::abs(e.variance - 1.0) <= 3.0 * e.se_variance, "brownian X_1 var=" + fmt(e.variance));

  const MartingaleProxy m = martingale_increment_proxy({stm::NormalStep{0.0, 1.0}, 20}, R, {4, 0});
  c.require(std::abs(m.nonnegative.mean) <= 3.0 * m.nonnegative.se_mean, "martingale S>=0 " + fmt(m.nonnegative.mean));
  c.require(std::abs(m.negative.mean) <= 3.0 * m.negative.se_mean, "martingale S<0 " + fmt(m.negative.mean));
  return c;
}

Check analytic_suite() {
  Check c;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const char* name : {"exp", "sin", "cos"}) {
    const AnalyticRep rep = builtin(name, 0.0);
    const auto ref = builtin_reference(name);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      worst = std::max(worst, std::abs(eval(rep, x, 1e-12).value - ref(x)) - std::abs(ref(x)) * 1e-14);
    }
    c.require(worst <= 1e-12, std::string(name) + " eval err=" + fmt(worst));
  }
  std::uniform_real_distribution<double> v(-0.45, 0.45);
  const std::vector<AnalyticRep> reps = {exp_rep(), sin_rep(), cos_rep(), geometric_rep()};
  double hom = 0.0;
  for (const AnalyticRep& a : reps) {
    for (const AnalyticRep& b : reps) {
      const AnalyticRep ab = multiply(a, b);
      for (int i = 0; i < 10; ++i) {
        const double x = v(rng);
        hom = std::max(hom, std::abs(eval(ab, x).value - eval(a, x).value * eval(b, x).value));
      }
    }
  }
  c.require(hom <= 1e-10, "product homomorphism=" + fmt(hom));
  double trip = 0.0;
  for (const AnalyticRep& rep : {exp_rep(), sin_rep()}) {
    const AnalyticRep back = recenter(recenter(rep, 0.8), 0.0);
    for (std::size_t k = 0; k <= 15; ++k) {
      trip = std::max(trip, std::abs(back.coefficients.at(k) - rep.coefficients.at(k)));
    }
  }
  c.require(trip <= 1e-10, "recenter round trip=" + fmt(trip));
  const double sup = sup_distance_on_grid(truncate(exp_rep(), 25), builtin_reference("exp"), 0.0, 1.0, 1001, 1e-15);
  c.require(sup <= 1e-12, "sup distance=" + fmt(sup));
  const double l1 = lp_norm_on_interval(exp_rep(), 1.0, 0.0, 1.0);
  const double l2 = lp_norm_on_interval(identity_rep(), 2.0, 0.0, 1.0);
  c.require(std::abs(l1 - (std::numbers::e - 1.0)) <= 1e-9, "L1 exp=" + fmt(l1));
  c.require(std::abs(l2 - 1.0 / std::sqrt(3.0)) <= 1e-9, "L2 x=" + fmt(l2));
  return c;
}

#ifdef TAYLOR_CLI_PATH
std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(TAYLOR_CLI_PATH) + " " + args;
  std::string out;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
      out.append(buf.data(), n);
    }
    out += "#exit=" + std::to_string(pclose(pipe));
  }
  return out;
}
#endif

Check determinism() {
  Check c;
  const NatSet B = NatSet::finite({0, 1, 2});
  const PowerSeriesPmf p = PowerSeriesPmf::poisson(2.0);
  const std::vector<std::size_t> base = sample_pmf(p, {42, 0}, 50'000, {SamplerKind::InverseCdf, 1}).values;
  McOptions o1;
  o1.estimate_normalizers = true;
  const McEstimate e1 = estimate_measure(2.0, one(), 1.0, one(), B, 30'000, 30'000, {42, 0}, o1);
  const stm::GaussianIID g{1.0, 1.0, 1.0};
  const std::vector<double> s1 = replicate_stm(g, NatSet::all(), stm_truncation_plan(g), 20'000, {42, 0}, 1);
  for (unsigned threads : {2U, 3U, 8U}) {
    c.require(sample_pmf(p, {42, 0}, 50'000, {SamplerKind::InverseCdf, threads}).values == base,
              "sample threads=" + std::to_string(threads));
    McOptions ot = o1;
    ot.threads = threads;
    const McEstimate et = estimate_measure(2.0, one(), 1.0, one(), B, 30'000, 30'000, {42, 0}, ot);
    c.require(et.point == e1.point && et.std_error == e1.std_error, "mc-measure threads=" + std::to_string(threads));
    c.require(replicate_stm(g, NatSet::all(), stm_truncation_plan(g), 20'000, {42, 0}, threads) == s1,
              "stm threads=" + std::to_string(threads));
  }
#ifdef TAYLOR_CLI_PATH
  const std::vector<std::string> commands = {
      "sample --zeta 2 --L 20000 --seed 5",
      "sample --zeta 1 --b even --sampler rejection --L 20000 --seed 5",
      "mc-measure --zeta1 2 --zeta2 1 --set 0,1,2 --L1 20000 --L2 20000 --seed 5 --estimate-normalizers",
      "mc-measure --zeta1 2 --zeta2 1 --set 0,1,2 --L 2000 --replications 20 --exact 2.5 --seed 5",
      "mc-normalizer --zeta 2 --b identity --L 20000 --seed 5",
      "stm-sim --spec '{\"kind\":\"gaussian_iid\",\"mu\":1,\"sigma\":1,\"gamma\":1}' --reps 5000 --seed 5",
      "stm-sim --spec '{\"kind\":\"brownian\",\"n\":64}' --path --seed 5",
  };
  for (const std::string& cmd : commands) {
    const std::string ref = run_cli(cmd + " --threads 1");
    c.require(ref.find("#exit=0") != std::string::npos, "cli failed: " + cmd);
    for (const char* t : {" --threads 2", " --threads 4"}) {
      c.require(run_cli(cmd + t) == ref, "cli differs: " + cmd + t);
    }
  }
#endif
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"exponential mass", exponential_mass},
      {"poisson-taylor mass and presentations", poisson_taylor_mass},
      {"jordan decomposition", jordan_suite},
      {"hilbert axioms", hilbert_axioms},
      {"pmf round trip", round_trip},
      {"monte carlo calibration", mc_calibration},
      {"stochastic moments", stm_moments_suite},
      {"analytic functions", analytic_suite},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                c.detail.empty() ? "" : " | ", c.detail.c_str());
    std::fflush(stdout);
    failures += c.ok ? 0 : 1;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
