#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "taylor/measure.hpp"

namespace taylor {

/// f(x) = T_{x - center, a}(N) with a_n = f^(n)(center), valid for
/// |x - center| < radius_hint.
struct AnalyticRep {
  double center = 0.0;
  CoefficientSequence coefficients;
  double radius_hint = kUnbounded;
  std::string name;
};

AnalyticRep exp_rep(double center = 0.0);
AnalyticRep sin_rep(double center = 0.0);
AnalyticRep cos_rep(double center = 0.0);
/// `power_coefficients` in the monomial basis: p(x) = sum_k p_k x^k.
AnalyticRep polynomial_rep(const std::vector<double>& power_coefficients, double center = 0.0);
/// 1 / (1 - x); throws OutOfDomain for |center| >= 1.
AnalyticRep geometric_rep(double center = 0.0);
AnalyticRep identity_rep(double center = 0.0);
AnalyticRep constant_rep(double value, double center = 0.0);

/// Dispatch by name: exp, sin, cos, polynomial, geometric, identity, constant.
/// `params` holds the polynomial coefficients or the constant value.
AnalyticRep builtin(std::string_view name, double center, const std::vector<double>& params = {});
/// Reference implementation of a builtin from <cmath>.
std::function<double(double)> builtin_reference(std::string_view name, const std::vector<double>& params = {});

/// Throws OutOfDomain for |x - center| >= radius_hint and DivergenceUnknown
/// for an unverified certificate.
MeasureValue eval(const AnalyticRep& rep, double x, double eps = kDefaultEps);

/// alpha r1 + beta r2; throws CenterMismatch.
AnalyticRep add(double alpha, const AnalyticRep& r1, double beta, const AnalyticRep& r2);
/// Binomial convolution c_l = sum_n C(l, n) a_{1,n} a_{2,l-n}; throws CenterMismatch.
AnalyticRep multiply(const AnalyticRep& r1, const AnalyticRep& r2);
/// r^n by binary exponentiation; r^0 is the constant 1.
AnalyticRep power(const AnalyticRep& rep, std::size_t n);
/// Keeps a_0..a_degree.
AnalyticRep truncate(const AnalyticRep& rep, std::size_t degree);

/// Taylor shift c_k = sum_m a_{k+m} h^m / m!, h = new_center - center, each
/// c_k within eps * max(1, |a_k|).
AnalyticRep recenter(const AnalyticRep& rep, double new_center, double eps = kDefaultEps);

/// max over an m-point uniform grid on [a, b] of |eval(rep, x) - oracle(x)|.
double sup_distance_on_grid(const AnalyticRep& rep, const std::function<double(double)>& oracle, double a, double b,
                            std::size_t m = 1001, double eps = kDefaultEps);

/// (int_a^b |f|^p)^(1/p) by composite Simpson with Richardson refinement until
/// successive estimates differ by at most eps. Throws QuadratureStall past
/// the depth cap.
double lp_norm_on_interval(const AnalyticRep& rep, double p, double a, double b, double eps = kDefaultEps);

}  // namespace taylor
