#pragma once

#include <complex>

namespace probe {

using cplx = std::complex<double>;

struct MlRegime {
  enum class Kind { TaylorSeries, ContourIntegral, Asymptotic };
  Kind kind = Kind::TaylorSeries;
  double switch_radius_small = 1.0;
  double switch_radius_large = 50.0;
};

// Hankel-type contour: two rays at arg = +-eta joined by an arc of radius r.
struct ContourParams {
  double eta = 0.75 * 3.141592653589793;
  double r = 0.5;
  double truncation = 0.0;  // ray length, 0 picks it from the decay of e^zeta
  int nodes = 0;            // filled with the number of integrand calls
};

inline constexpr double kMlSmallRadius = 1.0;
inline constexpr double kMlLargeRadius = 50.0;

// Deterministic in (alpha, z).
MlRegime select_ml_regime(double alpha, cplx z);

// E_alpha(z) and its first two derivatives, 0 < alpha <= 1.
cplx ml_eval(double alpha, cplx z);
cplx ml_deriv(double alpha, cplx z, int order);

// E_alpha(z) - 1 without cancellation for small |z|.
cplx ml_eval_minus_one(double alpha, cplx z);

// Individual evaluators, exposed so regime hand-offs can be checked.
// Each returns the order-th derivative (0, 1 or 2).
cplx ml_series(double alpha, cplx z, int order = 0);
cplx ml_contour(double alpha, cplx z, int order = 0);
cplx ml_contour(double alpha, cplx z, int order, ContourParams& params);
// Same integral on rays plus arc with adaptive Gauss-Kronrod panels (slow).
cplx ml_contour_adaptive(double alpha, cplx z, int order = 0);
// Throws QuadratureError when the expansion cannot reach full accuracy at z.
cplx ml_asymptotic(double alpha, cplx z, int order = 0);
bool ml_asymptotic_converges(double alpha, cplx z);
// Only the algebraic part -sum_k z^{-k}/Gamma(1 - alpha k); ok reports
// whether the optimally truncated sum reached full accuracy.
cplx ml_asymptotic_algebraic(double alpha, cplx z, bool* ok = nullptr);

// 1/Gamma(x) for real x, zero at the poles.
double rgamma(double x);
// sin(pi x) with exact zeros at the integers.
double sinpi(double x);

double bessel_j1(double s);
double bessel_j_half(double w);

}  // namespace probe
