#include "probe/vekua.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "probe/errors.hpp"
#include "probe/quadrature.hpp"
#include "probe/special_functions.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double angle_integral(F&& f, const VekuaOptions& opt, double scale = 0.0) {
  int n = opt.nodes;
  double prev = gauss_fixed(f, 0.0, 0.5 * kPi, n);
  while (2 * n <= opt.max_nodes) {
    n *= 2;
    const double cur = gauss_fixed(f, 0.0, 0.5 * kPi, n);
    if (std::abs(cur - prev) <= opt.agreement * std::max(std::abs(cur), scale)) return cur;
    prev = cur;
  }
  throw QuadratureError("Vekua ray quadrature did not converge");
}

}  // namespace

void HelmholtzNeedleParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha out of ]0,1]");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
}

double vekua_transform(const ScalarField3& v, double lambda, const Vec3& y, const VekuaOptions& opt) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double ky = lambda * y.norm();
  const double vy = v(y);
  if (ky == 0.0) return vy;
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    return v(c * c * y) * bessel_j1(ky * std::sin(phi)) * c * c;
  };
  return vy - ky * angle_integral(f, opt, std::abs(vy) / ky);
}

double helmholtz_needle_eval(const Vec3& y, const Vec3& x, const HelmholtzNeedleParams& p, const VekuaOptions& opt) {
  p.validate();
  auto v = [&](const Vec3& z) { return needle3d_eval(z, Vec3::Zero(), p.alpha, p.tau, p.frame); };
  return vekua_transform(v, p.lambda, y - x, opt);
}

double helmholtz_needle_on_axis(double s, const HelmholtzNeedleParams& p) {
  p.validate();
  if (s == 0.0) return p.tau * rgamma(1.0 + p.alpha) / (4.0 * kPi);
  const double sh = std::sin(0.5 * p.lambda * s);
  const double head = (ml_eval_minus_one(p.alpha, p.tau * s).real() + 2.0 * sh * sh) / (4.0 * kPi * s);
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    return ml_eval(p.alpha, p.tau * c * c * s).real() * bessel_j1(p.lambda * s * std::sin(phi));
  };
  return head - p.lambda / (4.0 * kPi) * angle_integral(f, VekuaOptions{});
}

Vec3 helmholtz_needle_grad_at_tip(const HelmholtzNeedleParams& p) {
  p.validate();
  return needle3d_grad_on_axis(0.0, p.alpha, p.tau, p.frame);
}

std::pair<double, double> vekua_kernel_identity(double s) {
  if (!(s >= 0.0)) throw DomainError("identity needs s >= 0");
  const double sh = std::sin(0.5 * s);
  const double rhs = 2.0 * sh * sh;
  if (s == 0.0) return {0.0, 0.0};
  auto f = [&](double phi) { return bessel_j1(s * std::sin(phi)); };
  VekuaOptions o;
  o.agreement = 1e-13;
  return {s * angle_integral(f, o, 1.0 / s), rhs};
}

cplx tilde_needle_eval(const Vec3& y, const Vec3& x, const HelmholtzNeedleParams& p, const VekuaOptions& opt) {
  const double re = helmholtz_needle_eval(y, x, p, opt);
  const double r = (y - x).norm();
  const double im = r == 0.0 ? p.lambda / (4.0 * kPi) : std::sin(p.lambda * r) / (4.0 * kPi * r);
  return {re, im};
}

double helmholtz_green(const Vec3& y, double lambda) {
  const double r = y.norm();
  if (!(r > 0.0)) throw DomainError("Helmholtz fundamental solution is singular at 0");
  return std::cos(lambda * r) / (4.0 * kPi * r);
}

}  // namespace probe
