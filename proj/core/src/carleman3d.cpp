#include "probe/carleman3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "probe/errors.hpp"
#include "probe/quadrature.hpp"
#include "probe/special_functions.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;

void check_ml(double alpha, double tau) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha out of ]0,1]");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
}

// Exponentially large part (1/alpha) exp((tau w)^{1/alpha}) of E_alpha(tau w);
// returns false when it is absent on the principal branch.
bool exp_part(double alpha, double tau, cplx w, cplx& psi) {
  const cplx z = tau * w;
  if (std::abs(std::arg(z)) >= alpha * kPi) return false;
  psi = std::exp(std::log(z) / alpha);
  return true;
}

double exp_part_log(double alpha, double tau, cplx w) {
  cplx psi;
  if (!exp_part(alpha, tau, w, psi)) return -HUGE_VAL;
  return psi.real() - std::log(alpha);
}

// Integral of g over [0, U] in the variable u = c sinh(t).
template <class G>
double sinh_mapped(G& g, double c, double U, std::vector<double> u_breaks, double rel, double abs_tol,
                   int max_panels) {
  const double T = std::asinh(U / c);
  std::vector<double> tb;
  for (double u : u_breaks)
    if (u > 0.0 && u < U) tb.push_back(std::asinh(u / c));
  auto gt = [&](double t) { return g(c * std::sinh(t)) * c * std::cosh(t); };
  AdaptiveOptions opt;
  opt.rel_tol = rel;
  opt.abs_tol = abs_tol;
  opt.max_intervals = max_panels;
  auto res = integrate_adaptive(gt, 0.0, T, opt, tb);
  if (!res.converged) throw QuadratureError("u-integral did not converge");
  return res.value;
}

}  // namespace

Frame3 Frame3::from(const Vec3& t1, const Vec3& t2) {
  if (std::abs(t1.norm() - 1.0) > 1e-12 || std::abs(t2.norm() - 1.0) > 1e-12 || std::abs(t1.dot(t2)) > 1e-12)
    throw DomainError("frame vectors must be orthonormal");
  Frame3 f;
  f.theta1 = t1;
  f.theta2 = t2;
  f.omega = t1.cross(t2);
  return f;
}

Frame3 Frame3::from_omega(const Vec3& om) {
  const double n = om.norm();
  if (!(n > 0.0)) throw DomainError("omega must be nonzero");
  const Vec3 w = om / n;
  Vec3 a = std::abs(w.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  Vec3 t1 = (a - a.dot(w) * w).normalized();
  Vec3 t2 = w.cross(t1);
  Frame3 f;
  f.theta1 = t1;
  f.theta2 = t2;
  f.omega = t1.cross(t2);
  return f;
}

Frame3 Frame3::rotated(double phi) const {
  Frame3 f = *this;
  const double c = std::cos(phi), s = std::sin(phi);
  f.theta1 = c * theta1 + s * theta2;
  f.theta2 = -s * theta1 + c * theta2;
  f.omega = f.theta1.cross(f.theta2);
  return f;
}

AxisCoords axis_coords(const Vec3& y, const Frame3& frame) {
  const double a = y.dot(frame.theta1), b = y.dot(frame.theta2);
  AxisCoords c;
  c.rho = a * a + b * b;
  c.s = y.dot(frame.omega);
  c.r = std::sqrt(c.rho + c.s * c.s);
  return c;
}

double regular_part_integral(double rho, double s, double alpha, double tau, const SemiInfiniteQuadrature& q) {
  check_ml(alpha, tau);
  const double r = std::sqrt(rho + s * s);
  if (!(r > 0.0)) throw DomainError("regular part integral needs y != 0");
  const double sq = std::sqrt(rho);
  auto wof = [&](double u) { return cplx(s, std::sqrt(rho + u * u)); };
  auto g = [&](double u) {
    const cplx w = wof(u);
    return (ml_eval_minus_one(alpha, tau * w) / w).imag() / w.imag();
  };

  // magnitude scale of 2 pi^2 v, used for absolute tolerances
  double scale = kPi / (2.0 * r);
  if (s > 0.0) scale *= 1.0 + std::exp(std::min(700.0, std::pow(tau * s, 1.0 / alpha)));
  const double abs_tol = 1e-14 * scale;

  // Tail start: beyond the scales of the integrand and deep enough for the
  // algebraic expansion of E_alpha.
  double U = std::max({q.split, 2.0 * r, 60.0 / tau});
  const double u_lim = std::max(U, 400.0 / tau) * 64.0;
  while (alpha < 1.0 && exp_part_log(alpha, tau, wof(U)) > -45.0 && U < u_lim) U *= 2.0;
  const bool oscillatory = exp_part_log(alpha, tau, wof(U)) > -45.0;

  // Exponential part of the tail by two integrations by parts.
  double tail_exp = 0.0;
  if (oscillatory) {
    auto terms = [&](double u, double& rem) {
      const cplx w = wof(u);
      const double qq = w.imag();
      cplx psi;
      exp_part(alpha, tau, w, psi);
      const cplx wp(0.0, u / qq);
      auto ratio = [&](double uu) {
        const cplx ww = wof(uu);
        cplx ps;
        exp_part(alpha, tau, ww, ps);
        const cplx dps = ps / (alpha * ww) * cplx(0.0, uu / ww.imag());
        return (1.0 / (alpha * ww * ww.imag())) / dps;
      };
      const cplx B = 1.0 / (alpha * w * qq);
      const cplx dpsi = psi / (alpha * w) * wp;
      const double hd = 1e-3 * u;
      const cplx dratio = (ratio(u + hd) - ratio(u - hd)) / (2.0 * hd);
      const cplx e = std::exp(psi);
      rem = std::abs(e * B) / (std::pow(std::abs(dpsi), 3) * u * u);
      return (-e * B / dpsi + e * dratio / dpsi).imag();
    };
    double rem = HUGE_VAL;
    tail_exp = terms(U, rem);
    int guard = 0;
    while (rem > 1e-12 * scale) {
      U *= 1.5;
      tail_exp = terms(U, rem);
      if (++guard > 80) throw QuadratureError("oscillatory tail did not settle");
    }
  }

  // Algebraic part of the tail through t = U/u.
  double tail_alg = 0.0;
  if (alpha < 1.0) {
    bool ok = true;
    ml_asymptotic_algebraic(alpha, tau * wof(U), &ok);
    if (!ok) throw QuadratureError("asymptotic tail not accurate at the split point");
    auto ga = [&](double t) {
      const double u = U / t;
      const cplx w = wof(u);
      return (ml_asymptotic_algebraic(alpha, tau * w) / w).imag() / w.imag() * U / (t * t);
    };
    AdaptiveOptions opt;
    opt.rel_tol = q.panel_tolerance;
    opt.abs_tol = abs_tol;
    auto res = integrate_adaptive(ga, 0.0, 1.0, opt);
    if (!res.converged) throw QuadratureError("tail integral did not converge");
    tail_alg = res.value;
  }
  const double tail_one = std::atan(r / U) / r;

  std::vector<double> ub = {sq, std::abs(s), r, 1.0 / tau, q.split};
  // half-period breakpoints where the exponential part still matters
  if (exp_part_log(alpha, tau, wof(0.0)) > -45.0) {
    double ue = U;
    if (!oscillatory) {
      double lo = 0.0, hi = U;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (exp_part_log(alpha, tau, wof(mid)) > -45.0 ? lo : hi) = mid;
      }
      ue = hi;
    }
    cplx p0, p1;
    if (exp_part(alpha, tau, wof(0.0), p0) && exp_part(alpha, tau, wof(ue), p1)) {
      const int n = static_cast<int>(
          std::min<double>(q.max_panels / 4, std::ceil(std::abs(p1.imag() - p0.imag()) / kPi)));
      for (int k = 1; k < n; ++k) ub.push_back(ue * k / n);
    }
  }
  const double c = sq > 0.0 ? std::min(sq, U) : 1e-3 * std::min(r, 1.0 / tau);
  const double head = sinh_mapped(g, c, U, ub, q.panel_tolerance, abs_tol, q.max_panels);
  return head + tail_one + tail_alg + tail_exp;
}

double needle3d_on_axis(double s, double alpha, double tau) {
  check_ml(alpha, tau);
  if (s == 0.0) return tau * rgamma(1.0 + alpha) / (4.0 * kPi);
  return ml_eval_minus_one(alpha, tau * s).real() / (4.0 * kPi * s);
}

Vec3 needle3d_grad_on_axis(double s, double alpha, double tau, const Frame3& frame) {
  check_ml(alpha, tau);
  const double z = tau * s;
  double d;
  if (std::abs(z) < 0.5) {
    // (1/4pi) sum_{n>=2} (n-1) tau^n s^{n-2} / Gamma(1 + alpha n)
    double sum = 0.0, p = tau * tau;
    for (int n = 2; n < 80; ++n) {
      const double t = (n - 1.0) * rgamma(1.0 + alpha * n) * p;
      sum += t;
      if (std::abs(t) <= 1e-17 * std::abs(sum)) break;
      p *= z;
    }
    d = sum / (4.0 * kPi);
  } else {
    const double e1 = ml_eval_minus_one(alpha, z).real();
    const double de = ml_deriv(alpha, z, 1).real();
    d = (z * de - e1) / (4.0 * kPi * s * s);
  }
  return d * frame.omega;
}

double needle3d_eval(const Vec3& y, const Vec3& x, double alpha, double tau, const Frame3& frame,
                     const SemiInfiniteQuadrature& q) {
  check_ml(alpha, tau);
  const AxisCoords c = axis_coords(y - x, frame);
  if (c.r == 0.0) return needle3d_on_axis(0.0, alpha, tau);
  if (c.s > 0.0) {
    // v changes by about rho f''(s)/4 off the axis; k is the axial scale of f
    const double k = (std::pow(tau * c.s, 1.0 / alpha) / alpha + 1.0) / c.s;
    if (0.25 * c.rho * k * k < q.axis_tolerance) return needle3d_on_axis(c.s, alpha, tau);
  }
  return regular_part_integral(c.rho, c.s, alpha, tau, q) / (2.0 * kPi * kPi);
}

double phi_k_eval(const Vec3& y, const CarlemanKernel& kernel, const Frame3& frame, const SemiInfiniteQuadrature& q) {
  const AxisCoords c = axis_coords(y, frame);
  if (!(c.r > 0.0)) throw DomainError("Phi_K is singular at the origin");
  if (kernel.unit) {
    // -2 pi^2 Phi_1 = int Im(1/w)/sqrt(rho + u^2) du
    auto g = [&](double u) {
      const cplx w(c.s, std::sqrt(c.rho + u * u));
      return (1.0 / w).imag() / w.imag();
    };
    const double U = std::max(q.split, 2.0 * c.r);
    const double cc = c.rho > 0.0 ? std::min(std::sqrt(c.rho), U) : 1e-3 * c.r;
    const double head = sinh_mapped(g, cc, U, {std::sqrt(c.rho), std::abs(c.s), c.r}, q.panel_tolerance,
                                    1e-15 / c.r, q.max_panels);
    const double tail = -std::atan(c.r / U) / c.r;
    return -(head + tail) / (2.0 * kPi * kPi);
  }
  const double v = needle3d_eval(y, Vec3::Zero(), kernel.alpha, kernel.tau, frame, q);
  return 1.0 / (4.0 * kPi * c.r) - v;
}

ResidualReport verify_harmonic(double alpha, double tau, const Frame3& frame, const std::vector<Vec3>& points,
                               double h) {
  ResidualReport rep;
  rep.h = h;
  auto f = [&](const Vec3& y) { return needle3d_eval(y, Vec3::Zero(), alpha, tau, frame); };
  double s1 = 0.0, s2 = 0.0;
  for (const auto& y : points) {
    const AxisCoords c = axis_coords(y, frame);
    const double dist = c.s >= 0.0 ? std::sqrt(c.rho) : c.r;
    if (dist < 0.05) throw DomainError("verification point too close to the needle");
    ResidualPoint p;
    p.y = y;
    p.residual_h = std::abs(fd_helmholtz(f, y, h));
    p.residual_h2 = std::abs(fd_helmholtz(f, y, 0.5 * h));
    p.order = std::log2(p.residual_h / p.residual_h2);
    s1 += p.residual_h * p.residual_h;
    s2 += p.residual_h2 * p.residual_h2;
    rep.points.push_back(p);
  }
  if (!points.empty()) {
    rep.rms_h = std::sqrt(s1 / points.size());
    rep.rms_h2 = std::sqrt(s2 / points.size());
    rep.observed_order = std::log2(rep.rms_h / rep.rms_h2);
  }
  rep.passed = rep.observed_order >= 1.8;
  return rep;
}

BoundednessReport verify_singularity_extraction(const CarlemanKernel& kernel, const std::vector<double>& radii,
                                                const Frame3& frame, int samples) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] <= 0.5)) throw DomainError("radii must lie in ]0, 0.5]");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw DomainError("radii must be decreasing");
  }
  BoundednessReport rep;
  rep.tip_value = kernel.unit ? 0.0 : kernel.tau * rgamma(1.0 + kernel.alpha) / (4.0 * kPi);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (double rad : radii) {
    SphereSup ss;
    ss.radius = rad;
    auto diff = [&](const Vec3& y) { return std::abs(phi_k_eval(y, kernel, frame) - 1.0 / (4.0 * kPi * y.norm())); };
    for (int k = 0; k < samples; ++k) {
      const double zc = 1.0 - (2.0 * k + 1.0) / samples;
      const double rr = std::sqrt(1.0 - zc * zc);
      const Vec3 dir = rr * std::cos(golden * k) * frame.theta1 + rr * std::sin(golden * k) * frame.theta2 + zc * frame.omega;
      ss.sup = std::max(ss.sup, diff(rad * dir));
    }
    ss.axis_value = diff(rad * frame.omega);
    ss.sup = std::max(ss.sup, ss.axis_value);
    rep.spheres.push_back(ss);
  }
  double lo = HUGE_VAL, hi = 0.0;
  for (const auto& s : rep.spheres) {
    lo = std::min(lo, s.sup);
    hi = std::max(hi, s.sup);
  }
  // numerically zero differences (the unit kernel) count as bounded
  const double noise = radii.empty() ? 0.0 : 1e-10 / (4.0 * kPi * radii.back());
  rep.spread = hi <= noise ? 1.0 : hi / lo;
  rep.bounded = rep.spread <= 2.0;
  return rep;
}

}  // namespace probe
