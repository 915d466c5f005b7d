#include "probe/needle2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "probe/errors.hpp"
#include "probe/special_functions.hpp"

namespace probe {

Direction2 Direction2::from(double dx, double dy) {
  const double n = std::hypot(dx, dy);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("direction must be a nonzero vector");
  Direction2 d;
  d.omega = Vec2(dx / n, dy / n);
  d.omega_perp = Vec2(-d.omega.y(), d.omega.x());
  return d;
}

Direction2 Direction2::from_angle(double theta) { return from(std::cos(theta), std::sin(theta)); }

double Box2::diameter() const { return std::hypot(x1 - x0, y1 - y0); }

bool Region2::contains(const Vec2& p) const {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Box2& b) { return b.contains(p); });
}

Region2 Region2::translated(const Vec2& s) const {
  Region2 r;
  r.boxes.reserve(boxes.size());
  for (const auto& b : boxes) r.boxes.push_back({b.x0 + s.x(), b.x1 + s.x(), b.y0 + s.y(), b.y1 + s.y()});
  return r;
}

std::vector<Vec2> Region2::samples() const {
  std::vector<Vec2> out;
  for (const auto& b : boxes) {
    const double step = b.diameter() / 64.0;
    if (!(step > 0.0)) {
      out.emplace_back(b.x0, b.y0);
      continue;
    }
    const int nx = std::max(1, static_cast<int>(std::ceil((b.x1 - b.x0) / step)));
    const int ny = std::max(1, static_cast<int>(std::ceil((b.y1 - b.y0) / step)));
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j <= ny; ++j)
        out.emplace_back(b.x0 + (b.x1 - b.x0) * i / nx, b.y0 + (b.y1 - b.y0) * j / ny);
  }
  return out;
}

NeedleSchedule NeedleSchedule::translated(const Vec2& shift) const {
  NeedleSchedule s = *this;
  for (auto& r : s.exhaustion) r = r.translated(shift);
  return s;
}

cplx green2d(const Vec2& y) { return 1.0 / to_complex(y); }

std::pair<cplx, cplx> green2d_grad(const Vec2& y) {
  const cplx z = to_complex(y);
  const cplx d = -1.0 / (z * z);
  return {d, cplx(0.0, 1.0) * d};
}

namespace {

// F(zeta) = -(E(c zeta) - 1)/zeta and F'(zeta), c = tau conj(omega).
cplx needle_f(cplx zeta, double alpha, cplx c) {
  if (zeta == 0.0) return -c * rgamma(1.0 + alpha);
  return -ml_eval_minus_one(alpha, c * zeta) / zeta;
}

cplx needle_fprime(cplx zeta, double alpha, cplx c) {
  const cplx w = c * zeta;
  if (std::abs(w) < 0.5) {
    // -sum_{n>=2} (n-1) c^n zeta^{n-2} / Gamma(1 + alpha n)
    cplx sum = 0.0, p = c * c;
    for (int n = 2; n < 80; ++n) {
      const cplx t = (n - 1.0) * rgamma(1.0 + alpha * n) * p;
      sum += t;
      if (std::abs(t) <= 1e-17 * std::abs(sum)) break;
      p *= w;
    }
    return -sum;
  }
  const cplx e1 = ml_eval_minus_one(alpha, w);
  const cplx d = ml_deriv(alpha, w, 1);
  return -(w * d - e1) / (zeta * zeta);
}

}  // namespace

cplx needle2d_eval(const Vec2& y, const Vec2& x, double alpha, double tau, const Direction2& dir) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  return needle_f(to_complex(y - x), alpha, tau * dir.conj_omega());
}

std::pair<cplx, cplx> needle2d_grad(const Vec2& y, const Vec2& x, double alpha, double tau,
                                    const Direction2& dir) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  const cplx fp = needle_fprime(to_complex(y - x), alpha, tau * dir.conj_omega());
  return {fp, cplx(0.0, 1.0) * fp};
}

double needle2d_deviation(const std::vector<Vec2>& samples, const Needle& needle, double alpha, double tau) {
  const cplx c = tau * needle.dir.conj_omega();
  double worst = 0.0;
  for (const auto& y : samples) {
    const cplx zeta = to_complex(y - needle.tip);
    if (zeta == 0.0) return HUGE_VAL;
    // v - G = -E(c zeta)/zeta, gradient magnitude sqrt(2)|d/dzeta|
    const cplx e = ml_eval(alpha, c * zeta);
    const cplx de = ml_deriv(alpha, c * zeta, 1);
    const double val = std::abs(e / zeta);
    const double grad = std::sqrt(2.0) * std::abs((c * de * zeta - e) / (zeta * zeta));
    worst = std::max({worst, val, grad});
  }
  return worst;
}

double min_cone_angle(const std::vector<Vec2>& samples, const Needle& needle) {
  double best = std::numbers::pi;
  for (const auto& y : samples) {
    const Vec2 d = y - needle.tip;
    const double n = d.norm();
    if (n == 0.0) return 0.0;
    best = std::min(best, std::acos(std::clamp(d.dot(needle.dir.omega) / n, -1.0, 1.0)));
  }
  return best;
}

namespace {

// slab test of the ray x + t omega, t >= 0, against a closed box
bool ray_hits_box(const Needle& nd, const Box2& b) {
  double t0 = 0.0, t1 = HUGE_VAL;
  const double p[2] = {nd.tip.x(), nd.tip.y()}, d[2] = {nd.dir.omega.x(), nd.dir.omega.y()};
  const double lo[2] = {b.x0, b.y0}, hi[2] = {b.x1, b.y1};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (p[k] < lo[k] || p[k] > hi[k]) return false;
      continue;
    }
    double a = (lo[k] - p[k]) / d[k], c = (hi[k] - p[k]) / d[k];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
  }
  return t0 <= t1;
}

}  // namespace

NeedleSchedule build_schedule(const std::vector<Region2>& exhaustion, const Needle& needle,
                              const ScheduleOptions& opt) {
  if (!(opt.eps0 > 0.0)) throw DomainError("eps0 must be positive");
  for (const auto& r : exhaustion)
    for (const auto& b : r.boxes)
      if (ray_hits_box(needle, b)) throw ScheduleError("exhaustion set touches the needle");
  NeedleSchedule s;
  double alpha = std::min(1.0, opt.alpha_cap);
  double tau_prev = 0.0;
  for (std::size_t n = 1; n <= exhaustion.size(); ++n) {
    const Region2& on = exhaustion[n - 1];
    const auto samples = on.samples();
    const double eps = opt.eps0 * std::ldexp(1.0, -static_cast<int>(n));
    if (!samples.empty()) {
      const double phi = min_cone_angle(samples, needle);
      if (!(phi > 0.0)) throw ScheduleError("exhaustion set touches the needle");
      alpha = std::min(alpha, 0.95 * 2.0 * phi / std::numbers::pi);
    }
    auto dev = [&](double t) {
      try {
        return needle2d_deviation(samples, needle, alpha, t);
      } catch (const OverflowError&) {
        return HUGE_VAL;
      }
    };
    double tau = std::max(opt.tau_start, tau_prev);
    double d = dev(tau);
    if (d >= eps) {
      double lo = tau;
      while (d >= eps) {
        lo = tau;
        tau *= 2.0;
        if (tau > opt.tau_max) throw ScheduleError("doubling search exceeded tau_max");
        d = dev(tau);
      }
      // bisect in log scale to the smallest admissible tau
      double hi = tau;
      for (int it = 0; it < 12 && hi / lo > 1.01; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double dm = dev(mid);
        if (dm < eps) {
          hi = mid;
          d = dm;
        } else {
          lo = mid;
        }
      }
      tau = hi;
      d = dev(tau);
    }
    if (tau_prev > 0.0 && tau <= tau_prev) {
      tau = tau_prev * 1.05;
      d = dev(tau);
    }
    s.alphas.push_back(alpha);
    s.taus.push_back(tau);
    s.epsilons.push_back(eps);
    s.exhaustion.push_back(on);
    s.deviations.push_back(samples.empty() ? 0.0 : d);
    tau_prev = tau;
  }
  return s;
}

Region2 behind_tip_region(const Needle& needle, double delta, double extent, int raster) {
  Region2 r;
  const double x0 = needle.tip.x() - extent, y0 = needle.tip.y() - extent;
  const double h = 2.0 * extent / raster;
  auto ok = [&](double px, double py) { return (Vec2(px, py) - needle.tip).dot(needle.dir.omega) <= -delta; };
  for (int j = 0; j < raster; ++j) {
    const double ya = y0 + j * h, yb = ya + h;
    auto cell_ok = [&](int k) {
      const double xa = x0 + k * h, xb = xa + h;
      return ok(xa, ya) && ok(xb, ya) && ok(xa, yb) && ok(xb, yb);
    };
    int i = 0;
    while (i < raster) {
      if (!cell_ok(i)) {
        ++i;
        continue;
      }
      int k = i;
      while (k + 1 < raster && cell_ok(k + 1)) ++k;
      r.boxes.push_back({x0 + i * h, x0 + (k + 1) * h, ya, yb});
      i = k + 1;
    }
  }
  return r;
}

NeedleSchedule build_schedule(const Disk2& domain, const Needle& needle, const ScheduleOptions& opt) {
  if ((needle.tip - domain.center).norm() >= domain.radius) throw DomainError("needle tip must lie inside the domain");
  std::vector<Region2> ex;
  for (int n = 1; n <= opt.n_max; ++n) {
    const double delta = std::max(opt.delta_min, opt.delta1 * std::pow(opt.delta_ratio, n - 1));
    ex.push_back(behind_tip_region(needle, delta, 2.0 * domain.radius, opt.raster));
  }
  return build_schedule(ex, needle, opt);
}

}  // namespace probe
