#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "probe/errors.hpp"

namespace probe {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached per order; safe to call from several threads.
const GaussRule& gauss_legendre(int n);

template <class F>
auto gauss_fixed(F&& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  using T = std::decay_t<decltype(f(c))>;
  T s{};
  for (int i = 0; i < n; ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

struct AdaptiveOptions {
  double abs_tol = 1e-300;
  double rel_tol = 1e-12;
  int max_intervals = 2000;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod 15 / Gauss 7 pair.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double mag(const T& v) {
  return std::abs(v);
}

template <class T, class F>
void gk15(F& f, double a, double b, T& res, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<T, 15> fv;
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }
  T rk = fv[7] * kWgk[7];
  T rg = fv[7] * kWg[3];
  for (int j = 0; j < 7; ++j) {
    rk += kWgk[j] * (fv[j] + fv[14 - j]);
    if (j % 2 == 1) rg += kWg[j / 2] * (fv[j] + fv[14 - j]);
  }
  const T mean = rk * 0.5;
  double asc = kWgk[7] * mag(T(fv[7] - mean));
  for (int j = 0; j < 7; ++j)
    asc += kWgk[j] * (mag(T(fv[j] - mean)) + mag(T(fv[14 - j] - mean)));
  asc *= std::abs(h);
  res = rk * h;
  err = mag(T((rk - rg) * h));
  if (asc > 0.0 && err > 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod 7-15 over [a, b].
// breaks lists interior points to start from (may be empty).
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {},
                        const std::vector<double>& breaks = {}) {
  using T = std::decay_t<decltype(f(a))>;
  struct Seg {
    double a, b;
    T v;
    double e;
    bool operator<(const Seg& o) const { return e < o.e; }
  };
  QuadResult<T> out;
  std::priority_queue<Seg> heap;
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : breaks)
    if (p > std::min(a, b) && p < std::max(a, b)) pts.push_back(p);
  pts.push_back(b);
  if (b < a)
    std::sort(pts.begin(), pts.end(), std::greater<>());
  else
    std::sort(pts.begin(), pts.end());
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Seg s{pts[i], pts[i + 1], T{}, 0.0};
    detail::gk15<T>(f, s.a, s.b, s.v, s.e);
    out.evaluations += 15;
    total += s.v;
    err += s.e;
    heap.push(s);
  }
  int n = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (n >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    Seg s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (m == s.a || m == s.b) {
      out.converged = false;
      heap.push(s);
      break;
    }
    Seg l{s.a, m, T{}, 0.0}, r{m, s.b, T{}, 0.0};
    detail::gk15<T>(f, l.a, l.b, l.v, l.e);
    detail::gk15<T>(f, r.a, r.b, r.v, r.e);
    out.evaluations += 30;
    total += l.v + r.v - s.v;
    err += l.e + r.e - s.e;
    heap.push(l);
    heap.push(r);
    ++n;
  }
  // Resum to drop accumulated cancellation in the running totals.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().v;
    esum += heap.top().e;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  return out;
}

}  // namespace probe
