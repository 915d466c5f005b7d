#include "probe/special_functions.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "probe/errors.hpp"
#include "probe/quadrature.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogMax = 709.78;

void check_args(double alpha, cplx z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha out of ]0,1]");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("Mittag-Leffler argument must be finite");
}

cplx exp_checked(cplx z) {
  if (z.real() > kLogMax) throw OverflowError("Mittag-Leffler value exceeds double range");
  return std::exp(z);
}

// Falling factorial n (n-1) ... (n-m+1).
double falling(double n, int m) {
  double p = 1.0;
  for (int i = 0; i < m; ++i) p *= (n - i);
  return p;
}

// Residue contribution (1/alpha) exp(z^{1/alpha}) and its z-derivatives.
cplx exp_branch(double alpha, cplx z, int order) {
  const cplx lz = std::log(z);
  const cplx w = std::exp(lz / alpha);
  const double ia = 1.0 / alpha;
  cplx pre;
  switch (order) {
    case 0:
      pre = ia;
      break;
    case 1:
      pre = ia * ia * std::exp((ia - 1.0) * lz);
      break;
    default:
      pre = ia * ia * (ia * std::exp((2.0 * ia - 2.0) * lz) + (ia - 1.0) * std::exp((ia - 2.0) * lz));
      break;
  }
  if (pre == 0.0) return 0.0;
  const double lm = w.real() + std::log(std::abs(pre));
  if (lm > kLogMax) throw OverflowError("Mittag-Leffler value exceeds double range");
  return pre * std::exp(w);
}

struct AsymResult {
  cplx value;
  bool ok;
};

// lgamma(alpha k) and sin(pi alpha k), k >= 1, for the most recent alpha.
struct AsymCoefficients {
  double alpha = -1.0;
  std::vector<double> lg, sp;
  void reset(double a) {
    alpha = a;
    lg.assign(1, 0.0);
    sp.assign(1, 0.0);
  }
  void extend(int k) {
    while (static_cast<int>(lg.size()) <= k) {
      const double x = alpha * static_cast<double>(lg.size());
      lg.push_back(std::lgamma(x));
      sp.push_back(sinpi(x));
    }
  }
};

AsymResult asym_impl(double alpha, cplx z, int order, bool with_exp = true) {
  thread_local AsymCoefficients co;
  if (co.alpha != alpha) co.reset(alpha);
  const double az = std::abs(z);
  const double lz = std::log(az);
  const double th = std::arg(z);
  const cplx zinv = 1.0 / z;
  cplx zpow = 1.0;
  for (int i = 0; i < order; ++i) zpow *= zinv;
  const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
  cplx sum = 0.0;
  double last_mag = HUGE_VAL;
  double tail = HUGE_VAL;
  for (int k = 1; k < 400; ++k) {
    co.extend(k);
    zpow *= zinv;
    // |c_k z^{-k-order}| falling-factorial weighted
    const double ff = falling(k + order - 1.0, order);
    const double lmag = co.lg[k] - (k + order) * lz + std::log(ff);
    const double mag = std::exp(lmag) / kPi;
    if (mag > last_mag && k > 2) break;
    last_mag = mag;
    tail = mag;
    if (co.sp[k] == 0.0) continue;
    // d^m/dz^m z^{-k} = (-1)^m k (k+1) ... (k+m-1) z^{-k-m}
    if (co.lg[k] < 700.0) {
      sum -= sgn * (std::exp(co.lg[k]) * co.sp[k] / kPi) * ff * zpow;
    } else {
      sum -= sgn * co.sp[k] * mag * std::polar(1.0, -(k + order) * th);
    }
    if (mag * mag < 1e-36 * std::norm(sum)) {
      tail = 0.0;
      break;
    }
  }
  cplx total = sum;
  if (with_exp && std::abs(th) < alpha * kPi) total += exp_branch(alpha, z, order);
  const bool ok = tail <= 1e-14 * std::abs(total);
  return {total, ok};
}

cplx series_impl(double alpha, cplx z, int order, double* magsum) {
  cplx sum = 0.0;
  double msum = 0.0;
  const double az = std::abs(z);
  // 1/Gamma(1 + alpha n) for the most recent alpha
  thread_local double cached_alpha = -1.0;
  thread_local std::vector<double> rg;
  if (cached_alpha != alpha) {
    cached_alpha = alpha;
    rg.clear();
  }
  cplx zp = 1.0;  // z^{n-order}
  for (int n = order; n < 3000; ++n) {
    while (static_cast<int>(rg.size()) <= n) rg.push_back(rgamma(1.0 + alpha * static_cast<double>(rg.size())));
    const cplx term = falling(n, order) * rg[n] * zp;
    sum += term;
    const double tm2 = std::norm(term);
    if (magsum) msum += std::sqrt(tm2);
    if (n > order + 4 && tm2 <= 1e-34 * std::norm(sum) && az <= 1.0 + n * 0.5) break;
    if (n > order + 4 && tm2 == 0.0 && zp == 0.0) break;
    zp *= z;
  }
  if (magsum) *magsum = msum;
  return sum;
}

// Rays and arc with adaptive panels; slow, kept as an independent check.
cplx contour_adaptive_impl(double alpha, cplx z, int order, ContourParams& prm) {
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  const double az = std::abs(zz);
  const double thz = std::arg(zz);  // in [0, pi]

  // Steep rays decay fastest; back off only when the pole sits near the ray.
  const double ths = thz / alpha;
  const double hi = kPi - 0.05;
  const double eta = std::abs(hi - ths) >= 0.3 ? hi : ths - 0.35;
  const double r = az > 0.0 ? std::min(1.0, std::pow(0.5 * az, 1.0 / alpha)) : 1.0;
  const double ce = std::cos(eta);
  const double rho_max = prm.truncation > 0.0 ? r + prm.truncation : r + 46.0 / std::abs(ce);
  prm.eta = eta;
  prm.r = r;
  prm.truncation = rho_max - r;

  double mfact = 1.0;
  for (int i = 2; i <= order; ++i) mfact *= i;

  int calls = 0;
  auto f = [&](cplx s, cplx sa) {
    ++calls;
    cplx d = sa - zz;
    cplx den = d;
    for (int i = 0; i < order; ++i) den *= d;
    return mfact * (sa / s) * std::exp(s) / den;
  };
  const cplx ep = std::polar(1.0, eta), em = std::conj(ep);
  const cplx eap = std::polar(1.0, alpha * eta), eam = std::conj(eap);
  auto ray = [&](double rho) {
    const double ra = std::pow(rho, alpha);
    return f(rho * ep, ra * eap) * ep - f(rho * em, ra * eam) * em;
  };
  const double rap = std::pow(r, alpha);
  auto arc = [&](double phi) {
    const cplx e = std::polar(1.0, phi);
    const cplx ea = std::polar(rap, alpha * phi);
    return f(r * e, ea) * (cplx(0.0, r) * e);
  };

  cplx res = 0.0;
  const bool inside = az > 0.0 && std::pow(az, 1.0 / alpha) > r && thz < alpha * eta;
  if (inside) res = exp_branch(alpha, zz, order);

  AdaptiveOptions opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-16 * std::abs(res);
  opt.max_intervals = 4000;
  auto qa = integrate_adaptive(arc, -eta, eta, opt);
  opt.abs_tol = std::max(opt.abs_tol, 1e-15 * std::abs(qa.value));
  std::vector<double> br;
  const double rp = std::pow(az, 1.0 / alpha);
  for (double b : {r + 1.0, r + 5.0, rp * 0.9, rp, rp * 1.1})
    if (b > r && b < rho_max) br.push_back(b);
  auto qr = integrate_adaptive(ray, r, rho_max, opt, br);
  prm.nodes = calls;
  const double scale = std::abs(qa.value) + std::abs(qr.value) + std::abs(res);
  if (qa.error + qr.error > 1e-11 * scale)
    throw QuadratureError("Mittag-Leffler contour quadrature did not converge");
  cplx out = (qa.value + qr.value) / cplx(0.0, 2.0 * kPi) + res;
  if (zz.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

struct ContourNodes {
  std::vector<cplx> weight;  // e^s s^(alpha-1) (1 + iu)
  std::vector<cplx> power;   // s^alpha
};

const ContourNodes& contour_nodes(double alpha, int i, int j, double mu, double h, int n) {
  struct Key {
    double alpha;
    int i, j;
    bool operator<(const Key& o) const { return std::tie(alpha, i, j) < std::tie(o.alpha, o.i, o.j); }
  };
  thread_local std::map<Key, ContourNodes> cache;
  const Key key{alpha, i, j};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();
  ContourNodes c;
  c.weight.reserve(2 * n + 1);
  c.power.reserve(2 * n + 1);
  for (int k = -n; k <= n; ++k) {
    const cplx w(1.0, k * h);
    const cplx s = mu * w * w;
    const cplx ls = std::log(s);
    c.power.push_back(std::exp(alpha * ls));
    c.weight.push_back(std::exp(s + (alpha - 1.0) * ls) * w);
  }
  return cache.emplace(key, std::move(c)).first->second;
}

// Trapezoid rule on the parabola s(u) = mu (1 + iu)^2. The branch cut maps to
// Im u = 1; the pole z^{1/alpha}, when present, is kept either left or right
// of the contour and (mu, step, N) are chosen for the resulting strip width.
cplx contour_impl(double alpha, cplx z, int order, ContourParams& prm) {
  // For alpha = 1 the integrand is analytic left of any contour passing right
  // of z, so only the residue e^z survives.
  if (alpha == 1.0) {
    prm.nodes = 0;
    return exp_checked(z);
  }
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  const double thz = std::arg(zz);
  const double L = 36.0;  // -ln of the target error
  const bool has_pole = zz != 0.0 && thz < alpha * kPi;
  double q = 0.0;
  cplx sp = 0.0;
  if (has_pole) {
    sp = std::exp(std::log(zz) / alpha);
    q = std::sqrt(std::abs(sp)) * std::cos(0.5 * thz / alpha);
  }
  double best_n = HUGE_VAL;
  int best_i = 0, best_j = 0;
  bool best_right = false;
  static const auto mu_grid = [] {
    std::vector<std::pair<double, double>> g;  // (mu, sqrt(mu)), 0.05 .. 8
    for (int i = 0; 0.05 * std::pow(2.0, i * 0.25) <= 8.0; ++i) {
      const double mu = 0.05 * std::pow(2.0, i * 0.25);
      g.emplace_back(mu, std::sqrt(mu));
    }
    return g;
  }();
  for (int i = 0; i < static_cast<int>(mu_grid.size()); ++i) {
    const auto [mu, smu] = mu_grid[i];
    for (int side = 0; side < 2; ++side) {
      const bool right = side == 1;
      double d = 1.0;
      if (has_pole) {
        const double g = q / smu;
        d = std::min(1.0, right ? g - 1.0 : 1.0 - g);
      } else if (right) {
        continue;
      }
      // quantised so that node sets can be reused between calls
      const int j = static_cast<int>(std::floor(d * 20.0));
      if (j < 1) continue;
      const double h = 2.0 * kPi * 0.8 * j / 20.0 / (mu + L);
      const double n = std::ceil(std::sqrt(1.0 + L / mu) / h);
      if (n < best_n) {
        best_n = n;
        best_i = i;
        best_j = j;
        best_right = right;
      }
    }
  }
  if (!std::isfinite(best_n) || best_n > 20000) throw QuadratureError("no admissible Mittag-Leffler contour");
  const int n = static_cast<int>(best_n);
  const double mu = mu_grid[best_i].first;
  const double h = 2.0 * kPi * 0.8 * best_j / 20.0 / (mu + L);
  prm.eta = 0.0;
  prm.r = mu;
  prm.truncation = n * h;
  prm.nodes = 2 * n + 1;

  const ContourNodes& nodes = contour_nodes(alpha, best_i, best_j, mu, h, n);
  double mfact = 1.0;
  for (int i = 2; i <= order; ++i) mfact *= i;
  cplx sum = 0.0;
  for (std::size_t k = 0; k < nodes.weight.size(); ++k) {
    const cplx d = nodes.power[k] - zz;
    cplx den = d;
    for (int i = 0; i < order; ++i) den *= d;
    sum += nodes.weight[k] * std::conj(den) / std::norm(den);
  }
  cplx out = sum * (mfact * h * mu / kPi);
  if (has_pole && best_right) out += exp_branch(alpha, zz, order);
  if (zz.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

cplx eval_dispatch(double alpha, cplx z, int order) {
  if (alpha == 1.0) return exp_checked(z);
  if (z == 0.0) {
    const double c = order == 0 ? 1.0 : falling(order, order) * rgamma(1.0 + alpha * order);
    return c;
  }
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  cplx out;
  if (std::abs(zz) <= kMlSmallRadius) {
    out = series_impl(alpha, zz, order, nullptr);
  } else if (const AsymResult a = asym_impl(alpha, zz, order); a.ok) {
    out = a.value;
  } else {
    ContourParams p;
    out = contour_impl(alpha, zz, order, p);
  }
  if (zz.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

}  // namespace

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

double sinpi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r < 0.5) return std::sin(kPi * r);
  if (r <= 1.5) return std::sin(kPi * (1.0 - r));
  return std::sin(kPi * (r - 2.0));
}

bool ml_asymptotic_converges(double alpha, cplx z) {
  check_args(alpha, z);
  if (std::abs(z) < 1.0) return false;
  const cplx zz = z.imag() < 0.0 ? std::conj(z) : z;
  try {
    return asym_impl(alpha, zz, 0).ok;
  } catch (const OverflowError&) {
    return true;
  }
}

MlRegime select_ml_regime(double alpha, cplx z) {
  MlRegime m;
  m.switch_radius_small = kMlSmallRadius;
  m.switch_radius_large = kMlLargeRadius;
  const double az = std::abs(z);
  if (az <= kMlSmallRadius)
    m.kind = MlRegime::Kind::TaylorSeries;
  else if (ml_asymptotic_converges(alpha, z))
    m.kind = MlRegime::Kind::Asymptotic;
  else
    m.kind = MlRegime::Kind::ContourIntegral;
  return m;
}

cplx ml_eval(double alpha, cplx z) {
  check_args(alpha, z);
  return eval_dispatch(alpha, z, 0);
}

cplx ml_deriv(double alpha, cplx z, int order) {
  check_args(alpha, z);
  if (order < 1 || order > 2) throw DomainError("derivative order must be 1 or 2");
  return eval_dispatch(alpha, z, order);
}

cplx ml_eval_minus_one(double alpha, cplx z) {
  check_args(alpha, z);
  if (std::abs(z) > 0.5) return ml_eval(alpha, z) - 1.0;
  if (alpha == 1.0) {
    if (z.imag() == 0.0) return std::expm1(z.real());
    // e^z - 1 = e^x cos y - 1 + i e^x sin y, with cos y - 1 = -2 sin^2(y/2)
    const double ex = std::exp(z.real()), sh = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) - 2.0 * ex * sh * sh, ex * std::sin(z.imag())};
  }
  cplx sum = 0.0, zp = z;
  for (int n = 1; n < 200; ++n) {
    const cplx t = rgamma(1.0 + alpha * n) * zp;
    sum += t;
    if (std::abs(t) <= 1e-17 * std::abs(sum)) break;
    zp *= z;
  }
  if (z.imag() == 0.0) sum = cplx(sum.real(), 0.0);
  return sum;
}

cplx ml_series(double alpha, cplx z, int order) {
  check_args(alpha, z);
  const bool flip = z.imag() < 0.0;
  cplx out = series_impl(alpha, flip ? std::conj(z) : z, order, nullptr);
  if (z.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

cplx ml_contour(double alpha, cplx z, int order, ContourParams& params) {
  check_args(alpha, z);
  return contour_impl(alpha, z, order, params);
}

cplx ml_contour(double alpha, cplx z, int order) {
  ContourParams p;
  return ml_contour(alpha, z, order, p);
}

cplx ml_contour_adaptive(double alpha, cplx z, int order) {
  check_args(alpha, z);
  ContourParams p;
  return contour_adaptive_impl(alpha, z, order, p);
}

cplx ml_asymptotic(double alpha, cplx z, int order) {
  check_args(alpha, z);
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  if (zz == 0.0) throw DomainError("asymptotic expansion needs z != 0");
  AsymResult a = asym_impl(alpha, zz, order);
  if (!a.ok) throw QuadratureError("asymptotic expansion not accurate at this argument");
  cplx out = a.value;
  if (zz.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

cplx ml_asymptotic_algebraic(double alpha, cplx z, bool* ok) {
  check_args(alpha, z);
  if (alpha == 1.0) {
    if (ok) *ok = true;
    return 0.0;
  }
  if (z == 0.0) throw DomainError("asymptotic expansion needs z != 0");
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  AsymResult a = asym_impl(alpha, zz, 0, false);
  if (ok) *ok = a.ok;
  cplx out = a.value;
  if (zz.imag() == 0.0) out = cplx(out.real(), 0.0);
  return flip ? std::conj(out) : out;
}

double bessel_j1(double s) {
  if (std::isnan(s)) throw DomainError("bessel_j1 needs a number");
  if (s < 0.0) return -bessel_j1(-s);
  if (s == 0.0) return 0.0;
  if (s <= 12.0) {
    const long double h = 0.5L * s, h2 = h * h;
    long double term = h, sum = h;
    for (int k = 1; k < 80; ++k) {
      term *= -h2 / (static_cast<long double>(k) * (k + 1));
      sum += term;
      if (std::fabs(term) < 1e-21L * std::fabs(sum)) break;
    }
    return static_cast<double>(sum);
  }
  // Hankel expansion: J1 = sqrt(2/(pi s)) (P cos chi - Q sin chi)
  const double mu = 4.0;
  double p = 1.0, q = 0.0, a = 1.0, prev = HUGE_VAL;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * s);
    if (std::abs(a) > prev) break;
    prev = std::abs(a);
    // k odd -> Q, k even -> P; signs alternate in pairs
    const int j = k / 2;
    const double sg = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1)
      q += sg * a;
    else
      p += sg * a;
    if (std::abs(a) < 1e-17) break;
  }
  const double chi = s - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * s)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_j_half(double w) {
  if (!(w > 0.0)) throw DomainError("bessel_j_half needs w > 0");
  return std::sqrt(2.0 / (kPi * w)) * std::sin(w);
}

}  // namespace probe
