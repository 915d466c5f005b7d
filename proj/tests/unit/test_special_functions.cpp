#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "probe/errors.hpp"
#include "probe/special_functions.hpp"

using namespace probe;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// E_{1/2}(x) = exp(x^2) erfc(-x)
double ml_half_oracle(double x) { return std::exp(x * x) * std::erfc(-x); }

struct Ref {
  double alpha;
  cplx z;
  int order;
  cplx value;
};

// High-precision series sums (mpmath, 60+ digits).
const Ref kRefs[] = {
    {0.5, {-4.0, 0.0}, 0, {0.13699945762506139, 0.0}},
    {0.5, {2.0, 0.0}, 1, {436.8919967270074, 0.0}},
    {0.5, {2.0, 0.0}, 2, {1965.4497956879856, 0.0}},
    {0.25, {3.0, 2.0}, 0, {-0.20434540992580187, 0.17138216150648284}},
    {0.25, {-4.0, 1.0}, 0, {0.16559653814200992, 0.03491013426533743}},
    {0.75, {-10.0, 3.0}, 0, {0.027608341401395082, 0.0091765028798688965}},
    {0.75, {2.0, 7.0}, 1, {-0.099035980511452385, 0.38883141252925625}},
    {0.5, {-30.0, 20.0}, 0, {0.013020908424138849, 0.0086739347484466745}},
    {0.75, {-55.0, 10.0}, 0, {0.0049400999111634786, 0.00091513372103481341}},
    {0.75, {40.0, 30.0}, 0, {1.1855870139542472e+52, 2.4825581918762895e+52}},
    {0.25, {-2.0, -3.0}, 2, {-0.019536445306899542, -0.015496245495328877}},
    {0.9, {-20.0, 5.0}, 0, {0.0053458122214464919, 0.0014663497252795543}},
    {0.1, {-1.5, 0.5}, 0, {0.37022033746085197, 0.076115846227281982}},
    {0.5, {0.3, -0.2}, 1, {1.7979763384238453, -0.78131153420351828}},
};

}  // namespace

TEST_CASE("mittag-leffler basic values") {
  CHECK(ml_eval(1.0, 1.0).real() == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(ml_eval(0.5, 0.0) == cplx(1.0, 0.0));
  CHECK(ml_eval(0.5, -4.0).real() == doctest::Approx(0.1370).epsilon(1e-4));
  const double a = ml_eval(0.5, -100.0).real();
  CHECK(a == doctest::Approx(-1.0 / (-100.0 * std::tgamma(0.5))).epsilon(0.02));
  CHECK(std::abs(ml_deriv(1.0, 0.0, 1) - 1.0) < 1e-15);
  CHECK(ml_deriv(0.5, 0.0, 1).real() == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-14));
}

TEST_CASE("mittag-leffler against high precision series") {
  for (const auto& r : kRefs) {
    const cplx v = r.order == 0 ? ml_eval(r.alpha, r.z) : ml_deriv(r.alpha, r.z, r.order);
    INFO("alpha=" << r.alpha << " z=" << r.z << " m=" << r.order << " got " << v);
    CHECK(rel(v, r.value) < 1e-10);
  }
}

TEST_CASE("mittag-leffler half against erfc") {
  for (double x = -20.0; x <= 5.0; x += 0.125) {
    INFO("x=" << x);
    CHECK(rel(ml_eval(0.5, x), ml_half_oracle(x)) < 1e-10);
  }
}

TEST_CASE("mittag-leffler exponential specialization and symmetry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    cplx z(20 * u(rng), 20 * u(rng));
    if (std::abs(z) > 20) continue;
    CHECK(rel(ml_eval(1.0, z), std::exp(z)) < 1e-10);
  }
  for (double a : {0.2, 0.5, 0.8}) {
    for (int i = 0; i < 30; ++i) {
      cplx z(-30 * std::abs(u(rng)), 30 * u(rng));
      const cplx p = ml_eval(a, z), q = ml_eval(a, std::conj(z));
      CHECK(p == std::conj(q));
    }
    CHECK(ml_eval(a, 3.7).imag() == 0.0);
    CHECK(ml_eval(a, -13.1).imag() == 0.0);
  }
}

TEST_CASE("mittag-leffler regimes agree at the switch radii") {
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    for (int k = 0; k < 64; ++k) {
      const double th = -std::numbers::pi + (k + 0.5) * 2.0 * std::numbers::pi / 64;
      const cplx z1 = std::polar(kMlSmallRadius, th);
      CHECK(rel(ml_series(a, z1), ml_contour(a, z1)) < 1e-9);
      const cplx z2 = std::polar(kMlLargeRadius, th);
      if (!ml_asymptotic_converges(a, z2)) continue;
      cplx c, s;
      try {
        c = ml_contour(a, z2);
        s = ml_asymptotic(a, z2);
      } catch (const OverflowError&) {
        continue;
      }
      INFO("a=" << a << " th=" << th);
      CHECK(rel(s, c) < 1e-9);
    }
  }
}

TEST_CASE("mittag-leffler derivatives match differences") {
  const double h = 1e-3;
  for (double a : {0.3, 0.6, 0.9}) {
    for (cplx z : {cplx(0.4, 0.1), cplx(-3.0, 2.0), cplx(3.0, 1.0), cplx(-60.0, 5.0)}) {
      const double h1 = 1e-5;
      const cplx d1 = (ml_eval(a, z + h1) - ml_eval(a, z - h1)) / (2 * h1);
      // in the growth sector scale the step with the rate |z|^{1/a-1}/a
      const double h2 = z.real() > 0 ? h / (1.0 + std::pow(std::abs(z), 1.0 / a - 1.0) / a) : h;
      const cplx d2 = (ml_eval(a, z + h2) - 2.0 * ml_eval(a, z) + ml_eval(a, z - h2)) / (h2 * h2);
      INFO("a=" << a << " z=" << z);
      CHECK(rel(ml_deriv(a, z, 1), d1) < 1e-7);
      CHECK(rel(ml_deriv(a, z, 2), d2) < 1e-4);
    }
  }
}

TEST_CASE("mittag-leffler monotone growth on the positive axis") {
  for (double a : {0.3, 0.7}) {
    for (double x : {0.5, 2.0, 6.0}) {
      const double e = ml_eval(a, x).real() - 1.0;
      for (int n = 1; n <= 10; ++n) CHECK(e > std::pow(x, n) / std::tgamma(1 + a * n));
    }
  }
}

TEST_CASE("mittag-leffler errors") {
  CHECK_THROWS_AS(ml_eval(1.5, 1.0), DomainError);
  CHECK_THROWS_AS(ml_eval(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(ml_eval(1.0, 800.0), OverflowError);
  CHECK_THROWS_AS(ml_eval(0.5, 40.0), OverflowError);
  CHECK_THROWS_AS(ml_deriv(0.5, 1.0, 3), DomainError);
}

TEST_CASE("minus-one form is accurate near zero") {
  for (double a : {0.4, 1.0}) {
    const cplx z(1e-9, 2e-9);
    const cplx d = ml_eval_minus_one(a, z);
    CHECK(rel(d, z / std::tgamma(1 + a)) < 1e-8);
  }
}

TEST_CASE("bessel functions") {
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-13));
  CHECK(std::abs(bessel_j1(3.8317059702075125)) < 1e-8);
  for (double s = 0.05; s < 80.0; s += 0.37) {
    INFO("s=" << s);
    CHECK(std::abs(bessel_j1(s) - std::cyl_bessel_j(1.0, s)) < 1e-10);
    CHECK(std::abs(bessel_j1(s)) <= s / 2);
  }
  CHECK(bessel_j_half(std::numbers::pi / 2) == doctest::Approx(2 / std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(bessel_j_half(std::numbers::pi)) < 1e-15);
  CHECK(bessel_j_half(1.0) == doctest::Approx(0.6713967071418031).epsilon(1e-14));
  CHECK(bessel_j1(-1.0) == doctest::Approx(-std::cyl_bessel_j(1.0, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bessel_j_half(0.0), DomainError);
}
