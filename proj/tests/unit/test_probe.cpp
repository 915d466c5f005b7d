#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "probe/errors.hpp"
#include "probe/probe.hpp"

using namespace probe;

namespace {

constexpr double kPi = std::numbers::pi;

Geometry2 disk_geometry(double cx, double cy, double r) {
  Geometry2 g;
  g.cavities.push_back(Curve2::disk(cx, cy, r));
  return g;
}

std::vector<cplx> seq(std::initializer_list<double> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("verdict rule") {
  VerdictParams p;
  CHECK(classify(seq({1, 1, 1, 1, 1, 1}), p) == Verdict::Bounded);
  std::vector<cplx> pow2;
  for (int n = 1; n <= 10; ++n) pow2.push_back(std::ldexp(1.0, n));
  CHECK(classify(pow2, p) == Verdict::BlowUp);
  CHECK(classify(seq({1, 3, 2}), p) == Verdict::Inconclusive);
  CHECK(classify(seq({1, 3, 2, 5, 1, 4}), p) == Verdict::Inconclusive);
  CHECK(classify(seq({0, 0, 0, 0, 0}), p) == Verdict::Bounded);
  // stable but above theta/10
  p.theta = 5.0;
  CHECK(classify(seq({1, 1, 1, 1, 1}), p) == Verdict::Inconclusive);
  CHECK(classify(seq({2, 8, 4, 9, 7}), p) == Verdict::BlowUp);
  CHECK(classify({cplx(1), cplx(HUGE_VAL), cplx(1), cplx(1), cplx(1)}, VerdictParams{}) == Verdict::Inconclusive);
  CHECK(classify({cplx(1), cplx(1), cplx(1), cplx(1), cplx(HUGE_VAL)}, VerdictParams{}) == Verdict::BlowUp);
}

TEST_CASE("enlarging theta never turns blow-up into bounded") {
  std::mt19937 gen(17);
  std::lognormal_distribution<double> ln(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  int blow = 0, bounded = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<cplx> v;
    const double base = ln(gen);
    const int kind = trial % 3;
    for (int n = 0; n < 8; ++n) {
      if (kind == 0)
        v.push_back(base * u(gen));
      else if (kind == 1)
        v.push_back(base * std::pow(1.0 + 0.5 * u(gen), n));
      else
        v.push_back(ln(gen));
    }
    for (double t = 1e-2; t < 1e8; t *= 3.0) {
      const Verdict a = classify(v, {t, 4, 1.5});
      const Verdict b = classify(v, {3.0 * t, 4, 1.5});
      blow += a == Verdict::BlowUp;
      bounded += b == Verdict::Bounded;
      CHECK_FALSE((a == Verdict::BlowUp && b == Verdict::Bounded));
    }
  }
  CHECK(blow > 0);
  CHECK(bounded > 0);
}

TEST_CASE("direct indicator") {
  const double rho = 0.4;
  const auto g = disk_geometry(0.0, 0.0, rho);
  for (const Vec2 x : {Vec2(0.6, 0.0), Vec2(0.3, -0.5), Vec2(-0.05, 0.9), Vec2(0.45, 0.0)})
    CHECK(indicator_function_direct(g, x) == doctest::Approx(concentric_indicator(rho, x)).epsilon(1e-9));
  CHECK(indicator_function_direct(Geometry2{}, {0.2, 0.1}) == 0.0);
  CHECK_THROWS_AS(indicator_function_direct(g, {0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(indicator_function_direct(g, {1.1, 0.0}), DomainError);

  // growth on approach, bounded away from the cavity
  const auto off = disk_geometry(0.3, 0.0, 0.25);
  const CavitySolver solver(off);
  double prev = 0.0;
  for (double d : {0.2, 0.1, 0.05}) {
    const double v = indicator_function_direct(solver, off, {0.55 + d, 0.0});
    CHECK(v > prev);
    prev = v;
  }
  double sup = 0.0;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) {
      const Vec2 x(-0.9 + 1.8 * i / 14, -0.9 + 1.8 * j / 14);
      if (x.norm() >= 0.95 || (x - Vec2(0.3, 0.0)).norm() < 0.25 + 0.3) continue;
      const double v = indicator_function_direct(solver, off, x);
      CHECK(v > 0.0);
      sup = std::max(sup, v);
    }
  CHECK(std::isfinite(sup));
  CHECK(sup < indicator_function_direct(solver, off, {0.6, 0.0}));
}

TEST_CASE("indicator sequences") {
  const auto g = disk_geometry(0.0, 0.0, 0.4);
  const auto l0 = dtn_empty(1.0, DtnBasis::FourierModes, 64);
  const auto ld = dtn_assemble(g, DtnBasis::FourierModes, 64);
  const Disk2 dom{{0.0, 0.0}, 1.0};

  SUBCASE("empty cavity") {
    const Needle nd{{0.1, 0.2}, Direction2::from(1, 1)};
    const auto t = indicator_sequence(l0, dtn_empty(1.0, DtnBasis::FourierModes, 64), nd, build_schedule(dom, nd), 8);
    CHECK(t.values.size() == 8);
    for (auto v : t.values) CHECK(v == cplx(0.0));
    CHECK(t.verdict == Verdict::Bounded);
  }
  SUBCASE("needle avoiding the cavity") {
    for (const auto& [tip, ang] : {std::pair{Vec2(0.6, 0.0), 0.0}, std::pair{Vec2(0.0, 0.7), kPi / 2}}) {
      const Needle nd{tip, Direction2::from_angle(ang)};
      const auto t = indicator_sequence(l0, ld, nd, build_schedule(dom, nd), 12);
      REQUIRE(t.reliable == 12);
      CHECK(t.verdict == Verdict::Bounded);
      const double last = std::abs(t.values[11]), prev = std::abs(t.values[10]);
      CHECK(std::abs(last - prev) < 0.05 * last);
      CHECK(last == doctest::Approx(concentric_indicator(0.4, tip)).epsilon(0.05));
      for (auto v : t.values) CHECK(std::abs(v.imag()) < 1e-8 * std::abs(v));
    }
  }
  SUBCASE("tip inside or needle through the cavity") {
    for (const auto& [tip, ang] : {std::pair{Vec2(0.0, 0.0), 0.0}, std::pair{Vec2(-0.7, 0.0), 0.0}}) {
      const Needle nd{tip, Direction2::from_angle(ang)};
      const auto t = indicator_sequence(l0, ld, nd, build_schedule(dom, nd), 12);
      CHECK(t.verdict == Verdict::BlowUp);
      CHECK(t.reliable >= 5);
      for (int n = 1; n < t.reliable; ++n) CHECK(std::abs(t.values[n]) > std::abs(t.values[n - 1]));
      CHECK(std::abs(t.values[t.reliable - 1]) > 1e3 * std::abs(t.values[0]));
    }
  }
  SUBCASE("geometry overload and errors") {
    const Needle nd{{0.6, 0.0}, Direction2::from_angle(0.0)};
    const auto s = build_schedule(dom, nd);
    const auto t = indicator_sequence(g, nd, s, 6);
    const auto u = indicator_sequence(l0, ld, nd, s, 6);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(t.values[n] - u.values[n]) < 1e-9 * std::abs(u.values[n]));
    CHECK_THROWS_AS(indicator_sequence(l0, ld, nd, s, 40), ScheduleError);
    CHECK_THROWS_AS(indicator_sequence(l0, dtn_assemble(g), nd, s, 4), BasisMismatchError);
    CHECK_THROWS_AS(indicator_sequence(l0, ld, Needle{{1.2, 0.0}, nd.dir}, s, 4), DomainError);
  }
}

TEST_CASE("scan: more directions only add outside tips") {
  const auto g = disk_geometry(0.0, 0.0, 0.4);
  const auto l0 = dtn_empty(1.0, DtnBasis::FourierModes, 64);
  const auto ld = dtn_assemble(g, DtnBasis::FourierModes, 64);
  ScanGrid grid;
  grid.nx = grid.ny = 5;
  grid.x0 = grid.y0 = -0.8;
  grid.x1 = grid.y1 = 0.8;
  ScanOptions opt;
  opt.schedule.n_max = 12;
  const auto all = uniform_directions(8);
  const std::vector<Direction2> few{all[0], all[3]};
  const auto a = scan_reconstruct(l0, ld, 1.0, grid, few, opt);
  const auto b = scan_reconstruct(l0, ld, 1.0, grid, all, opt);
  int gained = 0;
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    CHECK((!a.cells[c].outside || b.cells[c].outside));
    gained += b.cells[c].outside && !a.cells[c].outside;
    if (b.cells[c].inside_domain) CHECK(b.traces[c].size() == 8);
  }
  CHECK(gained > 0);
  // centre tip: inside, every direction blows up
  CHECK_FALSE(b.at(2, 2).outside);
  CHECK(b.at(2, 2).verdict == Verdict::BlowUp);
  // corners are outside the domain
  CHECK_FALSE(b.at(0, 0).inside_domain);
  CHECK(b.at(2, 4).outside);

  const auto e = scan_reconstruct(l0, dtn_empty(1.0, DtnBasis::FourierModes, 64), 1.0, grid, few, opt);
  for (const auto& c : e.cells)
    if (c.inside_domain) CHECK(c.outside);
}

TEST_CASE("energy growth near the needle") {
  const Needle nd{{-0.2, 0.1}, Direction2::from(1, 0.5)};
  const auto s = build_schedule(Disk2{{0.0, 0.0}, 1.0}, nd);
  const ConeRegion cone{nd.tip, nd.dir.omega, 0.4, 0.5};
  const auto r = cone_energy_growth(s, nd, cone, 10);
  CHECK(r.energies.size() == 10);
  CHECK(r.increasing);
  CHECK(r.growth > 10.0);
  CHECK(r.passed);

  const BallRegion ball{nd.tip + 0.4 * nd.dir.omega, 0.1};
  const auto b = ball_energy_growth(s, nd, ball, 10);
  CHECK(b.passed);

  // fixed alpha, tau = 10^n
  const auto t = cone_energy_growth(0.8, {10.0, 100.0, 1000.0}, nd, ConeRegion{nd.tip, nd.dir.omega, 0.2, 0.05});
  CHECK(t.passed);

  // a set off the needle: energies settle to that of G
  const BallRegion away{nd.tip - 0.4 * nd.dir.omega, 0.1};
  const auto c = ball_energy_growth(s, nd, away, 10);
  CHECK_FALSE(c.passed);
  double eg = 0.0;
  const double h = 0.2 / 200;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const Vec2 p(away.centre.x() - 0.1 + (i + 0.5) * h, away.centre.y() - 0.1 + (j + 0.5) * h);
      if ((p - away.centre).norm() > 0.1) continue;
      eg += 2.0 / std::pow((p - nd.tip).squaredNorm(), 2) * h * h;
    }
  CHECK(c.energies.back() == doctest::Approx(eg).epsilon(1e-3));

  CHECK_THROWS_AS(cone_energy_growth(s, nd, cone, 40), ScheduleError);
  CHECK_THROWS_AS(cone_energy_growth(s, nd, ConeRegion{nd.tip, nd.dir.omega, 0.0, 0.5}, 5), DomainError);
}
