#include "probe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "probe/errors.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;

int trace_modes(const DtnOperator& op) {
  return op.basis == DtnBasis::FourierModes ? op.size_param : (op.size_param - 1) / 2;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded:
      return "bounded";
    case Verdict::BlowUp:
      return "blowup";
    default:
      return "inconclusive";
  }
}

Verdict classify(const std::vector<cplx>& values, const VerdictParams& p) {
  const int k = p.window;
  if (k < 1 || static_cast<int>(values.size()) < k + 1) return Verdict::Inconclusive;
  const int n = static_cast<int>(values.size()) - 1;
  const double last = std::abs(values[n]);
  if (!std::isfinite(last)) return Verdict::BlowUp;
  double lo = last, hi = last;
  for (int i = n - k + 1; i <= n; ++i) {
    lo = std::min(lo, std::abs(values[i]));
    hi = std::max(hi, std::abs(values[i]));
  }
  const bool stable = hi == 0.0 || (hi - lo) < 0.05 * hi;
  const double first = std::abs(values[n - k]);
  double growth;
  if (first > 0.0)
    growth = std::pow(last / first, 1.0 / k);
  else
    growth = last > 0.0 ? HUGE_VAL : 0.0;
  if (growth >= p.ratio || (last > p.theta && !stable)) return Verdict::BlowUp;
  if (stable && last < p.theta / 10.0) return Verdict::Bounded;
  return Verdict::Inconclusive;
}

FourierTrace needle_trace(const Needle& needle, double alpha, double tau, double radius, int nmax, int samples) {
  return FourierTrace::from_function(
      [&](double th) {
        const Vec2 y(radius * std::cos(th), radius * std::sin(th));
        return needle2d_eval(y, needle.tip, alpha, tau, needle.dir);
      },
      nmax, samples);
}

IndicatorTrace indicator_sequence(const DtnOperator& lambda0, const DtnOperator& lambdaD, const Needle& needle,
                                  const NeedleSchedule& schedule, int n_max, const VerdictParams& p) {
  if (n_max < 1) throw DomainError("n_max must be positive");
  if (static_cast<std::size_t>(n_max) > schedule.size()) throw ScheduleError("schedule shorter than n_max");
  if ((needle.tip).norm() >= lambda0.radius) throw DomainError("needle tip must lie inside the domain");
  if (lambda0.basis != lambdaD.basis || lambda0.size_param != lambdaD.size_param)
    throw BasisMismatchError("DtN operators do not share a basis");
  IndicatorTrace t;
  t.schedule = schedule;
  t.params = p;
  const bool fourier = lambda0.basis == DtnBasis::FourierModes;
  const int nmax = trace_modes(lambda0);
  const int samples = std::max(512, 4 * nmax + 1);
  const Eigen::MatrixXcd diff = lambda0.correction - lambdaD.correction;
  const double R = lambda0.radius;
  constexpr double eps = 1.1e-16;
  for (int n = 0; n < n_max; ++n) {
    cplx v;
    double err;
    try {
      std::vector<cplx> vals(samples);
      double ms = 0.0;
      for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * kPi * i / samples;
        vals[i] = needle2d_eval(Vec2(R * std::cos(th), R * std::sin(th)), needle.tip, schedule.alphas[n],
                                schedule.taus[n], needle.dir);
        ms += std::norm(vals[i]);
      }
      const FourierTrace f = FourierTrace::from_samples(vals, nmax);
      v = energy_gap(lambda0, lambdaD, f);
      // rounding noise of relative size eps in the samples, propagated to
      // first order through the pairing; 4x margin over what was observed
      Eigen::VectorXcd fb(diff.cols());
      if (fourier) {
        for (int k = -nmax; k <= nmax; ++k) fb[k + nmax] = std::conj(f[-k]);
      } else {
        for (int i = 0; i < fb.size(); ++i) fb[i] = std::conj(f.eval(2.0 * kPi * i / fb.size()));
      }
      const double w = fourier ? 2.0 * kPi * R : 2.0 * kPi * R / fb.size();
      err = 4.0 * w * eps * std::sqrt(ms / samples) * ((diff * fb).norm() + (diff.transpose() * fb).norm());
      if (!std::isfinite(std::abs(v))) err = HUGE_VAL;
    } catch (const OverflowError&) {
      v = HUGE_VAL;
      err = HUGE_VAL;
    }
    t.values.push_back(v);
    t.error_estimates.push_back(err);
    if (!(err <= p.reliability * std::abs(v))) break;
    t.reliable = n + 1;
  }
  t.verdict = classify({t.values.begin(), t.values.begin() + t.reliable}, p);
  return t;
}

IndicatorTrace indicator_sequence(const Geometry2& geom, const Needle& needle, const NeedleSchedule& schedule,
                                  int n_max, const VerdictParams& p) {
  const DtnOperator l0 = dtn_empty(geom.outer_radius, DtnBasis::FourierModes, 64);
  const DtnOperator ld = dtn_assemble(geom, DtnBasis::FourierModes, 64);
  return indicator_sequence(l0, ld, needle, schedule, n_max, p);
}

double indicator_function_direct(const CavitySolver& solver, const Geometry2& geom, const Vec2& x) {
  if (!(x.norm() < geom.outer_radius) || geom.in_cavity(x))
    throw DomainError("indicator function is defined outside the cavities only");
  if (solver.empty()) return 0.0;
  const int m = solver.size();
  Eigen::VectorXcd gv(m), dg(m);
  for (int i = 0; i < m; ++i) {
    const cplx z = to_complex(solver.nodes()[i] - x);
    const Vec2& nu = solver.normals()[i];
    gv[i] = 1.0 / z;
    dg[i] = -cplx(nu.x(), nu.y()) / (z * z);
  }
  const Eigen::VectorXcd sigma = solver.solve(Eigen::VectorXcd(-dg));
  const Eigen::VectorXcd w = solver.boundary_values(sigma);
  cplx s = 0.0;
  for (int i = 0; i < m; ++i) s += std::conj(gv[i] + w[i]) * dg[i] * solver.weights()[i];
  return s.real();
}

double indicator_function_direct(const Geometry2& geom, const Vec2& x) {
  if (!(x.norm() < geom.outer_radius) || geom.in_cavity(x))
    throw DomainError("indicator function is defined outside the cavities only");
  if (geom.cavities.empty()) return 0.0;
  const CavitySolver solver(geom);
  return indicator_function_direct(solver, geom, x);
}

double concentric_indicator(double rho, const Vec2& x) {
  const double r = x.norm();
  if (!(r > rho)) throw DomainError("point must lie outside the cavity");
  double s = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double p = std::pow(rho, 2.0 * k);
    const double t = 2.0 * k * p / ((1.0 + p) * std::pow(r, 2.0 * k + 2.0));
    s += t;
    if (t < 1e-17 * s) break;
  }
  return 2.0 * kPi * s;
}

Vec2 ScanGrid::node(int ix, int iy) const {
  const double x = nx > 1 ? x0 + (x1 - x0) * ix / (nx - 1) : 0.5 * (x0 + x1);
  const double y = ny > 1 ? y0 + (y1 - y0) * iy / (ny - 1) : 0.5 * (y0 + y1);
  return {x, y};
}

std::vector<Direction2> uniform_directions(int count) {
  if (count < 1) throw DomainError("need at least one direction");
  std::vector<Direction2> d;
  for (int i = 0; i < count; ++i) d.push_back(Direction2::from_angle(2.0 * kPi * i / count));
  return d;
}

ScanResult scan_reconstruct(const DtnOperator& lambda0, const DtnOperator& lambdaD, double outer_radius,
                            const ScanGrid& grid, const std::vector<Direction2>& directions,
                            const ScanOptions& opt) {
  if (grid.nx < 1 || grid.ny < 1) throw DomainError("empty scan grid");
  if (directions.empty()) throw DomainError("need at least one direction");
  ScanResult res;
  res.grid = grid;
  res.directions = directions;
  std::vector<NeedleSchedule> base;
  for (const auto& d : directions) base.push_back(build_schedule(Disk2{{0.0, 0.0}, outer_radius}, Needle{{0.0, 0.0}, d}, opt.schedule));
  const int n_max = opt.schedule.n_max;

  const int cells = grid.nx * grid.ny;
  res.cells.resize(cells);
  res.traces.resize(cells);
  auto work = [&](int c) {
    ScanCell& cell = res.cells[c];
    cell.ix = c % grid.nx;
    cell.iy = c / grid.nx;
    cell.tip = grid.node(cell.ix, cell.iy);
    cell.inside_domain = cell.tip.norm() < outer_radius;
    if (!cell.inside_domain) return;
    double best = HUGE_VAL;
    for (std::size_t k = 0; k < directions.size(); ++k) {
      const Needle nd{cell.tip, directions[k]};
      IndicatorTrace t = indicator_sequence(lambda0, lambdaD, nd, base[k].translated(cell.tip), n_max, opt.verdict);
      const double last = std::abs(t.values[t.reliable > 0 ? t.reliable - 1 : t.values.size() - 1]);
      if (t.verdict == Verdict::Bounded && (!cell.outside || last < best)) {
        cell.outside = true;
        best = last;
        cell.best_direction = static_cast<int>(k);
      } else if (!cell.outside && last < best) {
        best = last;
        cell.best_direction = static_cast<int>(k);
      }
      t.schedule = NeedleSchedule{};  // the base schedule is shared
      res.traces[c].push_back(std::move(t));
    }
    cell.last_abs = best;
    if (cell.outside)
      cell.verdict = Verdict::Bounded;
    else
      cell.verdict = std::all_of(res.traces[c].begin(), res.traces[c].end(),
                                 [](const IndicatorTrace& t) { return t.verdict == Verdict::BlowUp; })
                         ? Verdict::BlowUp
                         : Verdict::Inconclusive;
  };
  const int nt = std::max(1, opt.threads);
  res.schedules = base;
  if (nt == 1) {
    for (int c = 0; c < cells; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (int c = t; c < cells; c += nt) work(c);
      });
    for (auto& th : pool) th.join();
  }
  return res;
}

namespace {

template <class Inside>
GrowthReport energy_growth(const std::vector<double>& alphas, const std::vector<double>& taus, const Needle& needle,
                           Box2 box, Inside inside, double outer_radius, int raster) {
  GrowthReport r;
  const double hx = (box.x1 - box.x0) / raster, hy = (box.y1 - box.y0) / raster;
  std::vector<Vec2> pts;
  for (int j = 0; j < raster; ++j)
    for (int i = 0; i < raster; ++i) {
      const Vec2 p(box.x0 + (i + 0.5) * hx, box.y0 + (j + 0.5) * hy);
      if (p.norm() < outer_radius && inside(p)) pts.push_back(p);
    }
  for (std::size_t n = 0; n < taus.size(); ++n) {
    double e = 0.0;
    for (const auto& p : pts) {
      const auto [gx, gy] = needle2d_grad(p, needle.tip, alphas[n], taus[n], needle.dir);
      e += std::norm(gx) + std::norm(gy);
    }
    r.energies.push_back(e * hx * hy);
  }
  r.increasing = r.energies.size() >= 2;
  for (std::size_t n = 1; n < r.energies.size(); ++n)
    if (!(r.energies[n] > r.energies[n - 1])) r.increasing = false;
  if (!r.energies.empty() && r.energies.front() > 0.0) r.growth = r.energies.back() / r.energies.front();
  r.passed = r.increasing && r.growth > 10.0;
  return r;
}

void check_ladder(const NeedleSchedule& s, int n_max) {
  if (n_max < 2) throw DomainError("need at least two terms");
  if (static_cast<std::size_t>(n_max) > s.size()) throw ScheduleError("schedule shorter than n_max");
}

GrowthReport cone_impl(const std::vector<double>& alphas, const std::vector<double>& taus, const Needle& needle,
                       const ConeRegion& cone, double outer_radius, int raster) {
  if (!(cone.half_aperture > 0.0 && cone.half_aperture < kPi) || !(cone.length > 0.0))
    throw DomainError("invalid cone");
  const Vec2 ax = cone.axis.normalized();
  const double L = cone.length;
  const Box2 box{cone.vertex.x() - L, cone.vertex.x() + L, cone.vertex.y() - L, cone.vertex.y() + L};
  const double ca = std::cos(cone.half_aperture);
  auto inside = [&](const Vec2& p) {
    const Vec2 d = p - cone.vertex;
    const double n = d.norm();
    return n > 0.0 && n <= L && d.dot(ax) >= ca * n;
  };
  return energy_growth(alphas, taus, needle, box, inside, outer_radius, raster);
}

}  // namespace

GrowthReport cone_energy_growth(const NeedleSchedule& schedule, const Needle& needle, const ConeRegion& cone,
                                int n_max, double outer_radius, int raster) {
  check_ladder(schedule, n_max);
  return cone_impl({schedule.alphas.begin(), schedule.alphas.begin() + n_max},
                   {schedule.taus.begin(), schedule.taus.begin() + n_max}, needle, cone, outer_radius, raster);
}

GrowthReport cone_energy_growth(double alpha, const std::vector<double>& taus, const Needle& needle,
                                const ConeRegion& cone, double outer_radius, int raster) {
  if (taus.size() < 2) throw DomainError("need at least two terms");
  return cone_impl(std::vector<double>(taus.size(), alpha), taus, needle, cone, outer_radius, raster);
}

GrowthReport ball_energy_growth(const NeedleSchedule& schedule, const Needle& needle, const BallRegion& ball,
                                int n_max, double outer_radius, int raster) {
  check_ladder(schedule, n_max);
  if (!(ball.radius > 0.0)) throw DomainError("ball radius must be positive");
  const Box2 box{ball.centre.x() - ball.radius, ball.centre.x() + ball.radius, ball.centre.y() - ball.radius,
                 ball.centre.y() + ball.radius};
  auto inside = [&](const Vec2& p) { return (p - ball.centre).norm() <= ball.radius && p != needle.tip; };
  return energy_growth({schedule.alphas.begin(), schedule.alphas.begin() + n_max},
                       {schedule.taus.begin(), schedule.taus.begin() + n_max}, needle, box, inside, outer_radius,
                       raster);
}

}  // namespace probe
