#pragma once

#include <utility>
#include <vector>

#include "probe/types.hpp"

namespace probe {

struct Direction2 {
  Vec2 omega{1.0, 0.0};
  Vec2 omega_perp{0.0, 1.0};

  // Normalizes (dx, dy); throws DomainError for the zero vector.
  static Direction2 from(double dx, double dy);
  static Direction2 from_angle(double theta);
  // omega_1 - i omega_2
  cplx conj_omega() const { return {omega.x(), -omega.y()}; }
};

// Straight needle x + t omega, t >= 0.
struct Needle {
  Vec2 tip{0.0, 0.0};
  Direction2 dir;
};

struct Box2 {
  double x0, x1, y0, y1;
  bool contains(const Vec2& p) const { return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1; }
  double diameter() const;
};

// Finite union of closed axis-aligned boxes.
struct Region2 {
  std::vector<Box2> boxes;
  bool empty() const { return boxes.empty(); }
  bool contains(const Vec2& p) const;
  Region2 translated(const Vec2& shift) const;
  // Grid points at spacing diameter/64 of each box.
  std::vector<Vec2> samples() const;
};

struct Disk2 {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
};

struct NeedleSchedule {
  std::vector<double> alphas;
  std::vector<double> taus;
  std::vector<double> epsilons;
  std::vector<Region2> exhaustion;
  std::vector<double> deviations;  // measured on each exhaustion set

  std::size_t size() const { return taus.size(); }
  NeedleSchedule translated(const Vec2& shift) const;
};

struct ScheduleOptions {
  double eps0 = 1e-2;
  int n_max = 12;
  double alpha_cap = 1.0;
  double tau_start = 1.0;
  double tau_max = 1e12;
  // Default exhaustion: {y : (y - x).omega <= -delta_n} within one domain
  // diameter of the tip, delta_n = delta1 * delta_ratio^(n-1) >= delta_min.
  double delta1 = 1.8;
  double delta_ratio = 0.88;
  double delta_min = 0.05;
  int raster = 64;
};

// 1/(y1 + i y2) and its gradient.
cplx green2d(const Vec2& y);
std::pair<cplx, cplx> green2d_grad(const Vec2& y);

cplx needle2d_eval(const Vec2& y, const Vec2& x, double alpha, double tau, const Direction2& dir);
std::pair<cplx, cplx> needle2d_grad(const Vec2& y, const Vec2& x, double alpha, double tau,
                                    const Direction2& dir);

// Largest deviation of value and gradient from G(. - x) over the samples.
double needle2d_deviation(const std::vector<Vec2>& samples, const Needle& needle, double alpha, double tau);

// Smallest angle between omega and y - x over the samples, in [0, pi].
double min_cone_angle(const std::vector<Vec2>& samples, const Needle& needle);

// Explicit exhaustion: one entry per n.
NeedleSchedule build_schedule(const std::vector<Region2>& exhaustion, const Needle& needle,
                              const ScheduleOptions& opt = {});
// Default half-plane exhaustion of a disk domain.
NeedleSchedule build_schedule(const Disk2& domain, const Needle& needle, const ScheduleOptions& opt = {});
// Raster of {y : (y - x).omega <= -delta} inside the square of half-width
// extent around the tip; depends on the tip only through translation.
Region2 behind_tip_region(const Needle& needle, double delta, double extent, int raster);

}  // namespace probe
