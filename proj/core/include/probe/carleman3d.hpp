#pragma once

#include <vector>

#include "probe/types.hpp"

namespace probe {

struct Frame3 {
  Vec3 theta1{1.0, 0.0, 0.0};
  Vec3 theta2{0.0, 1.0, 0.0};
  Vec3 omega{0.0, 0.0, 1.0};

  // Requires orthonormal input to 1e-12; omega = theta1 x theta2.
  static Frame3 from(const Vec3& theta1, const Vec3& theta2);
  // Some frame with the given needle direction.
  static Frame3 from_omega(const Vec3& omega);
  // Rotates theta1, theta2 about omega by phi.
  Frame3 rotated(double phi) const;
};

// Entire function K in the Carleman integral: K == 1 or K(w) = E_alpha(tau w).
struct CarlemanKernel {
  bool unit = false;
  double alpha = 1.0;
  double tau = 1.0;

  static CarlemanKernel one() { return {true, 1.0, 1.0}; }
  static CarlemanKernel mittag_leffler(double alpha, double tau) { return {false, alpha, tau}; }
};

struct SemiInfiniteQuadrature {
  double split = 1.0;             // lower bound for the start of the tail
  double panel_tolerance = 1e-11;  // relative, per piece
  double axis_tolerance = 1e-14;   // axis closed form when its estimated relative error is below this (s > 0)
  int max_panels = 200000;
};

// (rho, s) = (|y.theta1|^2 + |y.theta2|^2, y.omega)
struct AxisCoords {
  double rho = 0.0;
  double s = 0.0;
  double r = 0.0;
};
AxisCoords axis_coords(const Vec3& y, const Frame3& frame);

// 2 pi^2 v by quadrature of Im((E_alpha(tau w) - 1)/w)/sqrt(rho + u^2) over u > 0.
double regular_part_integral(double rho, double s, double alpha, double tau,
                             const SemiInfiniteQuadrature& q = {});

double phi_k_eval(const Vec3& y, const CarlemanKernel& kernel, const Frame3& frame,
                  const SemiInfiniteQuadrature& q = {});

double needle3d_eval(const Vec3& y, const Vec3& x, double alpha, double tau, const Frame3& frame,
                     const SemiInfiniteQuadrature& q = {});
double needle3d_on_axis(double s, double alpha, double tau);
Vec3 needle3d_grad_on_axis(double s, double alpha, double tau, const Frame3& frame);

// Seven-point (Laplacian + k2) of f at y with step h.
template <class F>
double fd_helmholtz(F&& f, const Vec3& y, double h, double k2 = 0.0) {
  const double c = f(y);
  double acc = -6.0 * c;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    acc += f(y + e) + f(y - e);
  }
  return acc / (h * h) + k2 * c;
}

struct ResidualPoint {
  Vec3 y;
  double residual_h = 0.0;
  double residual_h2 = 0.0;
  double order = 0.0;
};

struct ResidualReport {
  double h = 0.0;
  std::vector<ResidualPoint> points;
  double rms_h = 0.0;
  double rms_h2 = 0.0;
  double observed_order = 0.0;  // log2(rms_h / rms_h2)
  bool passed = false;          // observed_order >= 1.8
};

// Laplacian residual of needle3d_eval (tip at the origin) at steps h and h/2.
ResidualReport verify_harmonic(double alpha, double tau, const Frame3& frame, const std::vector<Vec3>& points,
                               double h = 0.02);

struct SphereSup {
  double radius = 0.0;
  double sup = 0.0;           // max |Phi_K(y) - 1/(4 pi |y|)| on the sphere
  double axis_value = 0.0;    // same difference at y = radius * omega
};

struct BoundednessReport {
  std::vector<SphereSup> spheres;
  double tip_value = 0.0;     // tau / (4 pi Gamma(1 + alpha))
  double spread = 0.0;        // max sup / min sup
  bool bounded = false;       // spread <= 2
};

BoundednessReport verify_singularity_extraction(const CarlemanKernel& kernel, const std::vector<double>& radii,
                                                const Frame3& frame = {}, int samples = 26);

}  // namespace probe
