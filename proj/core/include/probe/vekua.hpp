#pragma once

#include <functional>
#include <utility>

#include "probe/carleman3d.hpp"
#include "probe/types.hpp"

namespace probe {

struct HelmholtzNeedleParams {
  double lambda = 1.0;
  double alpha = 1.0;
  double tau = 1.0;
  Frame3 frame;

  void validate() const;
};

// Gauss-Legendre ray quadrature in phi (w = sin(phi), t = cos^2(phi)), node
// count doubled until two successive rules agree.
struct VekuaOptions {
  int nodes = 16;
  double agreement = 1e-9;
  int max_nodes = 1024;
};

using ScalarField3 = std::function<double(const Vec3&)>;

// T_lambda v(y) = v(y) - lambda |y| int_0^{pi/2} v(cos^2(phi) y) J1(lambda |y| sin(phi)) cos^2(phi) dphi
double vekua_transform(const ScalarField3& v, double lambda, const Vec3& y, const VekuaOptions& opt = {});

// Transform of the Laplace needle with origin at the tip x.
double helmholtz_needle_eval(const Vec3& y, const Vec3& x, const HelmholtzNeedleParams& p,
                             const VekuaOptions& opt = {});
double helmholtz_needle_on_axis(double s, const HelmholtzNeedleParams& p);
Vec3 helmholtz_needle_grad_at_tip(const HelmholtzNeedleParams& p);

// (s int_0^1 (1-w^2)^{-1/2} J1(s w) dw, 1 - cos s)
std::pair<double, double> vekua_kernel_identity(double s);

// helmholtz_needle_eval + i sin(lambda r)/(4 pi r)
cplx tilde_needle_eval(const Vec3& y, const Vec3& x, const HelmholtzNeedleParams& p, const VekuaOptions& opt = {});

// cos(lambda r)/(4 pi r)
double helmholtz_green(const Vec3& y, double lambda);

}  // namespace probe
