#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace probe {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline cplx to_complex(const Vec2& p) { return {p.x(), p.y()}; }

}  // namespace probe
