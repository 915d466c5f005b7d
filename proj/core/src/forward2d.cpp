#include "probe/forward2d.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <queue>
#include <sstream>

#include "probe/errors.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vec2 left_normal(const Vec2& d) { return {-d.y(), d.x()}; }

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool polygon_self_intersects(const std::vector<Vec2>& p) {
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return true;
    }
  return false;
}

bool polygons_intersect(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (segments_intersect(a[i], a[(i + 1) % n], b[j], b[(j + 1) % m])) return true;
  return false;
}

bool winding_contains(const std::vector<Vec2>& poly, const Vec2& p) {
  bool in = false;
  const int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

// ---- curves

Curve2 Curve2::disk(double cx, double cy, double r) {
  if (!(r > 0.0)) throw GeometryError("disk radius must be positive");
  Curve2 c;
  c.kind_ = Kind::Disk;
  c.p_ = {cx, cy, r};
  return c;
}

Curve2 Curve2::ellipse(double cx, double cy, double a, double b, double angle) {
  if (!(a > 0.0 && b > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
  Curve2 c;
  c.kind_ = Kind::Ellipse;
  c.p_ = {cx, cy, a, b, angle};
  return c;
}

Curve2 Curve2::rounded_polygon(std::vector<Vec2> vertices, double corner_radius) {
  if (vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  if (!(corner_radius > 0.0)) throw GeometryError("corner radius must be positive");
  double area = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) area += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
  if (area == 0.0) throw GeometryError("degenerate polygon");
  if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
  Curve2 c;
  c.kind_ = Kind::RoundedPolygon;
  c.verts_ = std::move(vertices);
  c.corner_ = corner_radius;
  c.build_pieces();
  return c;
}

void Curve2::build_pieces() {
  const int m = static_cast<int>(verts_.size());
  std::vector<double> ell(m), beta(m);
  std::vector<Vec2> din(m), dout(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 a = verts_[(i + m - 1) % m], v = verts_[i], b = verts_[(i + 1) % m];
    if ((v - a).norm() == 0.0 || (b - v).norm() == 0.0) throw GeometryError("repeated polygon vertex");
    din[i] = (v - a).normalized();
    dout[i] = (b - v).normalized();
    beta[i] = std::atan2(cross(din[i], dout[i]), din[i].dot(dout[i]));
    ell[i] = corner_ * std::tan(0.5 * std::abs(beta[i]));
  }
  pieces_.clear();
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    if (std::abs(beta[i]) > 1e-14) {
      Piece arc;
      arc.arc = true;
      const Vec2 p = verts_[i] - ell[i] * din[i];
      const double sg = beta[i] > 0.0 ? 1.0 : -1.0;
      arc.a = p + sg * corner_ * left_normal(din[i]);
      arc.r = corner_;
      arc.phi0 = std::atan2(p.y() - arc.a.y(), p.x() - arc.a.x());
      arc.sweep = beta[i];
      arc.s0 = s;
      arc.len = corner_ * std::abs(beta[i]);
      s += arc.len;
      pieces_.push_back(arc);
    }
    const Vec2 v = verts_[i], w = verts_[(i + 1) % m];
    const double len = (w - v).norm() - ell[i] - ell[(i + 1) % m];
    if (!(len > 0.0)) throw GeometryError("corner radius too large for the polygon edges");
    Piece seg;
    seg.arc = false;
    seg.a = v + ell[i] * dout[i];
    seg.dir = dout[i];
    seg.s0 = s;
    seg.len = len;
    s += len;
    pieces_.push_back(seg);
  }
  total_ = s;
  // arcs get three times their share of parameter
  double wsum = 0.0;
  for (const auto& p : pieces_) wsum += p.arc ? 3.0 * p.len : p.len;
  double t = 0.0;
  for (auto& p : pieces_) {
    p.t0 = t;
    p.dt = 2.0 * kPi * (p.arc ? 3.0 * p.len : p.len) / wsum;
    t += p.dt;
  }
}

void Curve2::eval_polygon(double t, Vec2& x, Vec2& d1, Vec2& d2) const {
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double v, const Piece& p) { return v < p.t0; });
  const Piece& p = *(it == pieces_.begin() ? it : std::prev(it));
  // s = len g(v), g(v) = v^3 / (v^3 + (1-v)^3)
  const double v = std::clamp((t - p.t0) / p.dt, 0.0, 1.0), w = 1.0 - v;
  const double a = v * v * v, b = w * w * w, D = a + b;
  const double a1 = 3 * v * v, b1 = -3 * w * w, a2 = 6 * v, b2 = 6 * w;
  const double N = a1 * b - a * b1, N1 = a2 * b - a * b2, D1 = a1 + b1;
  const double g = a / D, g1 = N / (D * D), g2 = (N1 * D - 2.0 * N * D1) / (D * D * D);
  const double ds = p.len * g, sp = p.len * g1 / p.dt, acc = p.len * g2 / (p.dt * p.dt);
  Vec2 tan, curv;
  if (!p.arc) {
    x = p.a + ds * p.dir;
    tan = p.dir;
    curv = Vec2::Zero();
  } else {
    const double sg = p.sweep > 0.0 ? 1.0 : -1.0;
    const double phi = p.phi0 + sg * ds / p.r;
    const Vec2 e(std::cos(phi), std::sin(phi));
    x = p.a + p.r * e;
    tan = sg * Vec2(-e.y(), e.x());
    curv = -e / p.r;
  }
  d1 = sp * tan;
  d2 = sp * sp * curv + acc * tan;
}

Vec2 Curve2::point(double t) const {
  switch (kind_) {
    case Kind::Disk:
      return {p_[0] + p_[2] * std::cos(t), p_[1] + p_[2] * std::sin(t)};
    case Kind::Ellipse: {
      const double c = std::cos(p_[4]), s = std::sin(p_[4]);
      const double u = p_[2] * std::cos(t), v = p_[3] * std::sin(t);
      return {p_[0] + c * u - s * v, p_[1] + s * u + c * v};
    }
    default: {
      Vec2 x, a, b;
      eval_polygon(t, x, a, b);
      return x;
    }
  }
}

Vec2 Curve2::d1(double t) const {
  switch (kind_) {
    case Kind::Disk:
      return {-p_[2] * std::sin(t), p_[2] * std::cos(t)};
    case Kind::Ellipse: {
      const double c = std::cos(p_[4]), s = std::sin(p_[4]);
      const double u = -p_[2] * std::sin(t), v = p_[3] * std::cos(t);
      return {c * u - s * v, s * u + c * v};
    }
    default: {
      Vec2 x, a, b;
      eval_polygon(t, x, a, b);
      return a;
    }
  }
}

Vec2 Curve2::d2(double t) const {
  switch (kind_) {
    case Kind::Disk:
      return {-p_[2] * std::cos(t), -p_[2] * std::sin(t)};
    case Kind::Ellipse: {
      const double c = std::cos(p_[4]), s = std::sin(p_[4]);
      const double u = -p_[2] * std::cos(t), v = -p_[3] * std::sin(t);
      return {c * u - s * v, s * u + c * v};
    }
    default: {
      Vec2 x, a, b;
      eval_polygon(t, x, a, b);
      return b;
    }
  }
}

std::vector<Vec2> Curve2::polygon(int n) const {
  std::vector<Vec2> out(n);
  for (int i = 0; i < n; ++i) out[i] = point(2.0 * kPi * i / n);
  return out;
}

bool Curve2::contains(const Vec2& p) const {
  if (kind_ == Kind::Disk) return (p - Vec2(p_[0], p_[1])).norm() < p_[2];
  if (kind_ == Kind::Ellipse) {
    const double c = std::cos(p_[4]), s = std::sin(p_[4]);
    const Vec2 d = p - Vec2(p_[0], p_[1]);
    const double u = c * d.x() + s * d.y(), v = -s * d.x() + c * d.y();
    return (u / p_[2]) * (u / p_[2]) + (v / p_[3]) * (v / p_[3]) < 1.0;
  }
  return winding_contains(polygon(512), p);
}

double Curve2::length() const {
  if (kind_ == Kind::Disk) return 2.0 * kPi * p_[2];
  if (kind_ == Kind::RoundedPolygon) return total_;
  double s = 0.0;
  const int n = 512;
  for (int i = 0; i < n; ++i) s += d1(2.0 * kPi * i / n).norm();
  return s * 2.0 * kPi / n;
}

std::string Curve2::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Disk:
      os << "disk " << fmt(p_[0]) << ' ' << fmt(p_[1]) << ' ' << fmt(p_[2]);
      break;
    case Kind::Ellipse:
      os << "ellipse " << fmt(p_[0]) << ' ' << fmt(p_[1]) << ' ' << fmt(p_[2]) << ' ' << fmt(p_[3]) << ' '
         << fmt(p_[4]);
      break;
    default:
      os << "rounded_polygon " << fmt(corner_);
      for (const auto& v : verts_) os << ' ' << fmt(v.x()) << ' ' << fmt(v.y());
  }
  return os.str();
}

Curve2 Curve2::parse(const std::string& text) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw GeometryError("not a number in curve description: " + tok);
    }
  }
  if (kind == "disk") {
    if (v.size() != 3) throw GeometryError("disk expects: cx cy r");
    return disk(v[0], v[1], v[2]);
  }
  if (kind == "ellipse") {
    if (v.size() != 4 && v.size() != 5) throw GeometryError("ellipse expects: cx cy a b [angle]");
    return ellipse(v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 0.0);
  }
  if (kind == "rounded_polygon") {
    if (v.size() < 7 || v.size() % 2 == 0) throw GeometryError("rounded_polygon expects: r x1 y1 x2 y2 x3 y3 ...");
    std::vector<Vec2> pts;
    for (std::size_t i = 1; i + 1 < v.size(); i += 2) pts.emplace_back(v[i], v[i + 1]);
    return rounded_polygon(pts, v[0]);
  }
  throw GeometryError("unknown curve kind: " + kind);
}

bool Curve2::operator==(const Curve2& o) const {
  return kind_ == o.kind_ && p_ == o.p_ && verts_ == o.verts_ && corner_ == o.corner_;
}

// ---- geometry

void Geometry2::validate() const {
  if (!(outer_radius > 0.0)) throw GeometryError("outer radius must be positive");
  if (nodes_per_curve < 16 || nodes_per_curve % 2 != 0)
    throw GeometryError("nodes_per_curve must be even and at least 16");
  std::vector<std::vector<Vec2>> polys;
  for (std::size_t i = 0; i < cavities.size(); ++i) {
    auto p = cavities[i].polygon(256);
    if (polygon_self_intersects(p)) throw GeometryError("cavity " + std::to_string(i) + " self-intersects");
    for (const auto& q : p)
      if (!(q.norm() < outer_radius)) throw GeometryError("cavity " + std::to_string(i) + " leaves the domain");
    polys.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t j = i + 1; j < polys.size(); ++j) {
      if (polygons_intersect(polys[i], polys[j]) || cavities[i].contains(polys[j][0]) ||
          cavities[j].contains(polys[i][0]))
        throw GeometryError("cavities " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
  if (cavities.empty()) return;
  // flood fill of the free cells from the outer rim
  const int n = 128;
  const double h = 2.0 * outer_radius / n;
  std::vector<char> free(n * n, 0), seen(n * n, 0);
  auto centre = [&](int i, int j) { return Vec2(-outer_radius + (i + 0.5) * h, -outer_radius + (j + 0.5) * h); };
  int start = -1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 c = centre(i, j);
      free[j * n + i] = c.norm() < outer_radius && !in_cavity(c);
      if (free[j * n + i] && (start < 0 || c.x() > centre(start % n, start / n).x())) start = j * n + i;
    }
  if (start < 0) return;  // thinner than a raster cell; the solver rejects it
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  while (!q.empty()) {
    const int k = q.front();
    q.pop();
    const int i = k % n, j = k / n;
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& c : nb) {
      if (c[0] < 0 || c[0] >= n || c[1] < 0 || c[1] >= n) continue;
      const int kk = c[1] * n + c[0];
      if (free[kk] && !seen[kk]) {
        seen[kk] = 1;
        q.push(kk);
      }
    }
  }
  for (int k = 0; k < n * n; ++k)
    if (free[k] && !seen[k]) throw GeometryError("domain minus cavities is not connected");
}

bool Geometry2::in_cavity(const Vec2& p) const {
  for (const auto& c : cavities)
    if (c.contains(p)) return true;
  return false;
}

bool Geometry2::in_domain(const Vec2& p) const { return p.norm() < outer_radius && !in_cavity(p); }

// ---- traces

cplx FourierTrace::eval(double theta) const {
  cplx s = 0.0;
  for (int n = -nmax; n <= nmax; ++n) s += (*this)[n] * std::polar(1.0, n * theta);
  return s;
}

FourierTrace FourierTrace::mode(int n, int nmax) {
  if (std::abs(n) > nmax) throw DomainError("mode outside the trace basis");
  FourierTrace f(nmax);
  f[n] = 1.0;
  return f;
}

FourierTrace FourierTrace::from_samples(const std::vector<cplx>& values, int nmax) {
  const int k = static_cast<int>(values.size());
  if (k <= 2 * nmax) throw DomainError("too few samples for the requested modes");
  FourierTrace f(nmax);
  for (int n = -nmax; n <= nmax; ++n) {
    cplx s = 0.0;
    for (int i = 0; i < k; ++i) s += values[i] * std::polar(1.0, -2.0 * kPi * n * i / k);
    f[n] = s / static_cast<double>(k);
  }
  return f;
}

FourierTrace FourierTrace::from_function(const std::function<cplx(double)>& f, int nmax, int samples) {
  std::vector<cplx> v(samples);
  for (int i = 0; i < samples; ++i) v[i] = f(2.0 * kPi * i / samples);
  return from_samples(v, nmax);
}

cplx poisson_extension(const FourierTrace& f, double radius, const Vec2& x) {
  const cplx z = cplx(x.x(), x.y()) / radius;
  const cplx zb = std::conj(z);
  cplx s = f[0], p = 1.0, pb = 1.0;
  for (int n = 1; n <= f.nmax; ++n) {
    p *= z;
    pb *= zb;
    s += f[n] * p + f[-n] * pb;
  }
  return s;
}

std::pair<cplx, cplx> poisson_extension_grad(const FourierTrace& f, double radius, const Vec2& x) {
  const cplx z = cplx(x.x(), x.y()) / radius;
  const cplx zb = std::conj(z);
  cplx hol = 0.0, anti = 0.0, p = 1.0, pb = 1.0;  // z^{n-1}, conj(z)^{n-1}
  for (int n = 1; n <= f.nmax; ++n) {
    hol += f[n] * static_cast<double>(n) * p;
    anti += f[-n] * static_cast<double>(n) * pb;
    p *= z;
    pb *= zb;
  }
  hol /= radius;
  anti /= radius;
  const cplx i(0.0, 1.0);
  return {hol + anti, i * hol - i * anti};
}

// ---- cavity system

CavitySolver::CavitySolver(const Geometry2& geom) : R_(geom.outer_radius) {
  geom.validate();
  const int n = geom.nodes_per_curve;
  for (std::size_t c = 0; c < geom.cavities.size(); ++c) {
    start_.push_back(static_cast<int>(x_.size()));
    count_.push_back(n);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * (i + 0.5) / n;
      const Vec2 p = geom.cavities[c].point(t), d = geom.cavities[c].d1(t), dd = geom.cavities[c].d2(t);
      const double sp = d.norm();
      x_.push_back(p);
      nu_.emplace_back(d.y() / sp, -d.x() / sp);
      speed_.push_back(sp);
      kappa_.push_back(cross(d, dd) / (sp * sp * sp));
      w_.push_back(sp * 2.0 * kPi / n);
      curve_of_.push_back(static_cast<int>(c));
    }
  }
  const int m = size();
  if (m == 0) return;

  // resolution check: curves closer than the local node spacing
  double hmax = 0.0;
  for (double w : w_) hmax = std::max(hmax, w);
  for (int i = 0; i < m; ++i) {
    if (R_ - x_[i].norm() < hmax) throw SolverError("cavity nearly touches the outer boundary");
    for (int j = i + 1; j < m; ++j)
      if (curve_of_[i] != curve_of_[j] && (x_[i] - x_[j]).norm() < hmax)
        throw SolverError("cavities nearly touch");
  }

  A_.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double k;
      if (i == j) {
        k = -kappa_[i] / (4.0 * kPi);
      } else {
        const Vec2 d = x_[i] - x_[j];
        k = -nu_[i].dot(d) / (2.0 * kPi * d.squaredNorm());
      }
      const double ry = x_[j].norm();
      if (ry > 0.0) {
        const Vec2 q = ry * x_[i] - (R_ * R_ / ry) * x_[j];
        k += ry * nu_[i].dot(q) / (2.0 * kPi * q.squaredNorm());
      }
      A_(i, j) = k * w_[j] - (i == j ? 0.5 : 0.0);
    }
  lu_.compute(A_);
  if (lu_.rcond() < 1e-13) throw SolverError("cavity system is numerically singular");
}

Eigen::MatrixXcd CavitySolver::solve(const Eigen::MatrixXcd& g) const {
  if (g.rows() != size()) throw DomainError("right-hand side size mismatch");
  const Eigen::MatrixXd re = lu_.solve(g.real()), im = lu_.solve(g.imag());
  Eigen::MatrixXcd s(g.rows(), g.cols());
  s.real() = re;
  s.imag() = im;
  const double gn = g.norm();
  residual_ = gn > 0.0 ? ((A_ * re - g.real()).norm() + (A_ * im - g.imag()).norm()) / gn : 0.0;
  if (residual_ > 1e-10) throw SolverError("cavity solve residual above tolerance");
  return s;
}

Eigen::VectorXcd CavitySolver::solve(const Eigen::VectorXcd& g) const {
  return solve(Eigen::MatrixXcd(g)).col(0);
}

cplx CavitySolver::field(const Eigen::VectorXcd& sigma, const Vec2& x) const {
  cplx s = 0.0;
  for (int j = 0; j < size(); ++j) {
    const double ry = x_[j].norm();
    const double qn = ry > 0.0 ? (ry * x - (R_ * R_ / ry) * x_[j]).norm() : R_ * R_;
    const double g = -(std::log((x - x_[j]).norm()) - std::log(qn / R_)) / (2.0 * kPi);
    s += g * sigma[j] * w_[j];
  }
  return s;
}

std::pair<cplx, cplx> CavitySolver::grad(const Eigen::VectorXcd& sigma, const Vec2& x) const {
  cplx gx = 0.0, gy = 0.0;
  for (int j = 0; j < size(); ++j) {
    const Vec2 d = x - x_[j];
    Vec2 g = d / d.squaredNorm();
    const double ry = x_[j].norm();
    if (ry > 0.0) {
      const Vec2 q = ry * x - (R_ * R_ / ry) * x_[j];
      g -= ry * q / q.squaredNorm();
    }
    g *= -1.0 / (2.0 * kPi);
    gx += g.x() * sigma[j] * w_[j];
    gy += g.y() * sigma[j] * w_[j];
  }
  return {gx, gy};
}

Eigen::VectorXcd CavitySolver::boundary_values(const Eigen::VectorXcd& sigma) const {
  const int m = size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m);
  for (std::size_t c = 0; c < start_.size(); ++c) {
    const int n2 = count_[c], n = n2 / 2, s0 = start_[c];
    // product-quadrature weights for log(4 sin^2((t - t_j)/2))
    std::vector<double> rw(n2);
    for (int k = 0; k < n2; ++k) {
      const double d = kPi * k / n;
      double s = 0.0;
      for (int mm = 1; mm < n; ++mm) s += std::cos(mm * d) / mm;
      rw[k] = -2.0 * kPi / n * s - kPi / (static_cast<double>(n) * n) * std::cos(n * d);
    }
    for (int ii = 0; ii < n2; ++ii) {
      const int i = s0 + ii;
      cplx acc = 0.0;
      for (int jj = 0; jj < n2; ++jj) {
        const int j = s0 + jj;
        const double m1 = -speed_[j] / (4.0 * kPi);
        double m2;
        if (ii == jj) {
          m2 = m1 * std::log(speed_[i] * speed_[i]);
        } else {
          const double sh = std::sin(0.5 * kPi * (ii - jj) / n);
          m2 = m1 * std::log((x_[i] - x_[j]).squaredNorm() / (4.0 * sh * sh));
        }
        acc += (rw[(ii - jj + n2) % n2] * m1 + kPi / n * m2) * sigma[j];
      }
      out[i] += acc;
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double g = 0.0;
      if (curve_of_[i] != curve_of_[j]) g = -std::log((x_[i] - x_[j]).norm()) / (2.0 * kPi);
      const double ry = x_[j].norm();
      const double qn = ry > 0.0 ? (ry * x_[i] - (R_ * R_ / ry) * x_[j]).norm() : R_ * R_;
      g += std::log(qn / R_) / (2.0 * kPi);
      out[i] += g * sigma[j] * w_[j];
    }
  return out;
}

FourierTrace CavitySolver::outer_neumann(const Eigen::VectorXcd& sigma, int nmax) const {
  FourierTrace f(nmax);
  for (int j = 0; j < size(); ++j) {
    const double ry = x_[j].norm() / R_;
    const double th = std::atan2(x_[j].y(), x_[j].x());
    const cplx sw = sigma[j] * w_[j] / (-2.0 * kPi * R_);
    double p = 1.0;
    for (int m = 0; m <= nmax; ++m) {
      f[m] += p * std::polar(1.0, -m * th) * sw;
      if (m > 0) f[-m] += p * std::polar(1.0, m * th) * sw;
      p *= ry;
    }
  }
  return f;
}

// ---- solutions

MixedSolution::MixedSolution(std::shared_ptr<const CavitySolver> solver, FourierTrace f, Eigen::VectorXcd sigma,
                             double radius)
    : solver_(std::move(solver)), f_(std::move(f)), sigma_(std::move(sigma)), R_(radius) {}

cplx MixedSolution::eval(const Vec2& x) const {
  cplx u = poisson_extension(f_, R_, x);
  if (!solver_->empty()) u += solver_->field(sigma_, x);
  return u;
}

std::pair<cplx, cplx> MixedSolution::grad(const Vec2& x) const {
  auto g = poisson_extension_grad(f_, R_, x);
  if (!solver_->empty()) {
    const auto h = solver_->grad(sigma_, x);
    g.first += h.first;
    g.second += h.second;
  }
  return g;
}

FourierTrace MixedSolution::neumann(int nmax) const {
  FourierTrace g = solver_->empty() ? FourierTrace(nmax) : solver_->outer_neumann(sigma_, nmax);
  for (int n = -std::min(nmax, f_.nmax); n <= std::min(nmax, f_.nmax); ++n) g[n] += std::abs(n) / R_ * f_[n];
  return g;
}

MixedSolution solve_mixed_bvp(const Geometry2& geom, const FourierTrace& f) {
  auto solver = std::make_shared<const CavitySolver>(geom);
  Eigen::VectorXcd sigma;
  if (!solver->empty()) {
    Eigen::VectorXcd g(solver->size());
    for (int i = 0; i < solver->size(); ++i) {
      const auto [gx, gy] = poisson_extension_grad(f, geom.outer_radius, solver->nodes()[i]);
      g[i] = -(gx * solver->normals()[i].x() + gy * solver->normals()[i].y());
    }
    sigma = solver->solve(g);
  }
  return MixedSolution(solver, f, sigma, geom.outer_radius);
}

// ---- DtN maps

namespace {

DtnOperator to_basis(const Eigen::MatrixXcd& corr, int nmax, double radius, DtnBasis basis, int size_param) {
  DtnOperator op;
  op.basis = basis;
  op.size_param = size_param;
  op.radius = radius;
  Eigen::MatrixXcd fourier = corr;
  for (int n = -nmax; n <= nmax; ++n) fourier(n + nmax, n + nmax) += std::abs(n) / radius;
  if (basis == DtnBasis::FourierModes) {
    op.matrix = std::move(fourier);
    op.correction = corr;
    return op;
  }
  const int m = size_param, k = 2 * nmax + 1;
  Eigen::MatrixXcd E(m, k), P(k, m);
  for (int i = 0; i < m; ++i)
    for (int n = -nmax; n <= nmax; ++n) {
      const double th = 2.0 * kPi * i / m;
      E(i, n + nmax) = std::polar(1.0, n * th);
      P(n + nmax, i) = std::polar(1.0 / m, -n * th);
    }
  op.matrix = E * fourier * P;
  op.correction = E * corr * P;
  return op;
}

int modes_for(DtnBasis basis, int size_param) {
  if (basis == DtnBasis::FourierModes) {
    if (size_param < 0) throw DomainError("number of Fourier modes must be nonnegative");
    return size_param;
  }
  if (size_param < 3 || size_param % 2 == 0) throw DomainError("collocation needs an odd node count >= 3");
  return (size_param - 1) / 2;
}

}  // namespace

DtnOperator dtn_empty(double radius, DtnBasis basis, int size_param) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  const int nmax = modes_for(basis, size_param);
  return to_basis(Eigen::MatrixXcd::Zero(2 * nmax + 1, 2 * nmax + 1), nmax, radius, basis, size_param);
}

DtnOperator dtn_assemble(const Geometry2& geom, DtnBasis basis, int size_param) {
  const int nmax = modes_for(basis, size_param);
  if (geom.cavities.empty()) {
    geom.validate();
    return dtn_empty(geom.outer_radius, basis, size_param);
  }
  const CavitySolver solver(geom);
  const int k = 2 * nmax + 1, m = solver.size();
  const double R = geom.outer_radius;
  Eigen::MatrixXcd g(m, k);
  for (int n = -nmax; n <= nmax; ++n) {
    const FourierTrace f = FourierTrace::mode(n, nmax);
    for (int i = 0; i < m; ++i) {
      const auto [gx, gy] = poisson_extension_grad(f, R, solver.nodes()[i]);
      g(i, n + nmax) = -(gx * solver.normals()[i].x() + gy * solver.normals()[i].y());
    }
  }
  const Eigen::MatrixXcd sigma = solver.solve(g);
  Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(k, k);
  for (int n = -nmax; n <= nmax; ++n) {
    const FourierTrace col = solver.outer_neumann(sigma.col(n + nmax), nmax);
    for (int mm = -nmax; mm <= nmax; ++mm) lam(mm + nmax, n + nmax) = col[mm];
  }
  return to_basis(lam, nmax, R, basis, size_param);
}

cplx energy_gap(const DtnOperator& lambda0, const DtnOperator& lambdaD, const FourierTrace& f) {
  if (lambda0.basis != lambdaD.basis || lambda0.size_param != lambdaD.size_param ||
      lambda0.radius != lambdaD.radius || lambda0.matrix.rows() != lambdaD.matrix.rows())
    throw BasisMismatchError("DtN operators do not share a basis");
  const bool split = lambda0.correction.size() == lambda0.matrix.size() &&
                     lambdaD.correction.size() == lambdaD.matrix.size();
  const Eigen::MatrixXcd diff =
      split ? Eigen::MatrixXcd(lambda0.correction - lambdaD.correction) : Eigen::MatrixXcd(lambda0.matrix - lambdaD.matrix);
  const double R = lambda0.radius;
  if (lambda0.basis == DtnBasis::FourierModes) {
    const int nmax = lambda0.size_param;
    Eigen::VectorXcd fb(2 * nmax + 1), fv(2 * nmax + 1);
    for (int n = -nmax; n <= nmax; ++n) {
      const cplx fn = std::abs(n) <= f.nmax ? f[n] : 0.0;
      const cplx fmn = std::abs(n) <= f.nmax ? f[-n] : 0.0;
      fb[n + nmax] = std::conj(fmn);  // coefficients of conj(f)
      fv[n + nmax] = fn;
    }
    const Eigen::VectorXcd g = diff * fb;
    cplx s = 0.0;
    for (int m = -nmax; m <= nmax; ++m) s += g[m + nmax] * fv[-m + nmax];
    return 2.0 * kPi * R * s;
  }
  const int m = lambda0.size_param;
  Eigen::VectorXcd fv(m);
  for (int i = 0; i < m; ++i) fv[i] = f.eval(2.0 * kPi * i / m);
  const Eigen::VectorXcd g = diff * fv.conjugate();
  return 2.0 * kPi * R / m * (g.array() * fv.array()).sum();
}

double concentric_dtn_eigenvalue(int n, double rho) {
  const double p = std::pow(rho, 2.0 * std::abs(n));
  return std::abs(n) * (1.0 - p) / (1.0 + p);
}

}  // namespace probe
