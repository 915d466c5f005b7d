#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "probe/types.hpp"

namespace probe {

// Closed counterclockwise curve x(t), t in [0, 2 pi).
class Curve2 {
 public:
  enum class Kind { Disk, Ellipse, RoundedPolygon };

  static Curve2 disk(double cx, double cy, double r);
  static Curve2 ellipse(double cx, double cy, double a, double b, double angle = 0.0);
  // Corners replaced by tangent circular arcs of the given radius.
  static Curve2 rounded_polygon(std::vector<Vec2> vertices, double corner_radius = 0.02);

  Kind kind() const { return kind_; }
  Vec2 point(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;
  // Winding test against a 512-gon.
  bool contains(const Vec2& p) const;
  std::vector<Vec2> polygon(int n) const;
  double length() const;

  // "disk cx cy r" | "ellipse cx cy a b angle" | "rounded_polygon r x1 y1 x2 y2 ..."
  std::string describe() const;
  static Curve2 parse(const std::string& text);

  bool operator==(const Curve2& o) const;

 private:
  struct Piece {
    bool arc;
    Vec2 a;          // segment start or arc centre
    Vec2 dir;        // segment unit direction
    double r = 0.0;  // arc radius
    double phi0 = 0.0, sweep = 0.0;
    double s0 = 0.0, len = 0.0;
    double t0 = 0.0, dt = 0.0;  // parameter interval
  };
  Kind kind_ = Kind::Disk;
  std::vector<double> p_;   // disk: cx cy r; ellipse: cx cy a b angle
  std::vector<Vec2> verts_;
  double corner_ = 0.0;
  std::vector<Piece> pieces_;
  double total_ = 0.0;

  void build_pieces();
  // position and first two parameter derivatives; pieces are graded so that
  // the speed vanishes to third order at every joint
  void eval_polygon(double t, Vec2& x, Vec2& d1, Vec2& d2) const;
};

// Omega = disk of radius outer_radius about 0, minus the closures of the cavities.
struct Geometry2 {
  double outer_radius = 1.0;
  std::vector<Curve2> cavities;
  int nodes_per_curve = 256;

  // Non-self-intersection, disjointness and containment by sampling, and
  // connectedness of Omega minus D by flood fill; throws GeometryError.
  void validate() const;
  bool in_cavity(const Vec2& p) const;
  bool in_domain(const Vec2& p) const;  // Omega minus closure of D, up to the sampling
};

// Trace on the outer circle as Fourier coefficients c_n, |n| <= nmax.
struct FourierTrace {
  int nmax = 0;
  std::vector<cplx> c;

  explicit FourierTrace(int n = 0) : nmax(n), c(2 * n + 1, 0.0) {}
  cplx& operator[](int n) { return c[n + nmax]; }
  cplx operator[](int n) const { return c[n + nmax]; }
  cplx eval(double theta) const;
  static FourierTrace mode(int n, int nmax);
  // Trapezoid projection of samples at theta_k = 2 pi k / K.
  static FourierTrace from_samples(const std::vector<cplx>& values, int nmax);
  static FourierTrace from_function(const std::function<cplx(double)>& f, int nmax, int samples = 512);
};

// Discretized cavity boundary and the LU of the second-kind Neumann system
// -sigma/2 + K' sigma = g, K' the normal derivative of the disk Green function.
class CavitySolver {
 public:
  explicit CavitySolver(const Geometry2& geom);

  int size() const { return static_cast<int>(x_.size()); }
  bool empty() const { return x_.empty(); }
  const std::vector<Vec2>& nodes() const { return x_; }
  const std::vector<Vec2>& normals() const { return nu_; }
  const std::vector<double>& weights() const { return w_; }

  // Density for Neumann data g (outward from D) at the nodes; checks the residual.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& g) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& g) const;
  double last_residual() const { return residual_; }

  // Single layer with the disk Green function, away from the cavity boundary.
  cplx field(const Eigen::VectorXcd& sigma, const Vec2& x) const;
  std::pair<cplx, cplx> grad(const Eigen::VectorXcd& sigma, const Vec2& x) const;
  // Same, at the boundary nodes (log-singular product quadrature).
  Eigen::VectorXcd boundary_values(const Eigen::VectorXcd& sigma) const;
  // Fourier coefficients of the radial derivative on the outer circle.
  FourierTrace outer_neumann(const Eigen::VectorXcd& sigma, int nmax) const;

 private:
  double R_;
  std::vector<int> curve_of_, start_;
  std::vector<int> count_;
  std::vector<Vec2> x_, nu_;
  std::vector<double> w_, speed_, kappa_;
  Eigen::MatrixXd A_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  mutable double residual_ = 0.0;
};

class MixedSolution {
 public:
  MixedSolution(std::shared_ptr<const CavitySolver> solver, FourierTrace f, Eigen::VectorXcd sigma, double radius);

  cplx eval(const Vec2& x) const;
  std::pair<cplx, cplx> grad(const Vec2& x) const;
  FourierTrace neumann(int nmax) const;
  const Eigen::VectorXcd& density() const { return sigma_; }

 private:
  std::shared_ptr<const CavitySolver> solver_;
  FourierTrace f_;
  Eigen::VectorXcd sigma_;
  double R_;
};

// Harmonic extension of the trace into the disk, and its gradient.
cplx poisson_extension(const FourierTrace& f, double radius, const Vec2& x);
std::pair<cplx, cplx> poisson_extension_grad(const FourierTrace& f, double radius, const Vec2& x);

MixedSolution solve_mixed_bvp(const Geometry2& geom, const FourierTrace& f);

enum class DtnBasis { FourierModes, Collocation };

struct DtnOperator {
  DtnBasis basis = DtnBasis::FourierModes;
  int size_param = 0;  // nmax for Fourier modes, node count for collocation
  double radius = 1.0;
  Eigen::MatrixXcd matrix;
  // matrix minus the analytic empty-disk map, kept separately so that the
  // energy gap does not cancel digits
  Eigen::MatrixXcd correction;
};

// Lambda_0 analytically, diag(|n|/R).
DtnOperator dtn_empty(double radius, DtnBasis basis = DtnBasis::FourierModes, int size_param = 32);
DtnOperator dtn_assemble(const Geometry2& geom, DtnBasis basis = DtnBasis::FourierModes, int size_param = 32);

// int_{dOmega} ((Lambda0 - LambdaD) conj f) f dS
cplx energy_gap(const DtnOperator& lambda0, const DtnOperator& lambdaD, const FourierTrace& f);

// n (1 - rho^2n)/(1 + rho^2n), concentric cavity of radius rho in the unit disk.
double concentric_dtn_eigenvalue(int n, double rho);

}  // namespace probe
