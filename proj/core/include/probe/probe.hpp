#pragma once

#include <vector>

#include "probe/forward2d.hpp"
#include "probe/needle2d.hpp"
#include "probe/types.hpp"

namespace probe {

enum class Verdict { Bounded, BlowUp, Inconclusive };

const char* to_string(Verdict v);

struct VerdictParams {
  double theta = 1e8;  // threshold on |I|
  int window = 4;      // k
  double ratio = 1.5;  // geometric growth per step over the window
  // values whose rounding-error estimate exceeds this fraction of |I| end the trace
  double reliability = 0.02;
};

struct IndicatorTrace {
  std::vector<cplx> values;  // n = 1.., up to and including the first unreliable one
  std::vector<double> error_estimates;
  int reliable = 0;          // leading values used for the verdict
  NeedleSchedule schedule;
  Verdict verdict = Verdict::Inconclusive;
  VerdictParams params;
};

// Needs window + 1 values, otherwise Inconclusive.
//  stable: the last k moduli vary by less than 5% of their maximum
//  growth: (|I_n| / |I_{n-k}|)^(1/k)
//  BlowUp if growth >= ratio, or |I_n| > theta without a stable tail;
//  Bounded if stable and |I_n| < theta/10; Inconclusive otherwise.
Verdict classify(const std::vector<cplx>& values, const VerdictParams& p);

// Fourier coefficients of the needle function on the outer circle.
FourierTrace needle_trace(const Needle& needle, double alpha, double tau, double radius, int nmax,
                          int samples = 512);

// Cavity-blind: uses only the two DtN operators. The trace stops early once
// the needle's boundary values are too large for the pairing to be resolved
// in double precision.
IndicatorTrace indicator_sequence(const DtnOperator& lambda0, const DtnOperator& lambdaD, const Needle& needle,
                                  const NeedleSchedule& schedule, int n_max, const VerdictParams& p = {});
IndicatorTrace indicator_sequence(const Geometry2& geom, const Needle& needle, const NeedleSchedule& schedule,
                                  int n_max, const VerdictParams& p = {});

// Limit indicator for x outside the closure of D, with G = 1/(y1 + i y2).
// Both energy integrals are reduced to the cavity boundary by Green's formula,
// I(x) = int_{dD} conj(G + w_x) dG/dnu ds.
double indicator_function_direct(const Geometry2& geom, const Vec2& x);
// Same, reusing an assembled cavity solver.
double indicator_function_direct(const CavitySolver& solver, const Geometry2& geom, const Vec2& x);

// Concentric cavity rho in the unit disk: 2 pi sum_k 2k rho^2k / ((1 + rho^2k) |x|^(2k+2)).
double concentric_indicator(double rho, const Vec2& x);

struct ScanGrid {
  int nx = 33, ny = 33;
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  Vec2 node(int ix, int iy) const;
};

struct ScanOptions {
  ScheduleOptions schedule = [] {
    ScheduleOptions o;
    o.n_max = 16;
    return o;
  }();
  VerdictParams verdict;
  int threads = 1;
};

struct ScanCell {
  int ix = 0, iy = 0;
  Vec2 tip{0.0, 0.0};
  bool inside_domain = false;  // tip in the open outer disk
  bool outside = false;        // some direction gave Bounded
  Verdict verdict = Verdict::Inconclusive;
  int best_direction = -1;
  double last_abs = 0.0;
};

struct ScanResult {
  ScanGrid grid;
  std::vector<Direction2> directions;
  std::vector<ScanCell> cells;  // row-major, iy outer
  std::vector<std::vector<IndicatorTrace>> traces;  // per cell, per direction; schedules left empty
  std::vector<NeedleSchedule> schedules;            // per direction, built at tip 0
  const ScanCell& at(int ix, int iy) const { return cells[iy * grid.nx + ix]; }
};

// Tips outside the outer disk are skipped. One schedule per direction,
// translated to each tip.
ScanResult scan_reconstruct(const DtnOperator& lambda0, const DtnOperator& lambdaD, double outer_radius,
                            const ScanGrid& grid, const std::vector<Direction2>& directions,
                            const ScanOptions& opt = {});

// Evenly spaced directions starting at angle 0.
std::vector<Direction2> uniform_directions(int count);

struct ConeRegion {
  Vec2 vertex{0.0, 0.0};
  Vec2 axis{1.0, 0.0};
  double half_aperture = 0.5;
  double length = 0.5;
};

struct BallRegion {
  Vec2 centre{0.0, 0.0};
  double radius = 0.1;
};

struct GrowthReport {
  std::vector<double> energies;  // discrete int |grad v_n|^2
  bool increasing = false;
  double growth = 0.0;  // last / first
  bool passed = false;  // increasing and growth > 10
};

// Energies over a 200 x 200 raster of the region's bounding box clipped to the
// region and the outer disk.
GrowthReport cone_energy_growth(const NeedleSchedule& schedule, const Needle& needle, const ConeRegion& cone,
                                int n_max, double outer_radius = 1.0, int raster = 200);
GrowthReport ball_energy_growth(const NeedleSchedule& schedule, const Needle& needle, const BallRegion& ball,
                                int n_max, double outer_radius = 1.0, int raster = 200);
// Same for an explicit alpha and tau ladder instead of a schedule.
GrowthReport cone_energy_growth(double alpha, const std::vector<double>& taus, const Needle& needle,
                                const ConeRegion& cone, double outer_radius = 1.0, int raster = 200);

}  // namespace probe
