#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "probe/carleman3d.hpp"
#include "probe/forward2d.hpp"
#include "probe/needle2d.hpp"
#include "probe/probe.hpp"

namespace probe {

enum class ScenarioKind { Eval2D, Eval3D, EvalHelmholtz, ForwardOracle, ProbeScan };

const char* to_string(ScenarioKind k);

// Flat dotted keys, one "key = value" per line, '#' starts a comment.
// Unset optionals fall back to the defaults of the invoked operation.
struct Scenario {
  ScenarioKind kind = ScenarioKind::Eval2D;

  std::optional<double> outer_radius;  // geometry.outer = "circle r=R"
  std::vector<Curve2> cavities;        // geometry.cavity[i]

  std::vector<double> tip, dir;        // needle.tip, needle.dir: 2 or 3 components
  std::vector<double> theta1, theta2;  // frame.theta1, frame.theta2 (3D)

  std::optional<double> alpha, tau, lambda;
  std::optional<double> eps0;
  std::optional<int> n_max;

  std::optional<int> grid_nx, grid_ny, grid_directions;

  std::optional<double> theta_cap;
  std::optional<int> window;
  std::optional<double> ratio;

  std::optional<int> oracle_nmax;  // ForwardOracle: modes 0..nmax

  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;

  bool operator==(const Scenario&) const = default;

  bool is_3d() const { return kind == ScenarioKind::Eval3D || kind == ScenarioKind::EvalHelmholtz; }
  double radius() const { return outer_radius.value_or(1.0); }
  Geometry2 geometry() const;
  VerdictParams verdict() const;
  ScheduleOptions schedule(int default_n_max) const;
  Frame3 frame() const;
  std::string out_dir() const { return output_dir.value_or("out"); }
};

// Throws ConfigError naming the offending key.
Scenario parse_scenario(const std::string& text);
std::string serialize(const Scenario& s);
// FNV-1a of the canonical serialization, 16 hex digits.
std::string scenario_hash(const Scenario& s);

struct RunOptions {
  int threads = 1;
  // Sweep and oracle runs fail when the largest relative difference exceeds this.
  std::optional<double> tolerance;
};

struct RunReport {
  int status = 0;  // 0 ok, 3 tolerance exceeded
  std::vector<std::string> files;
  double max_rel_diff = 0.0;
  std::string message;
};

// Writes CSV files under out_dir(); each starts with one "# {json}" line.
// Module failures propagate as exceptions.
RunReport run(const Scenario& s, const RunOptions& opt = {});

// CSV body for the concentric DtN oracle (n, rho, eigenvalue_numeric, eigenvalue_oracle).
std::string dtn_oracle_csv(double rho, int nmax, double outer_radius = 1.0, int nodes = 256);

// Writes path atomically through a temporary in the same directory.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace probe
