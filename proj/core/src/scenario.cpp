#include "probe/scenario.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "probe/errors.hpp"
#include "probe/vekua.hpp"

namespace probe {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key, "not a finite number: '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, "not an integer: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v, int lo, int hi) {
  const long long x = to_integer(key, v);
  if (x < lo || x > hi)
    throw ConfigError(key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::vector<double> to_vector(const std::string& key, const std::string& v, std::size_t n) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  if (out.size() != n) throw ConfigError(key, "expected " + std::to_string(n) + " components");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

const std::map<std::string, ScenarioKind>& kinds() {
  static const std::map<std::string, ScenarioKind> m{{"Eval2D", ScenarioKind::Eval2D},
                                                      {"Eval3D", ScenarioKind::Eval3D},
                                                      {"EvalHelmholtz", ScenarioKind::EvalHelmholtz},
                                                      {"ForwardOracle", ScenarioKind::ForwardOracle},
                                                      {"ProbeScan", ScenarioKind::ProbeScan}};
  return m;
}

// keys each kind accepts besides scenario.kind, output.dir and rng.seed
std::set<std::string> allowed_keys(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Eval2D:
      return {"params.alpha", "params.tau", "needle.tip", "needle.dir", "geometry.outer", "grid.nx", "grid.ny"};
    case ScenarioKind::Eval3D:
      return {"params.alpha", "params.tau", "needle.tip", "frame.theta1", "frame.theta2", "grid.nx"};
    case ScenarioKind::EvalHelmholtz:
      return {"params.alpha", "params.tau", "params.lambda", "needle.tip", "frame.theta1", "frame.theta2",
              "grid.nx"};
    case ScenarioKind::ForwardOracle:
      return {"geometry.outer", "geometry.cavity", "oracle.nmax"};
    case ScenarioKind::ProbeScan:
      return {"geometry.outer", "geometry.cavity", "schedule.eps0", "schedule.n_max", "grid.nx", "grid.ny",
              "grid.directions", "verdict.theta_cap", "verdict.window", "verdict.ratio"};
  }
  return {};
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k{
      "scenario.kind", "geometry.outer", "geometry.cavity", "needle.tip", "needle.dir", "frame.theta1",
      "frame.theta2", "params.alpha", "params.tau", "params.lambda", "schedule.eps0", "schedule.n_max",
      "grid.nx", "grid.ny", "grid.directions", "verdict.theta_cap", "verdict.window", "verdict.ratio",
      "oracle.nmax", "output.dir", "rng.seed"};
  return k;
}

// "geometry.cavity[3]" -> ("geometry.cavity", 3); other keys -> (key, -1)
std::pair<std::string, int> split_index(const std::string& key) {
  const auto lb = key.find('[');
  if (lb == std::string::npos) return {key, -1};
  if (key.back() != ']' || lb + 2 > key.size() - 1) throw ConfigError(key, "malformed index");
  const std::string idx = key.substr(lb + 1, key.size() - lb - 2);
  return {key.substr(0, lb), to_int(key, idx, 0, 1000)};
}

double parse_outer(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::string shape, rr;
  in >> shape >> rr;
  std::string extra;
  if (shape != "circle" || rr.rfind("r=", 0) != 0 || (in >> extra))
    throw ConfigError(key, "expected \"circle r=<radius>\" (only circular outer boundaries are supported)");
  const double r = to_double(key, rr.substr(2));
  if (!(r > 0.0)) throw ConfigError(key, "radius must be positive");
  return r;
}

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string header(const Scenario& s, const std::vector<std::string>& columns) {
  nlohmann::json params = nlohmann::json::object();
  std::istringstream in(serialize(s));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    std::string v = trim(line.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
    params[trim(line.substr(0, eq))] = v;
  }
  const VerdictParams vp = s.verdict();
  nlohmann::json meta{{"format", "probe-csv/1"},
                      {"kind", to_string(s.kind)},
                      {"scenario_hash", scenario_hash(s)},
                      {"parameters", params},
                      {"verdict", {{"theta_cap", vp.theta}, {"window", vp.window}, {"ratio", vp.ratio},
                                   {"reliability", vp.reliability}}},
                      {"columns", columns},
                      {"created", iso_now()}};
  return "# " + meta.dump() + "\n";
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string r;
  bool first = true;
  for (const auto& c : cells) {
    r += (first ? "" : ",") + c;
    first = false;
  }
  return r + "\n";
}

std::string columns_line(const std::vector<std::string>& cols) {
  std::string r;
  for (std::size_t i = 0; i < cols.size(); ++i) r += (i ? "," : "") + cols[i];
  return r + "\n";
}

std::vector<double> sweep_points(int count) {
  std::vector<double> s;
  for (int k = 0; k < count; ++k) {
    const double v = -1.0 + 3.0 * (k + 0.5) / count;
    if (std::abs(v) > 1e-3) s.push_back(v);
  }
  return s;
}

double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

void write_csv(RunReport& rep, const std::string& dir, const std::string& name, const std::string& content) {
  const std::string path = (std::filesystem::path(dir) / name).string();
  write_atomic(path, content);
  rep.files.push_back(path);
}

void check_tolerance(RunReport& rep, const RunOptions& opt) {
  if (opt.tolerance && rep.max_rel_diff > *opt.tolerance) {
    rep.status = 3;
    rep.message = "largest relative difference " + num(rep.max_rel_diff) + " exceeds tolerance " +
                  num(*opt.tolerance);
  }
}

RunReport run_eval2d(const Scenario& s) {
  RunReport rep;
  const std::vector<std::string> cols{"x", "y", "re_v", "im_v", "abs_v_minus_G"};
  std::string body = columns_line(cols);
  const int nx = s.grid_nx.value_or(21), ny = s.grid_ny.value_or(21);
  const double R = s.radius();
  const Vec2 tip(s.tip[0], s.tip[1]);
  const Direction2 dir = Direction2::from(s.dir[0], s.dir[1]);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Vec2 p(nx > 1 ? -R + 2.0 * R * ix / (nx - 1) : 0.0, ny > 1 ? -R + 2.0 * R * iy / (ny - 1) : 0.0);
      if (p.norm() > R || p == tip) continue;
      const cplx v = needle2d_eval(p, tip, *s.alpha, *s.tau, dir);
      const cplx g = green2d(p - tip);
      body += csv_row({num(p.x()), num(p.y()), num(v.real()), num(v.imag()), num(std::abs(v - g))});
    }
  write_csv(rep, s.out_dir(), "eval2d.csv", header(s, cols) + body);
  return rep;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c{"s", "closed_form", "quadrature", "abs_diff"};
  return c;
}

RunReport run_eval3d(const Scenario& s, const RunOptions& opt) {
  RunReport rep;
  const Frame3 fr = s.frame();
  const Vec3 x = s.tip.empty() ? Vec3::Zero() : Vec3(s.tip[0], s.tip[1], s.tip[2]);
  SemiInfiniteQuadrature q;
  q.axis_tolerance = 0.0;
  std::mt19937_64 gen(s.seed.value_or(0));
  std::string body = columns_line(sweep_columns());
  for (double sv : sweep_points(s.grid_nx.value_or(24))) {
    // limit r -> 0 of the quadrature by extrapolation in r^2, in a random transverse direction
    const double phi = 2.0 * kPi * unit_uniform(gen);
    const Vec3 e = std::cos(phi) * fr.theta1 + std::sin(phi) * fr.theta2;
    const double v1 = needle3d_eval(x + sv * fr.omega + 2e-4 * e, x, *s.alpha, *s.tau, fr, q);
    const double v2 = needle3d_eval(x + sv * fr.omega + 1e-4 * e, x, *s.alpha, *s.tau, fr, q);
    const double quad = (4.0 * v2 - v1) / 3.0;
    const double closed = needle3d_on_axis(sv, *s.alpha, *s.tau);
    const double d = std::abs(quad - closed);
    rep.max_rel_diff = std::max(rep.max_rel_diff, d / std::abs(closed));
    body += csv_row({num(sv), num(closed), num(quad), num(d)});
  }
  write_csv(rep, s.out_dir(), "axis_sweep.csv", header(s, sweep_columns()) + body);
  check_tolerance(rep, opt);
  return rep;
}

RunReport run_helmholtz(const Scenario& s, const RunOptions& opt) {
  RunReport rep;
  HelmholtzNeedleParams p;
  p.lambda = *s.lambda;
  p.alpha = *s.alpha;
  p.tau = *s.tau;
  p.frame = s.frame();
  const Vec3 x = s.tip.empty() ? Vec3::Zero() : Vec3(s.tip[0], s.tip[1], s.tip[2]);
  std::string body = columns_line(sweep_columns());
  for (double sv : sweep_points(s.grid_nx.value_or(24))) {
    const double quad = helmholtz_needle_eval(x + sv * p.frame.omega, x, p);
    const double closed = helmholtz_needle_on_axis(sv, p);
    const double d = std::abs(quad - closed);
    rep.max_rel_diff = std::max(rep.max_rel_diff, d / std::abs(closed));
    body += csv_row({num(sv), num(closed), num(quad), num(d)});
  }
  write_csv(rep, s.out_dir(), "axis_sweep.csv", header(s, sweep_columns()) + body);
  check_tolerance(rep, opt);
  return rep;
}

// centre and radius of a disk cavity
std::pair<Vec2, double> disk_params(const Curve2& c) {
  const Vec2 a = c.point(0.0), b = c.point(kPi);
  const Vec2 m = 0.5 * (a + b);
  return {m, (a - m).norm()};
}

double oracle_rows(std::string& body, const DtnOperator& lam, double rho, int nmax, double R) {
  double worst = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    const double numeric = lam.matrix(n + nmax, n + nmax).real();
    const double oracle = concentric_dtn_eigenvalue(n, rho / R) / R;
    if (n > 0) worst = std::max(worst, std::abs(numeric - oracle) / oracle);
    body += csv_row({std::to_string(n), num(rho), num(numeric), num(oracle)});
  }
  return worst;
}

const std::vector<std::string>& oracle_columns() {
  static const std::vector<std::string> c{"n", "rho", "eigenvalue_numeric", "eigenvalue_oracle"};
  return c;
}

RunReport run_oracle(const Scenario& s, const RunOptions& opt) {
  RunReport rep;
  const Geometry2 g = s.geometry();
  const int nmax = s.oracle_nmax.value_or(16);
  const auto lam = dtn_assemble(g, DtnBasis::FourierModes, nmax);
  std::string body = columns_line(oracle_columns());
  rep.max_rel_diff = oracle_rows(body, lam, disk_params(g.cavities[0]).second, nmax, g.outer_radius);
  write_csv(rep, s.out_dir(), "dtn_oracle.csv", header(s, oracle_columns()) + body);
  check_tolerance(rep, opt);
  return rep;
}

RunReport run_scan(const Scenario& s, const RunOptions& opt) {
  RunReport rep;
  const Geometry2 g = s.geometry();
  const double R = g.outer_radius;
  const auto l0 = dtn_empty(R, DtnBasis::FourierModes, 64);
  const auto ld = dtn_assemble(g, DtnBasis::FourierModes, 64);
  ScanGrid grid;
  grid.nx = *s.grid_nx;
  grid.ny = *s.grid_ny;
  grid.x0 = grid.y0 = -R;
  grid.x1 = grid.y1 = R;
  ScanOptions so;
  so.schedule = s.schedule(so.schedule.n_max);
  so.verdict = s.verdict();
  so.threads = opt.threads;
  const auto res = scan_reconstruct(l0, ld, R, grid, uniform_directions(s.grid_directions.value_or(8)), so);

  const std::vector<std::string> mcols{"ix", "iy", "x", "y", "verdict", "best_direction", "last_abs_I"};
  const std::vector<std::string> tcols{"ix", "iy", "direction", "n", "alpha_n", "tau_n", "re_I", "im_I", "abs_I"};
  std::string mask = columns_line(mcols), traces = columns_line(tcols);
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    const ScanCell& cell = res.cells[c];
    const std::string ix = std::to_string(cell.ix), iy = std::to_string(cell.iy);
    mask += csv_row({ix, iy, num(cell.tip.x()), num(cell.tip.y()),
                     cell.inside_domain ? to_string(cell.verdict) : "outside_domain",
                     std::to_string(cell.best_direction), num(cell.last_abs)});
    for (std::size_t k = 0; k < res.traces[c].size(); ++k) {
      const IndicatorTrace& t = res.traces[c][k];
      const NeedleSchedule& sch = res.schedules[k];
      for (int n = 0; n < t.reliable; ++n)
        traces += csv_row({ix, iy, std::to_string(k), std::to_string(n + 1), num(sch.alphas[n]),
                           num(sch.taus[n]), num(t.values[n].real()), num(t.values[n].imag()),
                           num(std::abs(t.values[n]))});
    }
  }
  write_csv(rep, s.out_dir(), "mask.csv", header(s, mcols) + mask);
  write_csv(rep, s.out_dir(), "traces.csv", header(s, tcols) + traces);
  return rep;
}

}  // namespace

const char* to_string(ScenarioKind k) {
  for (const auto& [name, kind] : kinds())
    if (kind == k) return name.c_str();
  return "?";
}

Geometry2 Scenario::geometry() const {
  Geometry2 g;
  g.outer_radius = radius();
  g.cavities = cavities;
  return g;
}

VerdictParams Scenario::verdict() const {
  VerdictParams p;
  p.theta = theta_cap.value_or(p.theta);
  p.window = window.value_or(p.window);
  p.ratio = ratio.value_or(p.ratio);
  return p;
}

ScheduleOptions Scenario::schedule(int default_n_max) const {
  ScheduleOptions o;
  o.n_max = n_max.value_or(default_n_max);
  o.eps0 = eps0.value_or(o.eps0);
  return o;
}

Frame3 Scenario::frame() const {
  if (theta1.empty()) return {};
  return Frame3::from(Vec3(theta1[0], theta1[1], theta1[2]), Vec3(theta2[0], theta2[1], theta2[2]));
}

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!kv.emplace(key, val).second) throw ConfigError(key, "duplicate key");
  }

  Scenario s;
  const auto kit = kv.find("scenario.kind");
  if (kit == kv.end()) throw ConfigError("scenario.kind", "missing required key");
  const auto kind = kinds().find(kit->second);
  if (kind == kinds().end()) throw ConfigError("scenario.kind", "unknown scenario kind '" + kit->second + "'");
  s.kind = kind->second;
  const auto allowed = allowed_keys(s.kind);
  const std::size_t dim = s.is_3d() ? 3 : 2;

  std::map<int, Curve2> cav;
  for (const auto& [key, v] : kv) {
    const auto [base, index] = split_index(key);
    if (!known_keys().count(base) || (index >= 0) != (base == "geometry.cavity"))
      throw ConfigError(key, "unknown key");
    if (base == "scenario.kind") continue;
    if (base != "output.dir" && base != "rng.seed" && !allowed.count(base))
      throw ConfigError(key, std::string("not used by ") + to_string(s.kind) + " scenarios");

    if (base == "geometry.outer") {
      s.outer_radius = parse_outer(key, v);
    } else if (base == "geometry.cavity") {
      try {
        cav.emplace(index, Curve2::parse(v));
      } catch (const Error& e) {
        throw ConfigError(key, e.what());
      }
    } else if (base == "needle.tip") {
      s.tip = to_vector(key, v, dim);
    } else if (base == "needle.dir") {
      s.dir = to_vector(key, v, dim);
      if (std::hypot(s.dir[0], s.dir[1]) == 0.0) throw ConfigError(key, "direction must be nonzero");
    } else if (base == "frame.theta1") {
      s.theta1 = to_vector(key, v, 3);
    } else if (base == "frame.theta2") {
      s.theta2 = to_vector(key, v, 3);
    } else if (base == "params.alpha") {
      s.alpha = to_double(key, v);
      if (!(*s.alpha > 0.0 && *s.alpha <= 1.0)) throw ConfigError(key, "alpha out of ]0,1]");
    } else if (base == "params.tau") {
      s.tau = to_double(key, v);
      if (!(*s.tau > 0.0)) throw ConfigError(key, "tau must be positive");
    } else if (base == "params.lambda") {
      s.lambda = to_double(key, v);
      if (!(*s.lambda > 0.0)) throw ConfigError(key, "lambda must be positive");
    } else if (base == "schedule.eps0") {
      s.eps0 = to_double(key, v);
      if (!(*s.eps0 > 0.0 && *s.eps0 < 1.0)) throw ConfigError(key, "eps0 out of ]0,1[");
    } else if (base == "schedule.n_max") {
      s.n_max = to_int(key, v, 1, 40);
    } else if (base == "grid.nx") {
      s.grid_nx = to_int(key, v, 1, 4096);
    } else if (base == "grid.ny") {
      s.grid_ny = to_int(key, v, 1, 4096);
    } else if (base == "grid.directions") {
      s.grid_directions = to_int(key, v, 1, 360);
    } else if (base == "verdict.theta_cap") {
      s.theta_cap = to_double(key, v);
      if (!(*s.theta_cap > 0.0)) throw ConfigError(key, "theta_cap must be positive");
    } else if (base == "verdict.window") {
      s.window = to_int(key, v, 1, 32);
    } else if (base == "verdict.ratio") {
      s.ratio = to_double(key, v);
      if (!(*s.ratio > 1.0)) throw ConfigError(key, "ratio must exceed 1");
    } else if (base == "oracle.nmax") {
      s.oracle_nmax = to_int(key, v, 1, 512);
    } else if (base == "output.dir") {
      if (v.empty() || v.find_first_of("\"\n") != std::string::npos) throw ConfigError(key, "invalid directory");
      s.output_dir = v;
    } else if (base == "rng.seed") {
      const long long x = to_integer(key, v);
      if (x < 0) throw ConfigError(key, "seed must be non-negative");
      s.seed = static_cast<std::uint64_t>(x);
    }
  }

  int expect = 0;
  for (auto& [i, c] : cav) {
    if (i != expect) throw ConfigError("geometry.cavity[" + std::to_string(expect) + "]", "missing cavity index");
    s.cavities.push_back(std::move(c));
    ++expect;
  }

  auto require = [&](bool present, const std::string& key) {
    if (!present) throw ConfigError(key, std::string("missing required key for ") + to_string(s.kind));
  };
  switch (s.kind) {
    case ScenarioKind::Eval2D:
      require(s.alpha.has_value(), "params.alpha");
      require(s.tau.has_value(), "params.tau");
      require(!s.tip.empty(), "needle.tip");
      require(!s.dir.empty(), "needle.dir");
      break;
    case ScenarioKind::EvalHelmholtz:
      require(s.lambda.has_value(), "params.lambda");
      [[fallthrough]];
    case ScenarioKind::Eval3D:
      require(s.alpha.has_value(), "params.alpha");
      require(s.tau.has_value(), "params.tau");
      if (s.theta1.empty() != s.theta2.empty())
        throw ConfigError(s.theta1.empty() ? "frame.theta1" : "frame.theta2", "frame needs both theta1 and theta2");
      if (!s.theta1.empty()) {
        try {
          s.frame();
        } catch (const Error& e) {
          throw ConfigError("frame.theta2", e.what());
        }
      }
      break;
    case ScenarioKind::ForwardOracle: {
      require(!s.cavities.empty(), "geometry.cavity[0]");
      const auto [c, r] = disk_params(s.cavities[0]);
      if (s.cavities.size() != 1 || s.cavities[0].kind() != Curve2::Kind::Disk || c.norm() > 1e-14)
        throw ConfigError("geometry.cavity[0]", "ForwardOracle needs a single disk centred at the origin");
      break;
    }
    case ScenarioKind::ProbeScan:
      if (!s.grid_nx && !s.grid_ny && !s.grid_directions)
        throw ConfigError("grid", "ProbeScan requires a grid (grid.nx, grid.ny)");
      require(s.grid_nx.has_value(), "grid.nx");
      require(s.grid_ny.has_value(), "grid.ny");
      break;
  }
  if (s.kind == ScenarioKind::ForwardOracle || s.kind == ScenarioKind::ProbeScan) {
    try {
      s.geometry().validate();
    } catch (const Error& e) {
      throw ConfigError("geometry", e.what());
    }
  }
  return s;
}

std::string serialize(const Scenario& s) {
  std::string out;
  auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto quoted = [](const std::string& v) { return "\"" + v + "\""; };
  put("scenario.kind", to_string(s.kind));
  if (s.outer_radius) put("geometry.outer", quoted("circle r=" + num(*s.outer_radius)));
  for (std::size_t i = 0; i < s.cavities.size(); ++i)
    put("geometry.cavity[" + std::to_string(i) + "]", quoted(s.cavities[i].describe()));
  if (!s.tip.empty()) put("needle.tip", quoted(join(s.tip)));
  if (!s.dir.empty()) put("needle.dir", quoted(join(s.dir)));
  if (!s.theta1.empty()) put("frame.theta1", quoted(join(s.theta1)));
  if (!s.theta2.empty()) put("frame.theta2", quoted(join(s.theta2)));
  if (s.alpha) put("params.alpha", num(*s.alpha));
  if (s.tau) put("params.tau", num(*s.tau));
  if (s.lambda) put("params.lambda", num(*s.lambda));
  if (s.eps0) put("schedule.eps0", num(*s.eps0));
  if (s.n_max) put("schedule.n_max", std::to_string(*s.n_max));
  if (s.grid_nx) put("grid.nx", std::to_string(*s.grid_nx));
  if (s.grid_ny) put("grid.ny", std::to_string(*s.grid_ny));
  if (s.grid_directions) put("grid.directions", std::to_string(*s.grid_directions));
  if (s.theta_cap) put("verdict.theta_cap", num(*s.theta_cap));
  if (s.window) put("verdict.window", std::to_string(*s.window));
  if (s.ratio) put("verdict.ratio", num(*s.ratio));
  if (s.oracle_nmax) put("oracle.nmax", std::to_string(*s.oracle_nmax));
  if (s.output_dir) put("output.dir", quoted(*s.output_dir));
  if (s.seed) put("rng.seed", std::to_string(*s.seed));
  return out;
}

std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, p);
}

std::string dtn_oracle_csv(double rho, int nmax, double outer_radius, int nodes) {
  if (!(rho > 0.0 && rho < outer_radius)) throw DomainError("rho must lie in ]0, R[");
  if (nmax < 1) throw DomainError("nmax must be positive");
  Geometry2 g;
  g.outer_radius = outer_radius;
  g.nodes_per_curve = nodes;
  g.cavities.push_back(Curve2::disk(0.0, 0.0, rho));
  const auto lam = dtn_assemble(g, DtnBasis::FourierModes, nmax);
  std::string body = columns_line(oracle_columns());
  oracle_rows(body, lam, rho, nmax, outer_radius);
  return body;
}

RunReport run(const Scenario& s, const RunOptions& opt) {
  switch (s.kind) {
    case ScenarioKind::Eval2D:
      return run_eval2d(s);
    case ScenarioKind::Eval3D:
      return run_eval3d(s, opt);
    case ScenarioKind::EvalHelmholtz:
      return run_helmholtz(s, opt);
    case ScenarioKind::ForwardOracle:
      return run_oracle(s, opt);
    case ScenarioKind::ProbeScan:
      return run_scan(s, opt);
  }
  throw ConfigError("scenario.kind", "unhandled kind");
}

}  // namespace probe
