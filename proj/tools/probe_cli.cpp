// probe_cli: scenario runner and oracle dumps.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "probe/errors.hpp"
#include "probe/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw probe::ConfigError("", "cannot read scenario file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const probe::ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const probe::DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const probe::OverflowError*>(&e)) return "OverflowError";
  if (dynamic_cast<const probe::QuadratureError*>(&e)) return "QuadratureError";
  if (dynamic_cast<const probe::SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const probe::GeometryError*>(&e)) return "GeometryError";
  if (dynamic_cast<const probe::ScheduleError*>(&e)) return "ScheduleError";
  if (dynamic_cast<const probe::BasisMismatchError*>(&e)) return "BasisMismatchError";
  return "Error";
}

// one JSON line on stderr
int fail(const std::exception& e, int status) {
  nlohmann::json rec{{"status", "error"}, {"type", error_type(e)}, {"message", e.what()}, {"exit_code", status}};
  if (auto* c = dynamic_cast<const probe::ConfigError*>(&e); c && !c->key().empty()) rec["key"] = c->key();
  std::cerr << rec.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe-method scenario runner"};
  app.require_subcommand(1);
  int threads = 1;
  double tolerance = -1.0;
  app.add_option("--threads", threads, "Worker threads for grid scans")->check(CLI::Range(1, 256));
  app.add_option("--tolerance", tolerance, "Fail sweeps and oracles whose relative difference exceeds this");

  std::string run_file, validate_file;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its CSV files");
  run_cmd->add_option("scenario", run_file)->required();
  run_cmd->fallthrough();
  auto* val_cmd = app.add_subcommand("validate", "Parse and check a scenario");
  val_cmd->add_option("scenario", validate_file)->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Analytic oracle tables");
  oracle_cmd->require_subcommand(1);
  auto* dtn_cmd = oracle_cmd->add_subcommand("dtn", "Concentric-disk DtN eigenvalues, numeric vs closed form");
  double rho = 0.4, radius = 1.0;
  int nmax = 16, nodes = 256;
  dtn_cmd->add_option("--rho", rho, "Cavity radius")->required();
  dtn_cmd->add_option("--nmax", nmax, "Largest mode")->required()->check(CLI::Range(1, 512));
  dtn_cmd->add_option("--radius", radius, "Outer radius");
  dtn_cmd->add_option("--nodes", nodes, "Quadrature nodes on the cavity")->check(CLI::Range(16, 8192));
  dtn_cmd->fallthrough();
  oracle_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*val_cmd) {
      const auto s = probe::parse_scenario(read_file(validate_file));
      nlohmann::json rec{{"status", "ok"}, {"kind", probe::to_string(s.kind)}, {"scenario_hash", probe::scenario_hash(s)}};
      std::cout << rec.dump() << "\n";
      return 0;
    }
    if (*dtn_cmd) {
      std::cout << probe::dtn_oracle_csv(rho, nmax, radius, nodes);
      return 0;
    }
    probe::Scenario s;
    try {
      s = probe::parse_scenario(read_file(run_file));
    } catch (const probe::ConfigError& e) {
      return fail(e, 2);
    }
    probe::RunOptions opt;
    opt.threads = threads;
    if (tolerance >= 0.0) opt.tolerance = tolerance;
    const auto rep = probe::run(s, opt);
    nlohmann::json rec{{"status", rep.status == 0 ? "ok" : "tolerance_exceeded"},
                       {"kind", probe::to_string(s.kind)},
                       {"files", rep.files},
                       {"max_rel_diff", rep.max_rel_diff}};
    if (!rep.message.empty()) rec["message"] = rep.message;
    (rep.status == 0 ? std::cout : std::cerr) << rec.dump() << "\n";
    return rep.status;
  } catch (const probe::ConfigError& e) {
    return fail(e, 2);
  } catch (const std::exception& e) {
    return fail(e, 1);
  }
}
