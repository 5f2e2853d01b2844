#include "pcp/config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include "pcp/errors.hpp"
#include "pcp/recovery.hpp"

namespace pcp {
namespace {

const std::vector<std::string> kPresetKeys{
    "rho",     "p",       "vx",      "vy",    "vz",    "bx",    "by",      "bz",
    "rho_r",   "p_r",     "vx_r",    "vy_r",  "vz_r",  "bx_r",  "by_r",    "bz_r",
    "split_x", "amplitude", "b0",    "rho_min", "rho_max", "p_min", "p_max", "v_max",
    "b_max"};

struct Binder {
  CLI::App app{"pcp run configuration"};
  std::map<std::string, double> params;

  explicit Binder(RunConfig &c) {
    app.allow_extras(false);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--mesh.kind", c.mesh.kind)
        ->check(CLI::IsMember({"cartesian", "triangular", "interval", "file"}));
    app.add_option("--mesh.nx", c.mesh.nx)->check(CLI::PositiveNumber);
    app.add_option("--mesh.ny", c.mesh.ny)->check(CLI::PositiveNumber);
    app.add_option("--mesh.x0", c.mesh.bounds.x0);
    app.add_option("--mesh.x1", c.mesh.bounds.x1);
    app.add_option("--mesh.y0", c.mesh.bounds.y0);
    app.add_option("--mesh.y1", c.mesh.bounds.y1);
    app.add_option("--mesh.file", c.mesh.file);
    app.add_option("--mesh.boundary", c.mesh.boundary)->check(CLI::IsMember({"periodic", "outflow"}));
    app.add_option("--eos.kind", c.eos.kind)
        ->check(CLI::IsMember({"ideal", "taub-mathews", "custom"}));
    app.add_option("--eos.gamma", c.eos.gamma);
    app.add_option("--eos.table", c.eos.table);
    app.add_option("--scheme.order", c.scheme.order);
    app.add_option("--scheme.reconstruction", c.scheme.reconstruction)->check(CLI::IsMember({"lsq"}));
    app.add_option("--scheme.divfree", c.scheme.divfree_B);
    app.add_option("--scheme.rk_order", c.scheme.rk_order)->check(CLI::Range(1, 3));
    app.add_option("--scheme.quadrature", c.scheme.Q)->check(CLI::Range(1, 10));
    app.add_option("--limiter.eps", c.limiter_eps)->check(CLI::PositiveNumber);
    app.add_option("--cfl.sigma", c.cfl.sigma);
    app.add_option("--cfl.alpha", c.cfl.alpha);
    app.add_option("--run.t_end", c.t_end)->check(CLI::NonNegativeNumber);
    app.add_option("--run.max_steps", c.max_steps)->check(CLI::NonNegativeNumber);
    app.add_option("--run.seed", c.seed);
    app.add_option("--run.threads", c.threads)->check(CLI::PositiveNumber);
    app.add_option("--initial.preset", c.preset);
    for (const auto &k : kPresetKeys) app.add_option("--initial." + k, params[k]);
    app.add_option("--output.prefix", c.prefix);
    app.add_option("--output.dump_interval", c.dump_interval)->check(CLI::NonNegativeNumber);
  }
};

std::vector<std::string> file_arguments(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  std::vector<std::string> args;
  for (const auto &item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto &p : item.parents) key += p + ".";
    key += item.name;
    if (item.parents.empty()) {
      throw ConfigError(path.string() + ": key '" + key + "' is outside any section");
    }
    args.push_back("--" + key);
    for (const auto &v : item.inputs) args.push_back(v);
  }
  return args;
}

}  // namespace

std::vector<std::string> config_keys() {
  RunConfig c;
  Binder b(c);
  std::vector<std::string> keys;
  for (const CLI::Option *o : b.app.get_options()) {
    if (!o->get_lnames().empty()) keys.push_back(o->get_lnames().front());
  }
  return keys;
}

RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides) {
  std::vector<std::string> args = file_arguments(path);
  if (const char *s = std::getenv("PCP_SEED")) args.insert(args.end(), {"--run.seed", s});
  if (const char *s = std::getenv("PCP_THREADS")) args.insert(args.end(), {"--run.threads", s});
  args.insert(args.end(), overrides.begin(), overrides.end());

  RunConfig cfg;
  Binder b(cfg);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    b.app.parse(rev);
  } catch (const CLI::Error &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto &k : kPresetKeys) {
    if (b.app.count("--initial." + k) > 0) cfg.params[k] = b.params[k];
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig &cfg) {
  if (!(cfg.cfl.sigma > 0.0 && cfg.cfl.sigma <= 1.0)) throw ConfigError("cfl.sigma must lie in (0, 1]");
  if (!(cfg.cfl.alpha >= 1.0)) throw ConfigError("cfl.alpha must be >= 1");
  if (cfg.scheme.order != 1 && cfg.scheme.order != 2) throw ConfigError("scheme.order must be 1 or 2");
  if (cfg.mesh.kind == "file" && !std::filesystem::exists(cfg.mesh.file)) {
    throw ConfigError("mesh file '" + cfg.mesh.file + "' does not exist");
  }
  if (cfg.eos.kind == "custom" && !std::filesystem::exists(cfg.eos.table)) {
    throw ConfigError("eos table '" + cfg.eos.table + "' does not exist");
  }
  bool known = false;
  for (const auto &n : preset_names()) known = known || n == cfg.preset;
  if (!known) throw UnknownPreset("unknown preset '" + cfg.preset + "'");
}

PolytopeMesh build_mesh(const RunConfig &cfg) {
  const BoundaryKind bk = cfg.mesh.boundary == "outflow" ? BoundaryKind::Outflow : BoundaryKind::Periodic;
  const MeshConfig &m = cfg.mesh;
  if (m.kind == "cartesian") return build_cartesian(m.nx, m.ny, m.bounds, bk);
  if (m.kind == "triangular") return build_triangular(m.nx, m.ny, m.bounds, bk);
  if (m.kind == "interval") return build_interval(m.nx, m.bounds.x0, m.bounds.x1, bk);
  if (m.kind == "file") return read_mesh(std::filesystem::path(m.file), bk);
  throw ConfigError("unknown mesh kind '" + m.kind + "'");
}

EosModel build_eos(const RunConfig &cfg) {
  if (cfg.eos.kind == "ideal") return EosModel::ideal(cfg.eos.gamma);
  if (cfg.eos.kind == "taub-mathews") return EosModel::taub_mathews();
  if (cfg.eos.kind == "custom") {
    const EosModel e = EosModel::custom(EnthalpyTable::read(std::filesystem::path(cfg.eos.table)));
    SampleBox box{e.p_min(), e.p_max(), e.rho_min(), e.rho_max()};
    return require_valid(e, box, 4096);
  }
  throw ConfigError("unknown eos kind '" + cfg.eos.kind + "'");
}

int run_simulation(const RunConfig &cfg, std::ostream &log) {
  PolytopeMesh mesh;
  EosModel eos;
  std::vector<ConservedState> u0;
  try {
    validate(cfg);
    mesh = build_mesh(cfg);
    eos = build_eos(cfg);
    u0 = initial_averages(cfg.preset, cfg.params, mesh, eos, cfg.seed);
  } catch (const std::exception &e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }

  SchemeOptions opt;
  opt.mode = cfg.scheme.order == 2 ? SchemeMode::HighOrder : SchemeMode::FirstOrder;
  opt.divfree_B = cfg.scheme.divfree_B;
  opt.eps = cfg.limiter_eps;
  opt.Q = cfg.scheme.Q;
  opt.rk_order = cfg.scheme.rk_order;
  opt.threads = cfg.threads;
  SchemeGeometry geo;
  const bool high = opt.mode == SchemeMode::HighOrder;
  if (high) {
    try {
      geo = build_scheme_geometry(mesh, opt.Q, lobatto_size_for_degree(1));
    } catch (const std::exception &e) {
      log << "config error: " << e.what() << "\n";
      return 1;
    }
  }

  const std::string prefix = cfg.prefix;
  std::ofstream diag(prefix + "_diag.csv");
  if (!diag) {
    log << "config error: cannot write '" << prefix << "_diag.csv'\n";
    return 1;
  }
  write_diagnostics_header(diag);
  auto dump = [&](const FieldSolution &s) {
    std::ofstream out(prefix + "_dump_" + std::to_string(s.n) + ".csv");
    write_dump(out, mesh, eos, s);
  };
  auto report = [&](const std::string &status, const FieldSolution &s, const std::string &detail,
                    long cell) {
    std::ofstream out(prefix + "_report.csv");
    char buf[256];
    out << "key,value\n";
    out << "status," << status << "\n";
    out << "steps," << s.n << "\n";
    std::snprintf(buf, sizeof buf, "t,%.17g\n", s.t);
    out << buf;
    out << "cells," << mesh.num_cells() << "\n";
    out << "eos," << eos.name() << "\n";
    out << "failed_cell," << cell << "\n";
    out << "detail,\"" << detail << "\"\n";
  };

  FieldSolution sol = FieldSolution::from_averages(mesh, u0);
  write_diagnostics_row(diag, diagnose(mesh, eos, sol, 0.0));
  dump(sol);
  const CflPolicy cfl = cfg.cfl;
  try {
    while (sol.t < cfg.t_end && sol.n < cfg.max_steps) {
      double dt = compute_dt(mesh, cfl, opt.mode, high ? &geo : nullptr);
      if (sol.t + dt > cfg.t_end) dt = cfg.t_end - sol.t;
      sol = ssp_advance(sol, mesh, eos, cfl, opt, high ? &geo : nullptr, dt);
      write_diagnostics_row(diag, diagnose(mesh, eos, sol, dt));
      if (cfg.dump_interval > 0 && sol.n % cfg.dump_interval == 0) dump(sol);
    }
  } catch (const StepError &e) {
    log << "admissibility failure at step " << sol.n + 1 << ", cell " << e.cell() << ": " << e.what()
        << "\n";
    dump(sol);
    report("inadmissible", sol, e.what(), e.cell());
    return 2;
  } catch (const std::exception &e) {
    log << "admissibility failure at step " << sol.n + 1 << ": " << e.what() << "\n";
    dump(sol);
    report("inadmissible", sol, e.what(), -1);
    return 2;
  }
  if (cfg.dump_interval == 0 || sol.n % cfg.dump_interval != 0) dump(sol);
  report("ok", sol, "", -1);
  log << "completed " << sol.n << " steps, t = " << sol.t << "\n";
  return 0;
}

}  // namespace pcp
