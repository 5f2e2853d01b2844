#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcp/eos.hpp"
#include "pcp/mesh.hpp"
#include "pcp/presets.hpp"
#include "pcp/solver.hpp"

namespace pcp {

struct MeshConfig {
  std::string kind = "cartesian";  ///< cartesian | triangular | interval | file
  int nx = 16, ny = 16;
  Bounds bounds;
  std::string file;
  std::string boundary = "periodic";  ///< periodic | outflow
};

struct EosConfig {
  std::string kind = "ideal";  ///< ideal | taub-mathews | custom
  double gamma = 5.0 / 3.0;
  std::string table;
};

struct SchemeConfig {
  int order = 1;
  std::string reconstruction = "lsq";
  bool divfree_B = true;
  int rk_order = 1;
  int Q = 1;
};

struct RunConfig {
  MeshConfig mesh;
  EosConfig eos;
  SchemeConfig scheme;
  double limiter_eps = kDefaultEpsilon;
  CflPolicy cfl;
  double t_end = 0.1;
  long max_steps = 1000000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string preset = "constant";
  PresetParams params;
  std::string prefix = "pcp";
  long dump_interval = 0;  ///< 0: initial and final dumps only
};

/// Every key usable in a config file, as `section.key`.
std::vector<std::string> config_keys();

/// Parses a sectioned key/value file (TOML subset) and applies `--section.key
/// value` overrides on top.  Environment PCP_SEED and PCP_THREADS override the
/// file but not explicit flags.  Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides = {});

/// Checks invariants: referenced files exist, sigma in (0, 1], order in {1, 2}.
void validate(const RunConfig &cfg);

PolytopeMesh build_mesh(const RunConfig &cfg);
EosModel build_eos(const RunConfig &cfg);

/// Runs the configured simulation, writing `<prefix>_diag.csv`,
/// `<prefix>_dump_<n>.csv` and `<prefix>_report.csv`.  Returns the process exit
/// code: 0 success, 1 configuration error, 2 admissibility failure.
int run_simulation(const RunConfig &cfg, std::ostream &log);

}  // namespace pcp
