#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pcp/eos.hpp"
#include "pcp/mesh.hpp"
#include "pcp/state.hpp"

namespace pcp {

using PresetParams = std::map<std::string, double>;

/// Names accepted by preset_initial_condition / initial_averages.
const std::vector<std::string> &preset_names();

/// Pointwise field of an analytic preset (constant, smooth-vortex-like,
/// discontinuity).  Throws UnknownPreset for unknown names and ConfigError
/// for cell-wise presets.
std::function<PrimitiveState(Vec2)> preset_initial_condition(const std::string &name,
                                                             const PresetParams &params);

/// Cell averages of any preset; random presets draw from the given seed.
std::vector<ConservedState> initial_averages(const std::string &name, const PresetParams &params,
                                             const PolytopeMesh &mesh, const EosModel &eos,
                                             std::uint64_t seed);

/// Ranges for random admissible primitive states (rho, p log-uniform).
struct StateRanges {
  double rho_min = 1e-2, rho_max = 1e1;
  double p_min = 1e-2, p_max = 1e1;
  double v_max = 0.9;
  double B_max = 3.0;
};

PrimitiveState random_primitive(std::mt19937_64 &rng, const StateRanges &r);

/// Removes the first-order discrete divergence of cell-constant B by the
/// least-norm correction B -= D^T (D D^T)^+ D B.  Throws ConstructionError if
/// the projected divergence exceeds tol * |B|.
void project_ddf(const PolytopeMesh &mesh, std::vector<Vec3> &B, double tol = 1e-13);

/// Random admissible cell data whose cell averages satisfy the first-order DDF
/// condition.
std::vector<ConservedState> random_admissible_ddf(const PolytopeMesh &mesh, const EosModel &eos,
                                                  std::mt19937_64 &rng, const StateRanges &r = {});

}  // namespace pcp
