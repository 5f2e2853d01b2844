#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcp/eos.hpp"
#include "pcp/state.hpp"

namespace pcp {

// ---------------------------------------------------------------------------
// Counterexample to unconditional admissibility of the first-order scheme.

struct CounterexampleConfig {
  double epsilon = 1e-6;  ///< rest-mass density of both states
  double tau = 1e-6;      ///< pressure of both states
  double theta = 0.25;    ///< alpha dt |E*| / (2 |I_k|), in (0, 1/2)
  double phi = 0.3;       ///< angle of the normal xi_kj*
  double aspect = 0.05;   ///< short/long side ratio of the rectangular cells
  double alpha = 1.0;
};

struct CounterexampleReport {
  double theta = 0, epsilon = 0, tau = 0;
  double qtilde = 0;         ///< q_tilde(T U_k^{n+1})
  double qhat = 0;
  double analytic_limit = 0; ///< 27 theta^7 (4 theta + 1)^2 (theta - 2) / 64
  double cfl = 0;            ///< lambda_k of the step
  bool admissible = true;    ///< is_admissible_g0(U_k^{n+1})
  ConservedState rotated;    ///< T U_k^{n+1}
};

/// 27 theta^7 (4 theta + 1)^2 (theta - 2) / 64.
double counterexample_limit(double theta);

/// Builds a 3x3 block of rotated rectangles, puts T^{-1} U(V_tilde) in the
/// right neighbor of the center cell and T^{-1} U(V_hat) everywhere else, and
/// takes one first-order step with dt = 2 theta |I| / (alpha |E*|).
CounterexampleReport run_counterexample(const CounterexampleConfig &cfg, const EosModel &eos);

// ---------------------------------------------------------------------------
// Generalized LxF splitting over random polytopes.

struct SplittingConfig {
  long trials_2d = 1000;
  long trials_3d = 100;
  double alpha = 1.0;
  int nodes = 2;             ///< states per face (the weights omega_i)
  int star_samples = 200;    ///< sampled v* per trial
  bool drop_flux = false;    ///< theta = 0 reduction: omit the flux term
  std::uint64_t seed = 1;
  int threads = 1;
};

struct SplittingTrial {
  long id = 0;
  int dim = 2;
  int faces = 0;
  double D = 0;
  double min_slack = 0;  ///< worst sampled g1 constraint / scale
  bool pass = true;
};

struct SplittingReport {
  long trials = 0;
  long failures = 0;
  double worst_slack = 0;
  double max_ddf_residual = 0;  ///< |sum_j sum_i omega_i <xi_j, B^ij> L_j| / scale
  std::vector<SplittingTrial> rows;
};

SplittingReport check_generalized_splitting(const SplittingConfig &cfg, const EosModel &eos);

/// Sampled min of g1 over v* (the worst B* = B is used) for directions
/// concentrated near the light cone plus directions aligned with m, B, m x B.
double sampled_g1_min(const ConservedState &U, int samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Divergence evolution of the first-order scheme on Cartesian meshes.

struct DivergenceConfig {
  int n = 16;
  int steps = 200;
  bool ddf = false;
  double sigma = 0.9;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct DivergenceReport {
  std::vector<double> max_abs_div;  ///< per step, including n = 0
  double tolerance = 0;
  bool non_increasing = true;
  bool ddf_preserved = true;  ///< max |div| <= 1e-11 throughout (ddf runs)
};

DivergenceReport check_divergence_growth(const DivergenceConfig &cfg, const EosModel &eos);

// ---------------------------------------------------------------------------
// O(Delta) bound of the high-order scheme with locally divergence-free fields.

struct OdeltaConfig {
  int n0 = 8;
  int levels = 3;
  double sigma = 0.9;
  double alpha = 1.0;
  int fields = 3;
  int star_samples = 64;
  std::uint64_t seed = 1;
};

struct OdeltaLevel {
  int field = 0;
  int n = 0;
  double delta = 0;
  double max_div_out = 0;  ///< max_k |div_out| / sum|E|
  double bound = 0;        ///< max_k,s 2 lambda |v*.B*| |div_out| / (alpha sum|E|)
  double min_slack = 0;    ///< min_k,s of Xi2.n* + p_m* over the samples
  double min_margin = 0;   ///< min of slack - proposition bound (>= 0 expected)
  bool dividend_zero = false;
};

struct OdeltaReport {
  std::vector<OdeltaLevel> levels;
  std::vector<double> ratios;  ///< bound(Delta) / bound(Delta/2), all fields and halvings
  double median_ratio = 0;
  bool inequality_holds = true;
};

/// ddf_exact selects a globally divergence-free (constant) magnetic field.
OdeltaReport check_odelta_bound(const OdeltaConfig &cfg, const EosModel &eos,
                                bool ddf_exact = false);

// CSV writers.
void write_counterexample_csv(std::ostream &out, const std::vector<CounterexampleReport> &rows);
void write_splitting_csv(std::ostream &out, const SplittingReport &r);
void write_divergence_series_csv(std::ostream &out, const DivergenceReport &r);
void write_odelta_csv(std::ostream &out, const OdeltaReport &r);

}  // namespace pcp
