#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "pcp/config.hpp"
#include "pcp/errors.hpp"
#include "pcp/lab.hpp"
#include "pcp/parallel.hpp"

namespace {

std::uint64_t seed_from_env(std::uint64_t fallback) {
  if (const char *s = std::getenv("PCP_SEED")) return std::strtoull(s, nullptr, 10);
  return fallback;
}

pcp::EosModel lab_eos(const std::string &kind, double gamma) {
  if (kind == "taub-mathews") return pcp::EosModel::taub_mathews();
  return pcp::EosModel::ideal(gamma);
}

bool open_report(std::ofstream &out, const std::string &prefix) {
  out.open(prefix + "_report.csv");
  if (!out) std::cerr << "cannot write '" << prefix << "_report.csv'\n";
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Positivity-preserving relativistic MHD toolkit"};
  app.require_subcommand(1);

  // run
  auto *run = app.add_subcommand("run", "Run a configured simulation");
  std::string run_cfg;
  run->add_option("config", run_cfg, "Config file")->required();
  run->allow_extras();

  // validate-eos
  auto *veos = app.add_subcommand("validate-eos", "Check EOS admissibility conditions");
  std::string veos_cfg;
  std::size_t veos_n = 4096;
  veos->add_option("config", veos_cfg, "Config file")->required();
  veos->add_option("--samples", veos_n, "Sample count");
  veos->allow_extras();

  // mesh-info
  auto *minfo = app.add_subcommand("mesh-info", "Summarize a mesh file");
  std::string mesh_file;
  bool mesh_periodic = false;
  minfo->add_option("file", mesh_file)->required()->check(CLI::ExistingFile);
  minfo->add_flag("--periodic", mesh_periodic, "Pair boundary edges periodically");

  // lab
  auto *lab = app.add_subcommand("lab", "Numerical checks of the theory");
  lab->require_subcommand(1);
  std::string prefix = "pcp";
  std::string eos_kind = "ideal";
  double gamma = 5.0 / 3.0;
  double alpha = 1.0;
  std::uint64_t seed = seed_from_env(0);
  int threads = pcp::threads_from_env(1);
  lab->add_option("--prefix", prefix, "Output prefix");
  lab->add_option("--eos", eos_kind)->check(CLI::IsMember({"ideal", "taub-mathews"}));
  lab->add_option("--gamma", gamma);
  lab->add_option("--alpha", alpha)->check(CLI::Range(1.0, 1e6));
  lab->add_option("--seed", seed);
  lab->add_option("--threads", threads)->check(CLI::PositiveNumber);
  lab->fallthrough();

  auto *cex = lab->add_subcommand("counterexample", "Non-PCP counterexample for the standard scheme");
  std::vector<double> thetas{0.25};
  pcp::CounterexampleConfig cc;
  cc.epsilon = 1e-6;
  cc.tau = -1.0;
  cex->add_option("--theta", thetas, "Values of theta")->expected(1, -1);
  cex->add_option("--eps", cc.epsilon, "Density epsilon");
  cex->add_option("--tau", cc.tau, "Pressure tau (defaults to eps)");
  cex->add_option("--phi", cc.phi, "Rotation angle");
  cex->add_option("--aspect", cc.aspect, "Cell aspect ratio");

  auto *spl = lab->add_subcommand("splitting", "Generalized splitting property on random polytopes");
  pcp::SplittingConfig sc;
  spl->add_option("--trials-2d", sc.trials_2d);
  spl->add_option("--trials-3d", sc.trials_3d);
  spl->add_option("--nodes", sc.nodes)->check(CLI::Range(1, 10));
  spl->add_option("--star-samples", sc.star_samples);
  spl->add_flag("--drop-flux", sc.drop_flux, "Omit the flux terms (control experiment)");

  auto *div = lab->add_subcommand("divergence", "Divergence evolution under the first-order scheme");
  pcp::DivergenceConfig dc;
  div->add_option("--n", dc.n)->check(CLI::PositiveNumber);
  div->add_option("--steps", dc.steps);
  div->add_option("--sigma", dc.sigma);
  div->add_flag("--ddf", dc.ddf, "Start from discretely divergence-free data");

  auto *od = lab->add_subcommand("odelta", "Refinement study of the divergence error bound");
  pcp::OdeltaConfig oc;
  od->add_option("--n0", oc.n0)->check(CLI::PositiveNumber);
  od->add_option("--levels", oc.levels)->check(CLI::Range(2, 8));
  od->add_option("--fields", oc.fields)->check(CLI::Range(1, 8));
  od->add_option("--sigma", oc.sigma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const pcp::RunConfig cfg = pcp::load_run_config(run_cfg, run->remaining());
      return pcp::run_simulation(cfg, std::cerr);
    }
    if (*veos) {
      const pcp::RunConfig cfg = pcp::load_run_config(veos_cfg, veos->remaining());
      pcp::EosModel e;
      pcp::SampleBox box;
      if (cfg.eos.kind == "custom") {
        e = pcp::EosModel::custom(pcp::EnthalpyTable::read(std::filesystem::path(cfg.eos.table)));
        box = {e.p_min(), e.p_max(), e.rho_min(), e.rho_max()};
      } else {
        e = pcp::build_eos(cfg);
      }
      const pcp::ValidationReport r = pcp::validate_eos(e, box, veos_n);
      std::printf("eos %s: %zu samples, %zu violations\n", e.name().c_str(), r.samples,
                  r.violations.size());
      for (std::size_t i = 0; i < r.violations.size() && i < 20; ++i) {
        const auto &v = r.violations[i];
        std::printf("  %s at p=%.17g rho=%.17g margin=%.17g\n", pcp::to_string(v.condition), v.p,
                    v.rho, v.margin);
      }
      return r.ok() ? 0 : 2;
    }
    if (*minfo) {
      const pcp::PolytopeMesh m = pcp::read_mesh(
          std::filesystem::path(mesh_file),
          mesh_periodic ? pcp::BoundaryKind::Periodic : pcp::BoundaryKind::Outflow);
      std::map<std::string, int> shapes;
      double min_area = INFINITY, max_area = 0.0, closure = 0.0;
      for (std::size_t k = 0; k < m.num_cells(); ++k) {
        const char *name = m.shape[k] == pcp::CellShape::Triangle    ? "triangle"
                           : m.shape[k] == pcp::CellShape::Rectangle ? "rectangle"
                           : m.shape[k] == pcp::CellShape::Interval  ? "interval"
                                                                     : "polygon";
        ++shapes[name];
        min_area = std::min(min_area, m.measure[k]);
        max_area = std::max(max_area, m.measure[k]);
        closure = std::max(closure, pcp::norm(m.normal_closure(k)) / m.perimeter(k));
      }
      std::printf("vertices %zu\ncells %zu\nfaces %zu\n", m.vertices.size(), m.num_cells(),
                  m.faces.size());
      for (const auto &[n, c] : shapes) std::printf("%s %d\n", n.c_str(), c);
      std::printf("min_area %.17g\nmax_area %.17g\nmax_radius %.17g\nmax_closure %.17g\n", min_area,
                  max_area, m.max_radius, closure);
      return 0;
    }

    const pcp::EosModel eos = lab_eos(eos_kind, gamma);
    std::ofstream out;
    if (*cex) {
      std::vector<pcp::CounterexampleReport> rows;
      cc.alpha = alpha;
      if (cc.tau < 0.0) cc.tau = cc.epsilon;
      for (double t : thetas) {
        cc.theta = t;
        rows.push_back(pcp::run_counterexample(cc, eos));
      }
      if (!open_report(out, prefix)) return 1;
      pcp::write_counterexample_csv(out, rows);
      pcp::write_counterexample_csv(std::cout, rows);
      return 0;
    }
    if (*spl) {
      sc.alpha = alpha;
      sc.seed = seed;
      sc.threads = threads;
      const auto r = pcp::check_generalized_splitting(sc, eos);
      if (!open_report(out, prefix)) return 1;
      pcp::write_splitting_csv(out, r);
      std::printf("trials %ld failures %ld worst_slack %.17g max_ddf_residual %.17g\n", r.trials,
                  r.failures, r.worst_slack, r.max_ddf_residual);
      return 0;
    }
    if (*div) {
      dc.alpha = alpha;
      dc.seed = seed;
      dc.threads = threads;
      const auto r = pcp::check_divergence_growth(dc, eos);
      if (!open_report(out, prefix)) return 1;
      pcp::write_divergence_series_csv(out, r);
      std::printf("steps %d first %.17g last %.17g non_increasing %d ddf_preserved %d\n", dc.steps,
                  r.max_abs_div.front(), r.max_abs_div.back(), r.non_increasing ? 1 : 0,
                  r.ddf_preserved ? 1 : 0);
      return 0;
    }
    if (*od) {
      oc.alpha = alpha;
      oc.seed = seed;
      const auto r = pcp::check_odelta_bound(oc, eos);
      if (!open_report(out, prefix)) return 1;
      pcp::write_odelta_csv(out, r);
      std::printf("median_ratio %.17g inequality_holds %d\n", r.median_ratio,
                  r.inequality_holds ? 1 : 0);
      return 0;
    }
  } catch (const pcp::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pcp::UnknownPreset &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pcp::StepError &e) {
    std::cerr << "admissibility failure in cell " << e.cell() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
