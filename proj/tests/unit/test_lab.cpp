#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pcp/errors.hpp"
#include "pcp/lab.hpp"

using namespace pcp;

TEST_CASE("counterexample analytic limit") {
  CHECK(counterexample_limit(0.25) ==
        doctest::Approx(27.0 * std::pow(0.25, 7) * 4.0 * (-1.75) / 64.0).epsilon(1e-15));
  CHECK(counterexample_limit(0.25) == doctest::Approx(-1.80e-4).epsilon(2e-3));
}

TEST_CASE("counterexample: rotated state matches the closed form") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  CounterexampleConfig c;
  c.theta = 0.3;
  c.epsilon = 1e-3;
  c.tau = 2e-3;
  const CounterexampleReport r = run_counterexample(c, e);
  // T U^{n+1} = (2 sqrt(3) eps/3, 2 eps h/3 + theta/2, 0, 0, theta, 0, 0, 4 eps h/3 - tau + theta/2)
  const double h = e.enthalpy(c.tau, c.epsilon);
  CHECK(r.rotated.D == doctest::Approx(2 * std::sqrt(3.0) * c.epsilon / 3).epsilon(1e-12));
  CHECK(r.rotated.m.x == doctest::Approx(2 * c.epsilon * h / 3 + c.theta / 2).epsilon(1e-12));
  CHECK(std::abs(r.rotated.m.y) < 1e-13);
  CHECK(r.rotated.B.x == doctest::Approx(c.theta).epsilon(1e-12));
  CHECK(std::abs(r.rotated.B.y) < 1e-13);
  CHECK(r.rotated.E == doctest::Approx(4 * c.epsilon * h / 3 - c.tau + c.theta / 2).epsilon(1e-12));
  CHECK(r.cfl == doctest::Approx(2.1 * c.theta));
}

TEST_CASE("counterexample: negative q_tilde and convergence") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  CounterexampleConfig c;
  c.theta = 0.25;
  c.epsilon = c.tau = 1e-6;
  const auto r = run_counterexample(c, e);
  CHECK(r.qtilde < 0.0);
  CHECK_FALSE(r.admissible);
  double prev = 1e300;
  for (double eps : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    c.epsilon = c.tau = eps;
    const double gap = std::abs(run_counterexample(c, e).qtilde - r.analytic_limit);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.01 * std::abs(r.analytic_limit));
  c.theta = 0.6;
  CHECK_THROWS_AS(run_counterexample(c, e), ConfigError);
}

TEST_CASE("generalized splitting on random polytopes") {
  SplittingConfig c;
  c.trials_2d = 500;
  c.trials_3d = 100;
  for (double alpha : {1.0, 2.0}) {
    c.alpha = alpha;
    const SplittingReport r = check_generalized_splitting(c, EosModel::ideal(5.0 / 3.0));
    CHECK(r.failures == 0);
    CHECK(r.max_ddf_residual < 1e-12);
    CHECK(r.rows.size() == 600);
  }
  std::ostringstream os;
  write_splitting_csv(os, check_generalized_splitting(SplittingConfig{2, 1}, EosModel::taub_mathews()));
  CHECK(os.str().rfind("trial,dim,faces,D,min_slack,pass\n", 0) == 0);
}

TEST_CASE("divergence evolution") {
  DivergenceConfig c;
  c.steps = 100;
  const DivergenceReport a = check_divergence_growth(c, EosModel::ideal(5.0 / 3.0));
  CHECK(a.non_increasing);
  CHECK(a.max_abs_div.size() == 101);
  CHECK(a.max_abs_div.back() < a.max_abs_div.front());
  c.ddf = true;
  const DivergenceReport b = check_divergence_growth(c, EosModel::ideal(5.0 / 3.0));
  CHECK(b.ddf_preserved);
  for (double d : b.max_abs_div) CHECK(d <= 1e-11);
}

TEST_CASE("O(Delta) bound refinement") {
  OdeltaConfig c;
  c.fields = 2;
  const OdeltaReport r = check_odelta_bound(c, EosModel::ideal(5.0 / 3.0));
  CHECK(r.inequality_holds);
  CHECK(r.median_ratio >= 1.8);
  for (std::size_t i = 1; i < r.levels.size(); ++i) {
    if (r.levels[i].field == r.levels[i - 1].field) CHECK(r.levels[i].max_div_out < r.levels[i - 1].max_div_out);
  }
  const OdeltaReport z = check_odelta_bound(c, EosModel::ideal(5.0 / 3.0), true);
  for (const auto &l : z.levels) {
    CHECK(l.bound < 1e-12);
    CHECK(l.min_margin >= -1e-12);
  }
}
