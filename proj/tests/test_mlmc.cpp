#include <doctest.h>

#include <cmath>

#include "mglfa/error.hpp"
#include "mglfa/fv.hpp"
#include "mglfa/mlmc.hpp"

using namespace mglfa;

namespace {

MlmcConfig small_config() {
  MlmcConfig c;
  c.L = 2;
  c.coarsest_cells = 8;
  c.samples = {8, 6, 4};
  c.matern = reference_matern(2);
  c.lfa_samples = 1;
  c.master_seed = 11;
  return c;
}

}  // namespace

TEST_SUITE("mlmc") {

TEST_CASE("sample allocation") {
  CHECK(allocate_samples(3, 64, 2.0) == std::vector<int>{4096, 1024, 256, 64});
  CHECK(allocate_samples(2, 10, 1.5) == std::vector<int>{80, 29, 10});
  CHECK(allocate_samples(0, 7, 3.0) == std::vector<int>{7});
  CHECK_THROWS_AS(allocate_samples(2, 10, -1.0), ConfigError);
}

TEST_CASE("predicted iterations and work") {
  CHECK(predicted_iterations(0.1, 1e-10) == 10);
  CHECK(predicted_iterations(0.2, 1e-10) == 15);
  CHECK(predicted_iterations(0.05, 1e-10) == 8);
  CHECK_THROWS_AS(predicted_iterations(1.2, 1e-10), NumericalError);
  CHECK_THROWS_AS(predicted_iterations(0.5, 2.0), ConfigError);
  CHECK(level_work(1.0, 4, 5.0, 1.0 / 8) == doctest::Approx(1280.0));
  CHECK(level_work(2.0, 4, 5.0, 1.0 / 16) == doctest::Approx(4.0 * 1280.0 * 2.0));
}

TEST_CASE("rate fit") {
  std::vector<double> m, v;
  for (int l = 1; l <= 4; ++l) {
    m.push_back(-3.0 * std::exp2(-1.0 * l));
    v.push_back(0.7 * std::exp2(-2.0 * l));
  }
  const auto r = estimate_rates(m, v);
  CHECK(r.alpha == doctest::Approx(1.0));
  CHECK(r.beta == doctest::Approx(2.0));
  CHECK_THROWS_AS(estimate_rates({1.0, 0.5}, {1.0, 0.5}), ConfigError);
}

TEST_CASE("flux through a homogeneous medium") {
  for (double c : {1.0, 3.5}) {
    const auto sol = solve_darcy(CellField(UniformGrid(32), c), CycleSpec::w_cycle(2, 2), 1e-14, 100);
    CHECK(sol.stats.converged);
    CHECK(sol.Q == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("flux is the exact discrete one") {
  // Layered medium: columns in series, so Q = 1 / sum_i (h / k_i) for the discrete scheme.
  const int m = 16;
  CellField k{UniformGrid(m)};
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) k(i, j) = 1.0 + (i % 3);
  const auto sol = solve_darcy(k, CycleSpec::w_cycle(2, 2), 1e-13, 100);
  const double h = 1.0 / m;
  // Half cells at both Dirichlet faces plus harmonic faces in between.
  double resistance = 0.5 * h / k(0, 0) + 0.5 * h / k(m - 1, 0);
  for (int i = 1; i < m; ++i) resistance += h / harmonic_face(k(i - 1, 0), k(i, 0));
  CHECK(sol.Q == doctest::Approx(1.0 / resistance).epsilon(1e-10));
}

TEST_CASE("level sampler") {
  const LevelSampler sampler(reference_matern(2), 8, 3, 5);
  CHECK(sampler.finest_level() == 3);
  for (int l = 0; l <= 3; ++l) CHECK(sampler.plan(l).factor() == sampler.plan(0).factor());
  const auto [fine, coarse] = sampler.pair_fields(2, 4);
  CHECK(fine.side() == 32);
  CHECK(coarse.side() == 16);
  CHECK(fine.values() == sampler.fine_field(2, 4).values());
  CHECK(coarse.all_positive());
  CHECK(fine.values() != sampler.fine_field(2, 5).values());
  // Independent draws per level.
  CHECK(sampler.fine_field(1, 4).values() != coarse.values());
  CHECK_THROWS_AS(sampler.pair_fields(0, 0), ConfigError);
}

TEST_CASE("W(2,2) iteration counts are robust in the grid size") {
  const LevelSampler sampler(reference_matern(2), 16, 2, 1);
  for (int l = 0; l <= 2; ++l) {
    const auto sol = solve_darcy(sampler.fine_field(l, 0), CycleSpec::w_cycle(2, 2), 1e-10, 100);
    CHECK(sol.stats.converged);
    CHECK(sol.stats.iterations >= 4);
    CHECK(sol.stats.iterations <= 10);
    CHECK(sol.stats.rho_measured < 0.2);
  }
}

TEST_CASE("corrections are strongly correlated and small") {
  const auto cfg = small_config();
  const LevelSampler sampler(cfg.matern, cfg.coarsest_cells, cfg.L, cfg.master_seed);
  double var_y = 0.0, var_q = 0.0, mq = 0.0, my = 0.0;
  const int n = 12;
  std::vector<CorrectionSample> s;
  for (int i = 0; i < n; ++i) s.push_back(correction_sample(sampler, 2, static_cast<std::uint64_t>(i), cfg));
  for (const auto& c : s) my += c.Y / n, mq += c.Q_fine / n;
  for (const auto& c : s) var_y += (c.Y - my) * (c.Y - my), var_q += (c.Q_fine - mq) * (c.Q_fine - mq);
  CHECK(var_y < 0.1 * var_q);
  for (const auto& c : s) {
    CHECK(c.converged);
    CHECK(c.Y == doctest::Approx(c.Q_fine - c.Q_coarse));
  }
  const auto base = correction_sample(sampler, 0, 3, cfg);
  CHECK(base.Q_coarse == 0.0);
  CHECK(base.Y == base.Q_fine);
}

TEST_CASE("mlmc run") {
  auto cfg = small_config();
  const auto r = run_mlmc(cfg);
  REQUIRE(r.levels.size() == 3);
  double sum = 0.0, var = 0.0;
  for (const auto& lv : r.levels) {
    CHECK(lv.N == cfg.samples[static_cast<std::size_t>(lv.level)]);
    CHECK(lv.failed == 0);
    CHECK(lv.rho_lfa > 0.0);
    CHECK(lv.rho_lfa < 0.5);
    CHECK(lv.predicted_iterations > 0);
    int total = 0;
    for (auto [it, count] : lv.iteration_histogram) total += count;
    CHECK(total == lv.N);
    sum += lv.mean_Y;
    var += lv.var_Y / lv.N;
    if (lv.level > 0) {
      CHECK(lv.mean_Y == doctest::Approx(lv.mean_Q_fine - lv.mean_Q_coarse));
      CHECK(lv.correlation > 0.5);
      CHECK(lv.var_Y < lv.var_Q_fine);
    }
  }
  CHECK(r.estimate == doctest::Approx(sum));
  CHECK(r.estimator_variance == doctest::Approx(var));
  CHECK(!r.warmup);
  CHECK(!r.alpha);
  CHECK(r.total_work > 0.0);
  CHECK(r.estimate > 0.0);

  cfg.threads = 3;
  const auto t = run_mlmc(cfg);
  CHECK(t.estimate == r.estimate);
  CHECK(t.levels[2].var_Y == r.levels[2].var_Y);
  CHECK(t.levels[1].rho_lfa == r.levels[1].rho_lfa);
}

TEST_CASE("single level run and configuration errors") {
  MlmcConfig cfg;
  cfg.L = 0;
  cfg.N_L = 4;
  cfg.lfa_samples = 0;
  const auto r = run_mlmc(cfg);
  REQUIRE(r.levels.size() == 1);
  CHECK(r.estimate == doctest::Approx(r.levels[0].mean_Q_fine));

  MlmcConfig bad;
  bad.L = 1;
  CHECK_THROWS_AS(run_mlmc(bad), ConfigError);  // no beta and too few levels to estimate it
  bad.samples = {4};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.samples.clear();
  bad.coarsest_cells = 6;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.coarsest_cells = 8;
  bad.eps_mg = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

}
