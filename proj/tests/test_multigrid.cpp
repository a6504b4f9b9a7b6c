#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mglfa/error.hpp"
#include "mglfa/fv.hpp"
#include "mglfa/multigrid.hpp"

using namespace mglfa;

namespace {

Eigen::MatrixXd dense(const FiveStencilField& op) {
  const int m = op.side();
  const int n = m * m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int p = static_cast<int>(op.idx(i, j));
      a(p, p) = op.c[p];
      if (i > 0) a(p, p - 1) = op.w[p];
      if (i < m - 1) a(p, p + 1) = op.e[p];
      if (j > 0) a(p, p - m) = op.s[p];
      if (j < m - 1) a(p, p + m) = op.n[p];
    }
  return a;
}

Eigen::VectorXd vec(const CellField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.values().size()));
}

CellField random_field(int m, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  CellField f{UniformGrid(m)};
  for (double& v : f.values()) v = d(rng);
  return f;
}

CellField lognormal(int m, std::uint64_t seed) {
  auto f = random_field(m, seed, -2.0, 2.0);
  for (double& v : f.values()) v = std::exp(v);
  return f;
}

double inner(const CellField& a, const CellField& b) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.values().size(); ++p) s += a.values()[p] * b.values()[p];
  return s;
}

}  // namespace

TEST_SUITE("multigrid") {

TEST_CASE("Gauss-Seidel by hand on a 2 x 2 grid") {
  // k = 1, h = 1/2, pressure drop: c = (2 + 1 + 1) / h^2 = 16 on every cell,
  // w/e/s/n = -4 where present.
  const auto op = assemble_operator(CellField(UniformGrid(2), 1.0), BoundarySpec::unit_pressure_drop());
  CHECK(op.c[0] == doctest::Approx(16.0));
  CHECK(op.e[0] == doctest::Approx(-4.0));
  CHECK(op.n[0] == doctest::Approx(-4.0));
  CellField f{UniformGrid(2)};
  f.values() = {12.0, 24.0, 12.0, 24.0};
  CellField u{UniformGrid(2)};
  smooth(op, u, f, Smoother::gauss_seidel(), 1);
  // u0 = 12/16; u1 = (24 + 4 u0)/16; u2 = (12 + 4 u0)/16; u3 = (24 + 4 u1 + 4 u2)/16.
  CHECK(u(0, 0) == doctest::Approx(0.75));
  CHECK(u(1, 0) == doctest::Approx(27.0 / 16.0));
  CHECK(u(0, 1) == doctest::Approx(15.0 / 16.0));
  CHECK(u(1, 1) == doctest::Approx(34.5 / 16.0));
}

TEST_CASE("Gauss-Seidel is a lexicographic forward substitution") {
  const int m = 6;
  const auto op = assemble_operator(lognormal(m, 3), BoundarySpec::homogeneous_dirichlet());
  const auto a = dense(op);
  const auto f = random_field(m, 4, -1.0, 1.0);
  auto u = random_field(m, 5, -1.0, 1.0);
  const Eigen::VectorXd u0 = vec(u);
  smooth(op, u, f, Smoother::gauss_seidel(), 1);
  const Eigen::MatrixXd lower = a.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd upper = a.triangularView<Eigen::StrictlyUpper>();
  const Eigen::VectorXd expected = lower.triangularView<Eigen::Lower>().solve(vec(f) - upper * u0);
  CHECK((vec(u) - expected).lpNorm<Eigen::Infinity>() < 1e-12 * expected.lpNorm<Eigen::Infinity>());
}

TEST_CASE("damped Jacobi sweep") {
  const int m = 6;
  const auto op = assemble_operator(lognormal(m, 8), BoundarySpec::unit_pressure_drop());
  const auto a = dense(op);
  const auto f = random_field(m, 9, -1.0, 1.0);
  auto u = random_field(m, 10, -1.0, 1.0);
  const Eigen::VectorXd u0 = vec(u);
  smooth(op, u, f, Smoother::jacobi(0.8), 2);
  Eigen::VectorXd expected = u0;
  for (int s = 0; s < 2; ++s)
    expected += 0.8 * ((vec(f) - a * expected).array() / a.diagonal().array()).matrix();
  CHECK((vec(u) - expected).lpNorm<Eigen::Infinity>() <
        1e-12 * (1.0 + expected.lpNorm<Eigen::Infinity>()));

  // omega = 1 on a diagonal system is exact in one sweep.
  FiveStencilField diag{UniformGrid(4)};
  for (double& c : diag.c) c = 3.0;
  CellField g(UniformGrid(4), 6.0), v(UniformGrid(4), 0.0);
  smooth(diag, v, g, Smoother::jacobi(1.0), 1);
  for (double x : v.values()) CHECK(x == doctest::Approx(2.0));
}

TEST_CASE("constant transfers") {
  CellField fine{UniformGrid(4)};
  fine(0, 0) = 1.0;
  fine(1, 0) = 2.0;
  fine(0, 1) = 3.0;
  fine(1, 1) = 4.0;
  const auto c = restrict_cr(fine);
  CHECK(c.side() == 2);
  CHECK(c(0, 0) == doctest::Approx(2.5));
  CHECK(c(1, 1) == 0.0);
  const auto p = prolong_cp(c);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) CHECK(p(i, j) == doctest::Approx(2.5));
}

TEST_CASE("prolongations are 4 times the restriction adjoints") {
  const auto fine = random_field(16, 1, -1.0, 1.0);
  const auto coarse = random_field(8, 2, -1.0, 1.0);
  for (auto [r, p] : {std::pair{RestrictionKind::Constant, ProlongationKind::Constant},
                      std::pair{RestrictionKind::WesselingKhalil, ProlongationKind::WesselingKhalil}}) {
    const double lhs = inner(restrict_field(fine, r), coarse);
    const double rhs = inner(fine, prolong_field(coarse, p));
    CHECK(4.0 * lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("Wesseling-Khalil weights") {
  // A fine delta just above the lower-left child of coarse cell (2, 2) gets weight 3/16.
  CellField fine{UniformGrid(16)};
  fine(4, 5) = 1.0;
  const auto c = restrict_wk(fine);
  CHECK(c(2, 2) == doctest::Approx(3.0 / 16.0));
  double total = 0.0;
  for (double v : c.values()) total += v;
  CHECK(total == doctest::Approx(0.25));
  // Constants are reproduced away from the boundary.
  const auto one = restrict_wk(CellField(UniformGrid(16), 1.0));
  for (int j = 1; j < 7; ++j)
    for (int i = 1; i < 7; ++i) CHECK(one(i, j) == doctest::Approx(1.0));
  const auto p = prolong_wp(CellField(UniformGrid(8), 1.0));
  for (int j = 2; j < 14; ++j)
    for (int i = 2; i < 14; ++i) CHECK(p(i, j) == doctest::Approx(1.0));
}

TEST_CASE("hierarchy depth") {
  const CellField k(UniformGrid(128), 1.0);
  const auto bc = BoundarySpec::homogeneous_dirichlet();
  CHECK(Hierarchy(k, bc, CycleSpec::w_cycle(1, 1)).num_levels() == 6);
  CHECK(Hierarchy(k, bc, CycleSpec::two_grid(Smoother::gauss_seidel(), TransferPair::cp_cr(), 1, 1))
            .num_levels() == 2);
  CHECK_THROWS_AS(Hierarchy(CellField(UniformGrid(12), 1.0), bc, CycleSpec::w_cycle(1, 1)), ConfigError);
  auto bad = CycleSpec::w_cycle(1, 1);
  bad.smoother = Smoother::jacobi(1.5);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = CycleSpec::w_cycle(-1, 1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("coarsest level alone is a direct solve") {
  const auto k = lognormal(8, 21);
  const auto bc = BoundarySpec::homogeneous_dirichlet();
  auto spec = CycleSpec::w_cycle(1, 1);
  spec.coarsest_side = 8;
  const Hierarchy hier(k, bc, spec);
  CHECK(hier.num_levels() == 1);
  const auto f = random_field(8, 22, -1.0, 1.0);
  CellField u{UniformGrid(8)};
  const auto stats = solve(hier, u, f, spec, 1e-30, 1);
  CHECK(stats.residual_history.size() == 2);
  CHECK(stats.residual_history[1] < 1e-12 * stats.residual_history[0]);
}

TEST_CASE("multigrid solves match a dense solve") {
  const int m = 16;
  const auto k = lognormal(m, 30);
  const auto bc = BoundarySpec::unit_pressure_drop();
  const auto op = assemble_operator(k, bc);
  CellField f{UniformGrid(m)};
  f.values() = op.rhs_bc;
  const Eigen::VectorXd exact = dense(op).ldlt().solve(vec(f));
  for (const auto& transfers : {TransferPair::cp_cr(), TransferPair::wp_cr(), TransferPair::wp_wk()}) {
    auto spec = CycleSpec::w_cycle(2, 2);
    spec.transfers = transfers;
    const Hierarchy hier(k, bc, spec);
    CellField u{UniformGrid(m)};
    const auto stats = solve(hier, u, f, spec, 1e-12, 100);
    CHECK(stats.converged);
    CHECK((vec(u) - exact).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("Poisson W-cycle rates") {
  const CellField k(UniformGrid(64), 1.0);
  const auto bc = BoundarySpec::homogeneous_dirichlet();
  const auto w11 = measure_asymptotic_rate(k, bc, CycleSpec::w_cycle(1, 1), 30, 3);
  const auto w22 = measure_asymptotic_rate(k, bc, CycleSpec::w_cycle(2, 2), 30, 3);
  CHECK(w11.rho_measured > 0.0);
  CHECK(w11.rho_measured < 0.25);
  CHECK(w22.rho_measured < w11.rho_measured);
  const auto jac = measure_asymptotic_rate(
      k, bc, CycleSpec::two_grid(Smoother::jacobi(0.8), TransferPair::cp_cr(), 2, 2), 30, 3);
  CHECK(jac.rho_measured < 0.5);
}

TEST_CASE("rate measurement is deterministic and seed dependent") {
  const auto k = lognormal(32, 40);
  const auto bc = BoundarySpec::homogeneous_dirichlet();
  const auto spec = CycleSpec::w_cycle(1, 1);
  const auto a = measure_asymptotic_rate(k, bc, spec, 20, 7);
  const auto b = measure_asymptotic_rate(k, bc, spec, 20, 7);
  const auto c = measure_asymptotic_rate(k, bc, spec, 20, 8);
  CHECK(a.residual_history == b.residual_history);
  CHECK(a.residual_history != c.residual_history);
  CHECK(a.rho_measured == doctest::Approx(c.rho_measured).epsilon(0.2));
  // Residuals contract every cycle.
  for (std::size_t i = 1; i < a.residual_history.size(); ++i)
    CHECK(a.residual_history[i] < a.residual_history[i - 1]);
  CHECK_THROWS_AS(measure_asymptotic_rate(k, bc, spec, 0, 1), ConfigError);
}

TEST_CASE("cycle factor helpers") {
  CHECK(mean_cycle_factor({}) == 0.0);
  CHECK(mean_cycle_factor({1.0}) == 0.0);
  CHECK(mean_cycle_factor({1.0, 0.5, 0.1}) == doctest::Approx(0.35));
  const auto s = rate_statistics({1.0, 2.0, 3.0});
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.stddev == doctest::Approx(1.0));
  CHECK_THROWS_AS(rate_statistics({4.0}), ConfigError);
}

TEST_CASE("names and parsing") {
  CHECK(Smoother::gauss_seidel().name() == "GS");
  CHECK(Smoother::jacobi().name() == "Jacobi");
  CHECK(TransferPair::wp_cr().name() == "(WP,CR)");
  CHECK(parse_transfers("(wp, wk)").restriction == RestrictionKind::WesselingKhalil);
  CHECK(parse_smoother("jacobi:0.5").omega == 0.5);
  CHECK_THROWS_AS(parse_smoother("sor"), ConfigError);
  CHECK_THROWS_AS(parse_transfers("XY,CR"), ConfigError);
}

}
