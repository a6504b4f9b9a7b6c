#include <doctest.h>

#include <cmath>
#include <random>

#include "mglfa/error.hpp"
#include "mglfa/fv.hpp"
#include "mglfa/grid.hpp"

using namespace mglfa;

namespace {

CellField lognormal_field(int m, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, spread);
  CellField k{UniformGrid(m)};
  for (double& v : k.values()) v = std::exp(z(rng));
  return k;
}

double rel_difference(const FiveStencilField& a, const FiveStencilField& b) {
  return stencil_difference(a, b) / std::max(a.max_abs_entry(), b.max_abs_entry());
}

}  // namespace

TEST_SUITE("fv") {

TEST_CASE("harmonic face average") {
  CHECK(harmonic_face(1.0, 1.0) == 1.0);
  CHECK(harmonic_face(1.0, 1000.0) == doctest::Approx(2000.0 / 1001.0));
  CHECK(harmonic_face(3.0, 7.0) == doctest::Approx(harmonic_face(7.0, 3.0)));
  // Dominated by the smaller value.
  CHECK(harmonic_face(1e-4, 1e4) < 2e-4);
  CHECK_THROWS_AS(harmonic_face(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(harmonic_face(1.0, -2.0), ConfigError);
}

TEST_CASE("west entry across the vertical jump") {
  const int m = 16;
  const double h = 1.0 / m;
  const auto op = assemble_operator(make_benchmark_field(BenchmarkId::vertical_jump(), m),
                                    BoundarySpec::homogeneous_dirichlet());
  // Cell m/2 + 1 (k = 1000) sees cell m/2 (k = 1) to its west.
  const auto p = op.idx(m / 2 + 1, 5);
  CHECK(op.w[p] == doctest::Approx(-(1.0 / (h * h)) * 2.0 * 1000.0 / 1001.0));
}

TEST_CASE("constant coefficient stencil") {
  const int m = 8;
  const double h2 = 1.0 / (m * m);
  const auto op = assemble_operator(CellField(UniformGrid(m), 1.0), BoundarySpec::homogeneous_dirichlet());
  const auto interior = op.idx(3, 4);
  CHECK(op.c[interior] == doctest::Approx(4.0 / h2));
  CHECK(op.w[interior] == doctest::Approx(-1.0 / h2));
  CHECK(op.n[interior] == doctest::Approx(-1.0 / h2));
  // Half-cell Dirichlet elimination.
  CHECK(op.c[op.idx(0, 4)] == doctest::Approx(5.0 / h2));
  CHECK(op.w[op.idx(0, 4)] == 0.0);
  CHECK(op.c[op.idx(0, 0)] == doctest::Approx(6.0 / h2));
}

TEST_CASE("pressure drop boundary terms") {
  const int m = 8;
  const double h2 = 1.0 / (m * m);
  const auto op = assemble_operator(CellField(UniformGrid(m), 2.0), BoundarySpec::unit_pressure_drop());
  CHECK(op.rhs_bc[op.idx(0, 3)] == doctest::Approx(4.0 / h2));
  CHECK(op.rhs_bc[op.idx(m - 1, 3)] == 0.0);
  CHECK(op.rhs_bc[op.idx(3, 3)] == 0.0);
  // No-flux top and bottom: corner cell has one Dirichlet face only.
  CHECK(op.c[op.idx(0, 0)] == doctest::Approx((2.0 + 2.0 + 4.0) / h2));
  CHECK(op.s[op.idx(3, 0)] == 0.0);
}

TEST_CASE("operator symmetry and row sums") {
  for (const auto& bc : {BoundarySpec::homogeneous_dirichlet(), BoundarySpec::unit_pressure_drop()}) {
    const int m = 16;
    const auto k = lognormal_field(m, 7, 2.0);
    const auto op = assemble_operator(k, bc);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const auto p = op.idx(i, j);
        if (i + 1 < m) CHECK(op.e[p] == op.w[op.idx(i + 1, j)]);
        if (j + 1 < m) CHECK(op.n[p] == op.s[op.idx(i, j + 1)]);
        CHECK(op.c[p] > 0.0);
        // Diagonal dominance with equality away from Dirichlet sides.
        const double off = op.w[p] + op.e[p] + op.s[p] + op.n[p];
        const bool touches = (i == 0 && bc.left.is_dirichlet()) || (i == m - 1 && bc.right.is_dirichlet()) ||
                             (j == 0 && bc.bottom.is_dirichlet()) || (j == m - 1 && bc.top.is_dirichlet());
        if (touches) CHECK(op.c[p] + off > 0.0);
        else CHECK(op.c[p] + off == doctest::Approx(0.0).epsilon(1e-12).scale(op.c[p]));
      }
  }
}

TEST_CASE("linear solution of the pressure drop problem is reproduced for constant k") {
  const int m = 8;
  const auto op = assemble_operator(CellField(UniformGrid(m), 3.0), BoundarySpec::unit_pressure_drop());
  CellField u{UniformGrid(m)};
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) u(i, j) = 1.0 - u.grid().center(i);
  CellField f{UniformGrid(m)}, r{UniformGrid(m)};
  f.values() = op.rhs_bc;
  residual(op, u, f, r);
  CHECK(max_norm(r) < 1e-10 * 3.0 * m * m);
}

TEST_CASE("coarse face rule matches the scaled Galerkin product") {
  for (const auto& bc : {BoundarySpec::homogeneous_dirichlet(), BoundarySpec::unit_pressure_drop()}) {
    for (int m : {4, 8, 16, 32}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto k = lognormal_field(m, seed * 31 + m, 1.5);
        const auto fine_faces = face_coefficients(k, bc);
        const auto direct = stencil_from_faces(coarsen_face_coefficients(fine_faces));
        const auto galerkin = galerkin_product(stencil_from_faces(fine_faces));
        CHECK(rel_difference(direct, galerkin) < 1e-13);
      }
    }
  }
}

TEST_CASE("coarse faces are arithmetic means") {
  const auto k = lognormal_field(8, 3, 1.0);
  const auto fine = face_coefficients(k, BoundarySpec::homogeneous_dirichlet());
  const auto coarse = coarsen_face_coefficients(fine);
  CHECK(coarse.side() == 4);
  CHECK(coarse.x(1, 2) == doctest::Approx(0.5 * (fine.x(2, 4) + fine.x(2, 5))));
  CHECK(coarse.y(3, 0) == doctest::Approx(0.5 * (fine.y(6, 0) + fine.y(7, 0))));
}

TEST_CASE("apply_operator agrees with residual") {
  const int m = 8;
  const auto op = assemble_operator(lognormal_field(m, 11, 1.0), BoundarySpec::homogeneous_dirichlet());
  CellField u{UniformGrid(m)}, lu{UniformGrid(m)}, r{UniformGrid(m)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (double& v : u.values()) v = uni(rng);
  apply_operator(op, u, lu);
  residual(op, u, lu, r);
  CHECK(max_norm(r) == 0.0);
  // Energy is positive for Dirichlet problems.
  double energy = 0.0;
  for (std::size_t p = 0; p < u.values().size(); ++p) energy += u.values()[p] * lu.values()[p];
  CHECK(energy > 0.0);
}

TEST_CASE("invalid coefficients") {
  CellField k(UniformGrid(4), 1.0);
  k(1, 1) = 0.0;
  CHECK_THROWS_AS(assemble_operator(k, BoundarySpec::homogeneous_dirichlet()), ConfigError);
  const auto a = assemble_operator(CellField(UniformGrid(4), 1.0), BoundarySpec::homogeneous_dirichlet());
  const auto b = assemble_operator(CellField(UniformGrid(8), 1.0), BoundarySpec::homogeneous_dirichlet());
  CHECK_THROWS_AS(stencil_difference(a, b), ConfigError);
}

}
