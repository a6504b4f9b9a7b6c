#include "mglfa/fv.hpp"

#include <algorithm>
#include <cmath>

#include "mglfa/error.hpp"

namespace mglfa {

BoundarySpec BoundarySpec::homogeneous_dirichlet() {
  return {SideCondition::dirichlet(), SideCondition::dirichlet(), SideCondition::dirichlet(),
          SideCondition::dirichlet()};
}

BoundarySpec BoundarySpec::unit_pressure_drop() {
  return {SideCondition::dirichlet(1.0), SideCondition::dirichlet(0.0), SideCondition::neumann(),
          SideCondition::neumann()};
}

bool BoundarySpec::any_dirichlet() const {
  return left.is_dirichlet() || right.is_dirichlet() || bottom.is_dirichlet() || top.is_dirichlet();
}

double harmonic_face(double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw ConfigError("harmonic_face needs positive coefficients");
  return 2.0 * k1 * k2 / (k1 + k2);
}

FaceCoefficients::FaceCoefficients(UniformGrid g)
    : grid(g),
      x_faces(static_cast<std::size_t>(g.cells_per_side() + 1) * g.cells_per_side(), 0.0),
      y_faces(static_cast<std::size_t>(g.cells_per_side() + 1) * g.cells_per_side(), 0.0) {}

FiveStencilField::FiveStencilField(UniformGrid g)
    : grid(g),
      c(g.size(), 0.0),
      w(g.size(), 0.0),
      e(g.size(), 0.0),
      s(g.size(), 0.0),
      n(g.size(), 0.0),
      rhs_bc(g.size(), 0.0) {}

double FiveStencilField::max_abs_entry() const {
  double m = 0.0;
  for (const auto* v : {&c, &w, &e, &s, &n})
    for (double x : *v) m = std::max(m, std::abs(x));
  return m;
}

FaceCoefficients face_coefficients(const CellField& k, const BoundarySpec& bc) {
  if (!k.all_positive()) throw ConfigError("coefficient field must be strictly positive");
  const int m = k.side();
  FaceCoefficients faces(k.grid());
  for (int j = 0; j < m; ++j) {
    for (int i = 1; i < m; ++i) faces.x(i, j) = harmonic_face(k(i - 1, j), k(i, j));
    faces.x(0, j) = bc.left.is_dirichlet() ? 2.0 * k(0, j) : 0.0;
    faces.x(m, j) = bc.right.is_dirichlet() ? 2.0 * k(m - 1, j) : 0.0;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 1; j < m; ++j) faces.y(i, j) = harmonic_face(k(i, j - 1), k(i, j));
    faces.y(i, 0) = bc.bottom.is_dirichlet() ? 2.0 * k(i, 0) : 0.0;
    faces.y(i, m) = bc.top.is_dirichlet() ? 2.0 * k(i, m - 1) : 0.0;
  }
  return faces;
}

FiveStencilField stencil_from_faces(const FaceCoefficients& faces) {
  const int m = faces.side();
  const double inv_h2 = 1.0 / (faces.grid.h() * faces.grid.h());
  FiveStencilField op(faces.grid);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const std::size_t p = op.idx(i, j);
      const double tw = faces.x(i, j), te = faces.x(i + 1, j);
      const double ts = faces.y(i, j), tn = faces.y(i, j + 1);
      op.c[p] = (tw + te + ts + tn) * inv_h2;
      op.w[p] = i > 0 ? -tw * inv_h2 : 0.0;
      op.e[p] = i < m - 1 ? -te * inv_h2 : 0.0;
      op.s[p] = j > 0 ? -ts * inv_h2 : 0.0;
      op.n[p] = j < m - 1 ? -tn * inv_h2 : 0.0;
    }
  }
  return op;
}

FiveStencilField assemble_operator(const CellField& k, const BoundarySpec& bc) {
  const auto faces = face_coefficients(k, bc);
  auto op = stencil_from_faces(faces);
  const int m = k.side();
  const auto& grid = k.grid();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  for (int t = 0; t < m; ++t) {
    const double s = grid.center(t);
    if (bc.left.is_dirichlet()) op.rhs_bc[op.idx(0, t)] += faces.x(0, t) * bc.left.at(s) * inv_h2;
    if (bc.right.is_dirichlet()) op.rhs_bc[op.idx(m - 1, t)] += faces.x(m, t) * bc.right.at(s) * inv_h2;
    if (bc.bottom.is_dirichlet()) op.rhs_bc[op.idx(t, 0)] += faces.y(t, 0) * bc.bottom.at(s) * inv_h2;
    if (bc.top.is_dirichlet()) op.rhs_bc[op.idx(t, m - 1)] += faces.y(t, m) * bc.top.at(s) * inv_h2;
  }
  return op;
}

FaceCoefficients coarsen_face_coefficients(const FaceCoefficients& fine) {
  const auto coarse_grid = fine.grid.coarsened();
  const int mc = coarse_grid.cells_per_side();
  FaceCoefficients coarse(coarse_grid);
  for (int j = 0; j < mc; ++j)
    for (int i = 0; i <= mc; ++i)
      coarse.x(i, j) = 0.5 * (fine.x(2 * i, 2 * j) + fine.x(2 * i, 2 * j + 1));
  for (int j = 0; j <= mc; ++j)
    for (int i = 0; i < mc; ++i)
      coarse.y(i, j) = 0.5 * (fine.y(2 * i, 2 * j) + fine.y(2 * i + 1, 2 * j));
  return coarse;
}

FiveStencilField galerkin_product(const FiveStencilField& fine) {
  const auto coarse_grid = fine.grid.coarsened();
  const int m = fine.side();
  FiveStencilField coarse(coarse_grid);
  // Row (I, J) of 1/2 R L P: 1/8 times the sum over the four children of I of
  // their stencil entries, each routed to the parent of the neighbour it couples to.
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const std::size_t p = fine.idx(i, j);
      const int ci = i / 2, cj = j / 2;
      const std::size_t q = coarse.idx(ci, cj);
      const struct {
        double value;
        int di, dj;
      } entries[5] = {{fine.c[p], 0, 0}, {fine.w[p], -1, 0}, {fine.e[p], 1, 0},
                      {fine.s[p], 0, -1}, {fine.n[p], 0, 1}};
      for (const auto& en : entries) {
        if (en.value == 0.0) continue;
        const int ni = i + en.di, nj = j + en.dj;
        if (ni < 0 || nj < 0 || ni >= m || nj >= m)
          throw NumericalError("stencil couples to a cell outside the domain");
        const int pi = ni / 2 - ci, pj = nj / 2 - cj;
        const double v = en.value / 8.0;
        if (pi == 0 && pj == 0) coarse.c[q] += v;
        else if (pi == -1) coarse.w[q] += v;
        else if (pi == 1) coarse.e[q] += v;
        else if (pj == -1) coarse.s[q] += v;
        else coarse.n[q] += v;
      }
    }
  }
  return coarse;
}

double stencil_difference(const FiveStencilField& a, const FiveStencilField& b) {
  if (!(a.grid == b.grid)) throw ConfigError("stencil fields live on different grids");
  double d = 0.0;
  for (std::size_t p = 0; p < a.c.size(); ++p) {
    d = std::max({d, std::abs(a.c[p] - b.c[p]), std::abs(a.w[p] - b.w[p]), std::abs(a.e[p] - b.e[p]),
                  std::abs(a.s[p] - b.s[p]), std::abs(a.n[p] - b.n[p])});
  }
  return d;
}

void apply_operator(const FiveStencilField& op, const CellField& u, CellField& out) {
  const int m = op.side();
  const auto& uv = u.values();
  auto& ov = out.values();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const std::size_t p = op.idx(i, j);
      double r = op.c[p] * uv[p];
      if (i > 0) r += op.w[p] * uv[p - 1];
      if (i < m - 1) r += op.e[p] * uv[p + 1];
      if (j > 0) r += op.s[p] * uv[p - m];
      if (j < m - 1) r += op.n[p] * uv[p + m];
      ov[p] = r;
    }
  }
}

void residual(const FiveStencilField& op, const CellField& u, const CellField& f, CellField& out) {
  apply_operator(op, u, out);
  auto& ov = out.values();
  const auto& fv = f.values();
  for (std::size_t p = 0; p < ov.size(); ++p) ov[p] = fv[p] - ov[p];
}

double max_norm(const CellField& v) { return v.max_abs(); }

}  // namespace mglfa
