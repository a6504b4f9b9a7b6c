#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mglfa/grid.hpp"

namespace mglfa {

/// Condition on one side of the unit square. Dirichlet values are a function of
/// the coordinate running along the side.
struct SideCondition {
  enum class Type { Dirichlet, Neumann };
  Type type = Type::Dirichlet;
  std::function<double(double)> value;

  static SideCondition dirichlet(double g = 0.0) {
    return {Type::Dirichlet, [g](double) { return g; }};
  }
  static SideCondition dirichlet(std::function<double(double)> g) { return {Type::Dirichlet, std::move(g)}; }
  static SideCondition neumann() { return {Type::Neumann, {}}; }

  bool is_dirichlet() const { return type == Type::Dirichlet; }
  double at(double s) const { return value ? value(s) : 0.0; }
};

struct BoundarySpec {
  SideCondition left, right, bottom, top;

  static BoundarySpec homogeneous_dirichlet();
  /// u = 1 at x = 0, u = 0 at x = 1, zero normal flux at y = 0 and y = 1.
  static BoundarySpec unit_pressure_drop();
  bool any_dirichlet() const;
};

/// 2 k1 k2 / (k1 + k2). Throws ConfigError unless both inputs are positive.
double harmonic_face(double k1, double k2);

/// Face transmissibilities T (stencil entry = -T / h^2).
///   x_faces(i, j), i = 0..M: face between cells (i-1, j) and (i, j);
///   y_faces(i, j), j = 0..M: face between cells (i, j-1) and (i, j).
/// Boundary faces carry 2 k_cell for Dirichlet sides and 0 for Neumann sides.
struct FaceCoefficients {
  UniformGrid grid;
  std::vector<double> x_faces;  // size (M + 1) * M
  std::vector<double> y_faces;  // size M * (M + 1)

  explicit FaceCoefficients(UniformGrid g);
  int side() const { return grid.cells_per_side(); }
  double& x(int i, int j) { return x_faces[static_cast<std::size_t>(j) * (side() + 1) + i]; }
  double x(int i, int j) const { return x_faces[static_cast<std::size_t>(j) * (side() + 1) + i]; }
  double& y(int i, int j) { return y_faces[static_cast<std::size_t>(j) * side() + i]; }
  double y(int i, int j) const { return y_faces[static_cast<std::size_t>(j) * side() + i]; }
};

/// Per-cell five-point stencil plus the boundary contribution to the right-hand side.
/// Entries pointing out of the domain are stored as zero.
struct FiveStencilField {
  UniformGrid grid;
  std::vector<double> c, w, e, s, n;
  std::vector<double> rhs_bc;

  explicit FiveStencilField(UniformGrid g);
  int side() const { return grid.cells_per_side(); }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * side() + i; }
  double max_abs_entry() const;
};

FaceCoefficients face_coefficients(const CellField& k, const BoundarySpec& bc);
FiveStencilField stencil_from_faces(const FaceCoefficients& faces);

/// Cell-centered finite-volume operator for -div(k grad u) with harmonic face
/// averages and half-cell Dirichlet elimination.
FiveStencilField assemble_operator(const CellField& k, const BoundarySpec& bc);

/// Coarse face coefficient = arithmetic mean of the two fine faces lying on it.
FaceCoefficients coarsen_face_coefficients(const FaceCoefficients& fine);

/// Reference coarse operator 1/2 R L P with piecewise-constant P and R = P^T / 4,
/// computed entry by entry from the fine stencil.
FiveStencilField galerkin_product(const FiveStencilField& fine);

/// Max-norm of the entrywise difference of two stencil fields on the same grid.
double stencil_difference(const FiveStencilField& a, const FiveStencilField& b);

void apply_operator(const FiveStencilField& op, const CellField& u, CellField& out);
/// out = f - L u.
void residual(const FiveStencilField& op, const CellField& u, const CellField& f, CellField& out);
double max_norm(const CellField& v);

}  // namespace mglfa
