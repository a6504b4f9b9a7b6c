#include "mglfa/multigrid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "mglfa/error.hpp"
#include "mglfa/rng.hpp"

namespace mglfa {

std::string Smoother::name() const {
  return kind == SmootherKind::GaussSeidelLex ? "GS" : "Jacobi";
}

std::string TransferPair::name() const {
  std::string p = prolongation == ProlongationKind::Constant ? "CP" : "WP";
  std::string r = restriction == RestrictionKind::Constant ? "CR" : "WK";
  return "(" + p + "," + r + ")";
}

TransferPair parse_transfers(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (ch != '(' && ch != ')' && ch != ' ') t += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (t == "CP,CR") return TransferPair::cp_cr();
  if (t == "WP,CR") return TransferPair::wp_cr();
  if (t == "WP,WK") return TransferPair::wp_wk();
  if (t == "CP,WK") return {ProlongationKind::Constant, RestrictionKind::WesselingKhalil};
  throw ConfigError("unknown transfer pair '" + text + "'");
}

Smoother parse_smoother(const std::string& text) {
  if (text == "gs" || text == "GS" || text == "gauss-seidel") return Smoother::gauss_seidel();
  if (text.rfind("jacobi", 0) == 0 || text.rfind("Jacobi", 0) == 0) {
    const auto colon = text.find(':');
    return Smoother::jacobi(colon == std::string::npos ? 0.8 : std::stod(text.substr(colon + 1)));
  }
  throw ConfigError("unknown smoother '" + text + "'");
}

void CycleSpec::validate() const {
  if (nu1 < 0 || nu2 < 0) throw ConfigError("smoothing counts must be nonnegative");
  if (smoother.kind == SmootherKind::Jacobi && !(smoother.omega > 0.0 && smoother.omega <= 1.0))
    throw ConfigError("Jacobi damping must lie in (0, 1]");
  if (coarsest_side < 2) throw ConfigError("coarsest grid side must be >= 2");
  if (max_levels < 0) throw ConfigError("max_levels must be nonnegative");
}

void smooth(const FiveStencilField& op, CellField& u, const CellField& f, const Smoother& smoother,
            int sweeps) {
  const int m = op.side();
  auto& uv = u.values();
  const auto& fv = f.values();
  if (smoother.kind == SmootherKind::GaussSeidelLex) {
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          const std::size_t p = op.idx(i, j);
          double r = fv[p];
          if (i > 0) r -= op.w[p] * uv[p - 1];
          if (i < m - 1) r -= op.e[p] * uv[p + 1];
          if (j > 0) r -= op.s[p] * uv[p - m];
          if (j < m - 1) r -= op.n[p] * uv[p + m];
          if (op.c[p] == 0.0) throw NumericalError("zero diagonal in Gauss-Seidel smoother");
          uv[p] = r / op.c[p];
        }
      }
    }
    return;
  }
  CellField res(u.grid());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    residual(op, u, f, res);
    const auto& rv = res.values();
    for (std::size_t p = 0; p < uv.size(); ++p) {
      if (op.c[p] == 0.0) throw NumericalError("zero diagonal in Jacobi smoother");
      uv[p] += smoother.omega * rv[p] / op.c[p];
    }
  }
}

CellField restrict_cr(const CellField& fine) {
  const auto cg = fine.grid().coarsened();
  CellField coarse(cg);
  for (int j = 0; j < cg.cells_per_side(); ++j)
    for (int i = 0; i < cg.cells_per_side(); ++i)
      coarse(i, j) = 0.25 * (fine(2 * i, 2 * j) + fine(2 * i + 1, 2 * j) + fine(2 * i, 2 * j + 1) +
                             fine(2 * i + 1, 2 * j + 1));
  return coarse;
}

CellField prolong_cp(const CellField& coarse) {
  const UniformGrid fg(coarse.side() * 2, coarse.grid().extent());
  CellField fine(fg);
  for (int j = 0; j < fg.cells_per_side(); ++j)
    for (int i = 0; i < fg.cells_per_side(); ++i) fine(i, j) = coarse(i / 2, j / 2);
  return fine;
}

namespace {

// Wesseling/Khalil weights (times 16) indexed [dy + 1][dx + 1] where the fine cell is
// (2I + dx, 2J + dy) for coarse cell (I, J), dx, dy in {-1, 0, 1, 2}.
constexpr double kWkWeights[4][4] = {
    {0, 0, 1, 1},
    {0, 2, 3, 1},
    {1, 3, 2, 0},
    {1, 1, 0, 0},
};

}  // namespace

CellField restrict_wk(const CellField& fine) {
  const auto cg = fine.grid().coarsened();
  const int mc = cg.cells_per_side(), mf = fine.side();
  CellField coarse(cg);
  for (int jc = 0; jc < mc; ++jc)
    for (int ic = 0; ic < mc; ++ic) {
      double acc = 0.0;
      for (int dy = -1; dy <= 2; ++dy)
        for (int dx = -1; dx <= 2; ++dx) {
          const int i = 2 * ic + dx, j = 2 * jc + dy;
          if (i < 0 || j < 0 || i >= mf || j >= mf) continue;
          acc += kWkWeights[dy + 1][dx + 1] * fine(i, j);
        }
      coarse(ic, jc) = acc / 16.0;
    }
  return coarse;
}

CellField prolong_wp(const CellField& coarse) {
  const int mc = coarse.side(), mf = 2 * mc;
  CellField fine(UniformGrid(mf, coarse.grid().extent()));
  for (int jc = 0; jc < mc; ++jc)
    for (int ic = 0; ic < mc; ++ic) {
      const double v = coarse(ic, jc) * (4.0 / 16.0);
      for (int dy = -1; dy <= 2; ++dy)
        for (int dx = -1; dx <= 2; ++dx) {
          const int i = 2 * ic + dx, j = 2 * jc + dy;
          if (i < 0 || j < 0 || i >= mf || j >= mf) continue;
          fine(i, j) += kWkWeights[dy + 1][dx + 1] * v;
        }
    }
  return fine;
}

CellField restrict_field(const CellField& fine, RestrictionKind kind) {
  return kind == RestrictionKind::Constant ? restrict_cr(fine) : restrict_wk(fine);
}

CellField prolong_field(const CellField& coarse, ProlongationKind kind) {
  return kind == ProlongationKind::Constant ? prolong_cp(coarse) : prolong_wp(coarse);
}

struct CoarseSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
  int side = 0;
};

CoarseSolver::CoarseSolver(const FiveStencilField& op) : impl_(std::make_unique<Impl>()) {
  const int m = op.side();
  impl_->side = m;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(op.c.size() * 5);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int p = static_cast<int>(op.idx(i, j));
      triplets.emplace_back(p, p, op.c[p]);
      if (i > 0) triplets.emplace_back(p, p - 1, op.w[p]);
      if (i < m - 1) triplets.emplace_back(p, p + 1, op.e[p]);
      if (j > 0) triplets.emplace_back(p, p - m, op.s[p]);
      if (j < m - 1) triplets.emplace_back(p, p + m, op.n[p]);
    }
  Eigen::SparseMatrix<double> a(m * m, m * m);
  a.setFromTriplets(triplets.begin(), triplets.end());
  impl_->factor.compute(a);
  if (impl_->factor.info() != Eigen::Success) throw NumericalError("coarsest-level factorization failed");
  const auto d = impl_->factor.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  if (!(d.minCoeff() > 1e-13 * scale))
    throw NumericalError("coarsest-level matrix is singular (pure Neumann problems are unsupported)");
}

CoarseSolver::~CoarseSolver() = default;
CoarseSolver::CoarseSolver(CoarseSolver&&) noexcept = default;
CoarseSolver& CoarseSolver::operator=(CoarseSolver&&) noexcept = default;

void CoarseSolver::solve(const CellField& f, CellField& u) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(f.values().data(), static_cast<Eigen::Index>(f.values().size()));
  Eigen::Map<Eigen::VectorXd> x(u.values().data(), static_cast<Eigen::Index>(u.values().size()));
  x = impl_->factor.solve(rhs);
}

Hierarchy::Hierarchy(const CellField& k, const BoundarySpec& bc, const CycleSpec& spec) {
  spec.validate();
  int side = k.side();
  while (side > spec.coarsest_side && side % 2 == 0) side /= 2;
  if (side != spec.coarsest_side)
    throw ConfigError("grid side must be the coarsest side times a power of two");
  auto faces = face_coefficients(k, bc);
  for (;;) {
    auto op = stencil_from_faces(faces);
    const bool last = faces.side() == spec.coarsest_side ||
                      (spec.max_levels > 0 && num_levels() + 1 == spec.max_levels);
    levels_.push_back({faces, std::move(op)});
    if (last) break;
    faces = coarsen_face_coefficients(levels_.back().faces);
  }
  coarse_ = std::make_unique<CoarseSolver>(levels_.back().op);
}

namespace {

struct Workspace {
  std::vector<CellField> u, f, r;
};

void cycle_level(const Hierarchy& h, Workspace& ws, int l, const CycleSpec& spec) {
  const auto& op = h.level(l).op;
  auto& u = ws.u[static_cast<std::size_t>(l)];
  const auto& f = ws.f[static_cast<std::size_t>(l)];
  if (l == h.num_levels() - 1) {
    h.coarse_solver().solve(f, u);
    return;
  }
  smooth(op, u, f, spec.smoother, spec.nu1);
  auto& r = ws.r[static_cast<std::size_t>(l)];
  residual(op, u, f, r);
  ws.f[static_cast<std::size_t>(l + 1)] = restrict_field(r, spec.transfers.restriction);
  auto& uc = ws.u[static_cast<std::size_t>(l + 1)];
  std::fill(uc.values().begin(), uc.values().end(), 0.0);
  const bool coarsest_next = l + 1 == h.num_levels() - 1;
  const int visits = (spec.cycle == CycleKind::W && !coarsest_next) ? 2 : 1;
  for (int v = 0; v < visits; ++v) cycle_level(h, ws, l + 1, spec);
  const auto correction = prolong_field(uc, spec.transfers.prolongation);
  auto& uv = u.values();
  const auto& cv = correction.values();
  for (std::size_t p = 0; p < uv.size(); ++p) uv[p] += cv[p];
  smooth(op, u, f, spec.smoother, spec.nu2);
}

Workspace make_workspace(const Hierarchy& h) {
  Workspace ws;
  for (int l = 0; l < h.num_levels(); ++l) {
    const auto& g = h.level(l).op.grid;
    ws.u.emplace_back(g);
    ws.f.emplace_back(g);
    ws.r.emplace_back(g);
  }
  return ws;
}

}  // namespace

void mg_cycle(const Hierarchy& hierarchy, CellField& u, const CellField& f, const CycleSpec& spec) {
  auto ws = make_workspace(hierarchy);
  ws.u[0] = u;
  ws.f[0] = f;
  cycle_level(hierarchy, ws, 0, spec);
  u = std::move(ws.u[0]);
}

SolveStats solve(const Hierarchy& hierarchy, CellField& u, const CellField& f, const CycleSpec& spec,
                 double rel_tol, int max_iterations) {
  auto ws = make_workspace(hierarchy);
  ws.u[0] = u;
  ws.f[0] = f;
  const auto& op = hierarchy.finest();
  CellField r(op.grid);
  residual(op, ws.u[0], ws.f[0], r);
  SolveStats stats;
  const double r0 = max_norm(r);
  stats.residual_history.push_back(r0);
  if (r0 == 0.0) {
    stats.converged = true;
    u = std::move(ws.u[0]);
    return stats;
  }
  while (stats.iterations < max_iterations) {
    cycle_level(hierarchy, ws, 0, spec);
    ++stats.iterations;
    residual(op, ws.u[0], ws.f[0], r);
    const double rk = max_norm(r);
    stats.residual_history.push_back(rk);
    if (rk < rel_tol * r0) {
      stats.converged = true;
      break;
    }
  }
  stats.rho_measured = std::pow(stats.residual_history.back() / r0, 1.0 / std::max(stats.iterations, 1));
  u = std::move(ws.u[0]);
  return stats;
}

SolveStats measure_asymptotic_rate(const CellField& k, const BoundarySpec& bc, const CycleSpec& spec,
                                   int iterations, std::uint64_t seed) {
  if (iterations < 1) throw ConfigError("need at least one iteration");
  BoundarySpec homogeneous = bc;
  for (auto* side : {&homogeneous.left, &homogeneous.right, &homogeneous.bottom, &homogeneous.top})
    if (side->is_dirichlet()) *side = SideCondition::dirichlet(0.0);
  const Hierarchy hierarchy(k, homogeneous, spec);
  auto ws = make_workspace(hierarchy);
  auto engine = make_engine(seed, 0x4d47);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double& v : ws.u[0].values()) v = unif(engine);
  const auto& op = hierarchy.finest();
  CellField r(op.grid);
  residual(op, ws.u[0], ws.f[0], r);
  SolveStats stats;
  const double r0 = max_norm(r);
  stats.residual_history.push_back(r0);
  for (int it = 0; it < iterations; ++it) {
    cycle_level(hierarchy, ws, 0, spec);
    ++stats.iterations;
    residual(op, ws.u[0], ws.f[0], r);
    stats.residual_history.push_back(max_norm(r));
    if (stats.residual_history.back() < 1e-250) break;
  }
  const double rk = stats.residual_history.back();
  stats.rho_measured = r0 > 0.0 ? std::pow(rk / r0, 1.0 / stats.iterations) : 0.0;
  stats.rho_mean_ratio = mean_cycle_factor(stats.residual_history);
  stats.converged = true;
  return stats;
}

double mean_cycle_factor(const std::vector<double>& residual_history) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 1; i < residual_history.size(); ++i) {
    if (!(residual_history[i - 1] > 0.0)) break;
    sum += residual_history[i] / residual_history[i - 1];
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

RateStatistics rate_statistics(const std::vector<double>& samples) {
  if (samples.empty()) throw ConfigError("rate statistics of an empty sample");
  if (samples.size() < 2) throw ConfigError("rate statistics need at least two samples");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

}  // namespace mglfa
