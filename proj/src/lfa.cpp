#include "mglfa/lfa.hpp"

#include <lapacke.h>

#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "mglfa/error.hpp"
#include "mglfa/fv.hpp"

namespace mglfa::lfa {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int a, int n) { return ((a % n) + n) % n; }

Complex phase(Frequency theta, double dx, double dy) {
  return std::polar(1.0, theta.x * dx + theta.y * dy);
}

void fill_entries(SubgridStencils& st) {
  const int n = st.n;
  const double inv_h2 = 1.0 / (st.h * st.h);
  const auto sz = static_cast<std::size_t>(n) * n;
  st.c.assign(sz, 0.0);
  st.w.assign(sz, 0.0);
  st.e.assign(sz, 0.0);
  st.s.assign(sz, 0.0);
  st.nn.assign(sz, 0.0);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const auto p = static_cast<std::size_t>(st.index(k, l));
      const double tw = st.x_face[p];
      const double te = st.x_face[static_cast<std::size_t>(st.index(wrap(k + 1, n), l))];
      const double ts = st.y_face[p];
      const double tn = st.y_face[static_cast<std::size_t>(st.index(k, wrap(l + 1, n)))];
      st.w[p] = -tw * inv_h2;
      st.e[p] = -te * inv_h2;
      st.s[p] = -ts * inv_h2;
      st.nn[p] = -tn * inv_h2;
      st.c[p] = (tw + te + ts + tn) * inv_h2;
    }
}

struct StencilMask {
  bool center = true, west = true, east = true, south = true, north = true;
};

SymbolMatrix assemble(const SubgridStencils& st, Frequency theta, StencilMask mask = {}) {
  const int n = st.n;
  SymbolMatrix m = SymbolMatrix::Zero(st.size(), st.size());
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const int p = st.index(k, l);
      const auto pu = static_cast<std::size_t>(p);
      if (mask.center) m(p, p) += st.c[pu];
      if (mask.west) m(p, st.index(wrap(k - 1, n), l)) += st.w[pu] * phase(theta, -1, 0);
      if (mask.east) m(p, st.index(wrap(k + 1, n), l)) += st.e[pu] * phase(theta, 1, 0);
      if (mask.south) m(p, st.index(k, wrap(l - 1, n))) += st.s[pu] * phase(theta, 0, -1);
      if (mask.north) m(p, st.index(k, wrap(l + 1, n))) += st.nn[pu] * phase(theta, 0, 1);
    }
  return m;
}

bool nearly_singular(const SymbolMatrix& m, double tol) {
  const Eigen::PartialPivLU<SymbolMatrix> lu(m);
  const auto d = lu.matrixLU().diagonal().cwiseAbs();
  const double big = d.maxCoeff();
  return !(big > 0.0) || d.minCoeff() < tol * big;
}

SymbolMatrix matrix_power(const SymbolMatrix& m, int p) {
  SymbolMatrix out = SymbolMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) out = out * m;
  return out;
}

// Wesseling/Khalil weights (times 16) for fine offset (dx, dy) in {-1..2}^2 from
// the lower-left child of the coarse cell; mirrors the real-space table.
constexpr double kWk[4][4] = {
    {0, 0, 1, 1},
    {0, 2, 3, 1},
    {1, 3, 2, 0},
    {1, 1, 0, 0},
};

SymbolMatrix restriction_symbol(RestrictionKind kind, int n, Frequency theta) {
  const int nc = n / 2;
  SymbolMatrix r = SymbolMatrix::Zero(nc * nc, n * n);
  for (int lc = 0; lc < nc; ++lc)
    for (int kc = 0; kc < nc; ++kc) {
      const int row = lc * nc + kc;
      auto add = [&](int dx, int dy, double weight) {
        if (weight == 0.0) return;
        const int q = wrap(2 * lc + dy, n) * n + wrap(2 * kc + dx, n);
        r(row, q) += weight * phase(theta, dx - 0.5, dy - 0.5);
      };
      if (kind == RestrictionKind::Constant) {
        for (int dy = 0; dy <= 1; ++dy)
          for (int dx = 0; dx <= 1; ++dx) add(dx, dy, 0.25);
      } else {
        for (int dy = -1; dy <= 2; ++dy)
          for (int dx = -1; dx <= 2; ++dx) add(dx, dy, kWk[dy + 1][dx + 1] / 16.0);
      }
    }
  return r;
}

}  // namespace

SubgridStencils build_subgrid_stencils(const CoefficientWindow& window, double h) {
  if (!(h > 0.0)) throw ConfigError("mesh width must be positive");
  SubgridStencils st;
  st.n = window.n();
  st.h = h;
  const auto sz = static_cast<std::size_t>(st.n) * st.n;
  st.x_face.resize(sz);
  st.y_face.resize(sz);
  for (int l = 0; l < st.n; ++l)
    for (int k = 0; k < st.n; ++k) {
      const auto p = static_cast<std::size_t>(st.index(k, l));
      st.x_face[p] = harmonic_face(window.periodic(k - 1, l), window(k, l));
      st.y_face[p] = harmonic_face(window.periodic(k, l - 1), window(k, l));
    }
  fill_entries(st);
  return st;
}

SubgridStencils coarsen_stencils(const SubgridStencils& fine) {
  if (fine.n % 2 != 0) throw ConfigError("cannot coarsen an odd LFA window");
  SubgridStencils st;
  st.n = fine.n / 2;
  st.h = 2.0 * fine.h;
  const auto sz = static_cast<std::size_t>(st.n) * st.n;
  st.x_face.resize(sz);
  st.y_face.resize(sz);
  for (int l = 0; l < st.n; ++l)
    for (int k = 0; k < st.n; ++k) {
      const auto p = static_cast<std::size_t>(st.index(k, l));
      st.x_face[p] = 0.5 * (fine.x_face[static_cast<std::size_t>(fine.index(2 * k, 2 * l))] +
                            fine.x_face[static_cast<std::size_t>(fine.index(2 * k, 2 * l + 1))]);
      st.y_face[p] = 0.5 * (fine.y_face[static_cast<std::size_t>(fine.index(2 * k, 2 * l))] +
                            fine.y_face[static_cast<std::size_t>(fine.index(2 * k + 1, 2 * l))]);
    }
  fill_entries(st);
  return st;
}

SymbolMatrix fine_symbol(const SubgridStencils& st, Frequency theta) { return assemble(st, theta); }

SymbolMatrix smoother_split_symbol(const SubgridStencils& st, Frequency theta, const Smoother& smoother,
                                   GsSplitting splitting) {
  if (smoother.kind == SmootherKind::Jacobi) {
    SymbolMatrix plus = SymbolMatrix::Zero(st.size(), st.size());
    for (int p = 0; p < st.size(); ++p) plus(p, p) = st.c[static_cast<std::size_t>(p)] / smoother.omega;
    return plus;
  }
  if (splitting == GsSplitting::OffsetLex) {
    return assemble(st, theta, StencilMask{true, true, false, true, false});
  }
  SymbolMatrix full = assemble(st, theta);
  return full.triangularView<Eigen::Lower>();
}

SymbolMatrix smoother_symbol(const SubgridStencils& st, Frequency theta, const Smoother& smoother,
                             GsSplitting splitting) {
  const SymbolMatrix l = fine_symbol(st, theta);
  const SymbolMatrix plus = smoother_split_symbol(st, theta, smoother, splitting);
  const Eigen::PartialPivLU<SymbolMatrix> lu(plus);
  const auto d = lu.matrixLU().diagonal().cwiseAbs();
  if (!(d.minCoeff() > 0.0)) throw NumericalError("singular smoother splitting");
  return SymbolMatrix::Identity(st.size(), st.size()) - lu.solve(l);
}

TransferSymbols transfer_symbols(const TransferPair& pair, int n, Frequency theta) {
  if (n < 2 || n % 2 != 0) throw ConfigError("transfer symbols need an even window");
  TransferSymbols t;
  t.restriction = restriction_symbol(pair.restriction, n, theta);
  const auto prolongation_kind = pair.prolongation == ProlongationKind::Constant
                                     ? RestrictionKind::Constant
                                     : RestrictionKind::WesselingKhalil;
  t.prolongation = 4.0 * restriction_symbol(prolongation_kind, n, theta).adjoint();
  return t;
}

SymbolMatrix coarse_symbol(const SubgridStencils& st, Frequency theta) {
  const auto coarse = coarsen_stencils(st);
  return assemble(coarse, Frequency{2.0 * theta.x, 2.0 * theta.y});
}

SymbolMatrix two_grid_symbol(const SubgridStencils& st, Frequency theta, const CycleSpec& spec,
                             GsSplitting splitting) {
  const SymbolMatrix lh = fine_symbol(st, theta);
  const SymbolMatrix l2h = coarse_symbol(st, theta);
  const auto t = transfer_symbols(spec.transfers, st.n, theta);
  const Eigen::PartialPivLU<SymbolMatrix> coarse_lu(l2h);
  const SymbolMatrix correction = SymbolMatrix::Identity(st.size(), st.size()) -
                                  t.prolongation * coarse_lu.solve(t.restriction * lh);
  if (spec.nu1 + spec.nu2 == 0) return correction;
  const SymbolMatrix s = smoother_symbol(st, theta, spec.smoother, splitting);
  return matrix_power(s, spec.nu2) * correction * matrix_power(s, spec.nu1);
}

double spectral_radius(const SymbolMatrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("spectral radius of a non-square matrix");
  SymbolMatrix a = m;
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<lapack_complex_double> eig(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                        reinterpret_cast<lapack_complex_double*>(a.data()), n, eig.data(),
                                        nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("eigenvalue solver failed");
  double r = 0.0;
  for (const auto& z : eig) r = std::max(r, std::abs(reinterpret_cast<const Complex&>(z)));
  return r;
}

std::vector<Frequency> sample_frequencies(int n, const FrequencySampling& sampling) {
  const int f = sampling.points_per_dim;
  if (f < 1) throw ConfigError("need at least one frequency per dimension");
  const double half = kPi / n;
  std::vector<Frequency> out;
  out.reserve(static_cast<std::size_t>(f) * f);
  for (int b = 0; b < f; ++b)
    for (int a = 0; a < f; ++a)
      out.push_back({-half + (a + 0.5) * 2.0 * half / f, -half + (b + 0.5) * 2.0 * half / f});
  return out;
}

double two_grid_rho(const CoefficientWindow& window, double h, const CycleSpec& spec,
                    const FrequencySampling& sampling, GsSplitting splitting) {
  spec.validate();
  const auto st = build_subgrid_stencils(window, h);
  double rho = 0.0;
  int used = 0;
  const auto thetas = sample_frequencies(st.n, sampling);
  // Real stencils: the symbols at -theta are the complex conjugates of those at theta,
  // and the midpoint grid is symmetric, so one of each pair suffices.
  for (std::size_t t = 0; t < (thetas.size() + 1) / 2; ++t) {
    const auto theta = thetas[t];
    if (nearly_singular(fine_symbol(st, theta), sampling.det_tolerance) ||
        nearly_singular(coarse_symbol(st, theta), sampling.det_tolerance))
      continue;
    rho = std::max(rho, spectral_radius(two_grid_symbol(st, theta, spec, splitting)));
    ++used;
  }
  if (used == 0) throw NumericalError("every sampled frequency was excluded as singular");
  return rho;
}

SymbolMatrix harmonic_basis_n2() {
  SymbolMatrix b(4, 4);
  for (int j = 0; j < 4; ++j) {
    const int k = j % 2, l = j / 2;
    for (int a = 0; a < 4; ++a) {
      const int x = a % 2, y = a / 2;
      b(a, j) = ((k * x + l * y) % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return b;
}

double smoothing_factor(const CoefficientWindow& window, double h, const Smoother& smoother,
                        const FrequencySampling& sampling, GsSplitting splitting) {
  if (window.n() != 2) throw ConfigError("smoothing factor is defined for 2x2 windows only");
  const auto st = build_subgrid_stencils(window, h);
  const SymbolMatrix b = harmonic_basis_n2();
  const SymbolMatrix b_inv = b.inverse();
  SymbolMatrix q = SymbolMatrix::Identity(4, 4);
  q(0, 0) = 0.0;
  const int f = sampling.points_per_dim;
  double mu = 0.0;
  // Grid of (-pi/2, pi/2]^2 that includes theta = 0 and the upper endpoints.
  for (int jb = 1; jb <= f; ++jb)
    for (int ja = 1; ja <= f; ++ja) {
      const Frequency theta{-kPi / 2 + ja * kPi / f, -kPi / 2 + jb * kPi / f};
      const SymbolMatrix s = smoother_symbol(st, theta, smoother, splitting);
      const SymbolMatrix projected = q * (b_inv * s * b) * q;
      mu = std::max(mu, spectral_radius(projected));
    }
  return mu;
}

LfaStatistics lfa_statistics(const std::vector<CoefficientWindow>& windows, double h, const CycleSpec& spec,
                             const FrequencySampling& sampling, GsSplitting splitting) {
  if (windows.empty()) throw ConfigError("LFA statistics of an empty window set");
  LfaStatistics out;
  for (const auto& w : windows) out.samples.push_back(two_grid_rho(w, h, spec, sampling, splitting));
  const auto stats = rate_statistics(out.samples);
  out.mean = stats.mean;
  out.stddev = stats.stddev;
  return out;
}

}  // namespace mglfa::lfa
