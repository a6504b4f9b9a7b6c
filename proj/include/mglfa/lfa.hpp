#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "mglfa/grid.hpp"
#include "mglfa/multigrid.hpp"

namespace mglfa::lfa {

using Complex = std::complex<double>;
using SymbolMatrix = Eigen::MatrixXcd;

/// Dimensionless frequency pair (physical frequency times h).
struct Frequency {
  double x = 0.0;
  double y = 0.0;
};

/// Constant five-point stencils on each of the n x n infinite subgrids obtained
/// from the periodic extension of a window. Subgrid (k, l) has basis index l * n + k.
struct SubgridStencils {
  int n = 0;
  double h = 1.0;
  // Transmissibilities of the periodic window: x_face[l*n + k] is the face between
  // (k-1, l) and (k, l) (wrapping), y_face[l*n + k] between (k, l-1) and (k, l).
  std::vector<double> x_face, y_face;
  std::vector<double> c, w, e, s, nn;

  int size() const { return n * n; }
  int index(int k, int l) const { return l * n + k; }
};

enum class GsSplitting {
  OffsetLex,          // L+ = diagonal and the west/south couplings (pointwise lexicographic)
  SubgridSequential,  // L+ = all couplings to subgrids earlier in basis order
};

struct FrequencySampling {
  int points_per_dim = 16;
  double det_tolerance = 1e-10;
};

SubgridStencils build_subgrid_stencils(const CoefficientWindow& window, double h);

/// Window of side n/2 and mesh 2h whose transmissibilities are the arithmetic
/// means of the fine ones.
SubgridStencils coarsen_stencils(const SubgridStencils& fine);

/// Entry (p, q) = sum over offsets d of subgrid p with (p + d) mod n = q of
/// stencil_p(d) exp(i theta . d).
SymbolMatrix fine_symbol(const SubgridStencils& st, Frequency theta);

SymbolMatrix smoother_split_symbol(const SubgridStencils& st, Frequency theta, const Smoother& smoother,
                                   GsSplitting splitting);

/// S = -(L+)^{-1} L- with L = L+ + L-.
SymbolMatrix smoother_symbol(const SubgridStencils& st, Frequency theta, const Smoother& smoother,
                             GsSplitting splitting = GsSplitting::OffsetLex);

struct TransferSymbols {
  SymbolMatrix restriction;   // (n^2/4) x n^2
  SymbolMatrix prolongation;  // n^2 x (n^2/4)
};

/// Restriction and prolongation in the fine/coarse subgrid bases. Coarse subgrid
/// (K, L) is centred at fine coordinates (2K + 1/2, 2L + 1/2).
TransferSymbols transfer_symbols(const TransferPair& pair, int n, Frequency theta);

/// Direct coarse operator at frequency 2 theta on the coarse subgrid lattice.
SymbolMatrix coarse_symbol(const SubgridStencils& st, Frequency theta);

/// S^nu2 (I - P L2h^{-1} R Lh) S^nu1.
SymbolMatrix two_grid_symbol(const SubgridStencils& st, Frequency theta, const CycleSpec& spec,
                             GsSplitting splitting = GsSplitting::OffsetLex);

double spectral_radius(const SymbolMatrix& m);

/// Midpoint samples of (-pi/n, pi/n]^2.
std::vector<Frequency> sample_frequencies(int n, const FrequencySampling& sampling);

/// Supremum of the two-grid spectral radius over the sampled frequencies.
double two_grid_rho(const CoefficientWindow& window, double h, const CycleSpec& spec,
                    const FrequencySampling& sampling = {},
                    GsSplitting splitting = GsSplitting::OffsetLex);

/// Smoothing factor for n = 2 via the change of basis to the four Fourier
/// harmonics and projection onto the three high ones.
double smoothing_factor(const CoefficientWindow& window, double h, const Smoother& smoother,
                        const FrequencySampling& sampling = {},
                        GsSplitting splitting = GsSplitting::OffsetLex);

/// Change of basis for n = 2: column j holds the subgrid components of the Fourier
/// harmonic theta + pi (k, l), j = l * 2 + k.
SymbolMatrix harmonic_basis_n2();

struct LfaStatistics {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> samples;
};

LfaStatistics lfa_statistics(const std::vector<CoefficientWindow>& windows, double h, const CycleSpec& spec,
                             const FrequencySampling& sampling = {},
                             GsSplitting splitting = GsSplitting::OffsetLex);

}  // namespace mglfa::lfa
