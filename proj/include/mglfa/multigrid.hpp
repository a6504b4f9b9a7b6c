#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mglfa/fv.hpp"
#include "mglfa/grid.hpp"

namespace mglfa {

enum class SmootherKind { GaussSeidelLex, Jacobi };
enum class CycleKind { V, W };
enum class ProlongationKind { Constant, WesselingKhalil };  // CP, WP
enum class RestrictionKind { Constant, WesselingKhalil };   // CR, WK

struct Smoother {
  SmootherKind kind = SmootherKind::GaussSeidelLex;
  double omega = 1.0;  // Jacobi damping

  static Smoother gauss_seidel() { return {SmootherKind::GaussSeidelLex, 1.0}; }
  static Smoother jacobi(double omega = 0.8) { return {SmootherKind::Jacobi, omega}; }
  std::string name() const;
};

struct TransferPair {
  ProlongationKind prolongation = ProlongationKind::Constant;
  RestrictionKind restriction = RestrictionKind::Constant;

  static TransferPair cp_cr() { return {ProlongationKind::Constant, RestrictionKind::Constant}; }
  static TransferPair wp_cr() { return {ProlongationKind::WesselingKhalil, RestrictionKind::Constant}; }
  static TransferPair wp_wk() {
    return {ProlongationKind::WesselingKhalil, RestrictionKind::WesselingKhalil};
  }
  std::string name() const;  // e.g. "(CP,CR)"
};

TransferPair parse_transfers(const std::string& text);
Smoother parse_smoother(const std::string& text);

struct CycleSpec {
  CycleKind cycle = CycleKind::W;
  int nu1 = 1;
  int nu2 = 1;
  Smoother smoother;
  TransferPair transfers;
  int coarsest_side = 4;
  int max_levels = 0;  // 0: coarsen down to coarsest_side; 2: two-grid

  static CycleSpec two_grid(Smoother s, TransferPair t, int nu1, int nu2) {
    return {CycleKind::V, nu1, nu2, s, t, 4, 2};
  }
  static CycleSpec w_cycle(int nu1, int nu2) {
    return {CycleKind::W, nu1, nu2, Smoother::gauss_seidel(), TransferPair::cp_cr(), 4, 0};
  }
  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm residuals, starting with the initial one
  double rho_measured = 0.0;
  double rho_mean_ratio = 0.0;  // arithmetic mean of the per-cycle reductions
  bool converged = false;
};

/// In-place smoothing sweeps for L u = f.
void smooth(const FiveStencilField& op, CellField& u, const CellField& f, const Smoother& smoother,
            int sweeps);

/// 1/4 of the sum of the four children.
CellField restrict_cr(const CellField& fine);
/// Copies each coarse value to its four children.
CellField prolong_cp(const CellField& coarse);
/// Wesseling/Khalil 16-point restriction; contributions from outside the domain are dropped.
CellField restrict_wk(const CellField& fine);
/// Exact adjoint of restrict_wk scaled by 4.
CellField prolong_wp(const CellField& coarse);

CellField restrict_field(const CellField& fine, RestrictionKind kind);
CellField prolong_field(const CellField& coarse, ProlongationKind kind);

/// Direct solver for the coarsest level (sparse LDL^T of the SPD five-point matrix).
class CoarseSolver {
 public:
  explicit CoarseSolver(const FiveStencilField& op);
  ~CoarseSolver();
  CoarseSolver(CoarseSolver&&) noexcept;
  CoarseSolver& operator=(CoarseSolver&&) noexcept;

  void solve(const CellField& f, CellField& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Operators from the finest grid down to the coarsest, built by arithmetic
/// averaging of face coefficients.
class Hierarchy {
 public:
  struct Level {
    FaceCoefficients faces;
    FiveStencilField op;
  };

  Hierarchy(const CellField& k, const BoundarySpec& bc, const CycleSpec& spec);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Level& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
  const FiveStencilField& finest() const { return levels_.front().op; }
  const CoarseSolver& coarse_solver() const { return *coarse_; }

 private:
  std::vector<Level> levels_;
  std::unique_ptr<CoarseSolver> coarse_;
};

/// One V- or W-cycle on the finest level of the hierarchy.
void mg_cycle(const Hierarchy& hierarchy, CellField& u, const CellField& f, const CycleSpec& spec);

/// Iterates cycles until ||f - L u||_inf < rel_tol * ||f - L u0||_inf or max_iterations.
SolveStats solve(const Hierarchy& hierarchy, CellField& u, const CellField& f, const CycleSpec& spec,
                 double rel_tol, int max_iterations);

/// Zero right-hand side and boundary data, uniform(0,1) initial guess from the seed,
/// rho = (||res^k|| / ||res^0||)^(1/k). Stops early once the residual drops below 1e-250.
SolveStats measure_asymptotic_rate(const CellField& k, const BoundarySpec& bc, const CycleSpec& spec,
                                   int iterations = 50, std::uint64_t seed = 0);

/// Mean of ||res^i|| / ||res^(i-1)|| over the recorded cycles; 0 if nothing was recorded.
double mean_cycle_factor(const std::vector<double>& residual_history);

struct RateStatistics {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Arithmetic mean and (N-1)-denominator standard deviation.
RateStatistics rate_statistics(const std::vector<double>& samples);

}  // namespace mglfa
