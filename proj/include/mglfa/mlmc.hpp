#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mglfa/grid.hpp"
#include "mglfa/multigrid.hpp"
#include "mglfa/randfield.hpp"

namespace mglfa {

struct MlmcConfig {
  int L = 3;                     // finest level index
  int coarsest_cells = 8;        // 1 / h0
  int N_L = 64;                  // samples on the finest level
  std::optional<double> beta;    // variance decay; estimated by a warm-up run when absent
  std::vector<int> samples;      // explicit N_0..N_L, overrides N_L and beta
  MaternParams matern{0.5, 0.3, 1.0};
  CycleSpec cycle = CycleSpec::w_cycle(2, 2);
  double eps_mg = 1e-10;
  int max_iterations = 100;
  std::uint64_t master_seed = 1;
  int threads = 1;
  int lfa_samples = 5;           // fields per level for the predicted factor; 0 disables
  int warmup_samples = 200;
  double c_bar = 1.0;            // work units per smoothing step and cell

  int cells(int level) const { return coarsest_cells << level; }
  double h(int level) const { return 1.0 / cells(level); }
  void validate() const;
};

/// N_l = ceil(N_L 2^(beta (L - l))), l = 0..L.
std::vector<int> allocate_samples(int L, int N_L, double beta);

struct DarcySolution {
  double Q = 0.0;
  SolveStats stats;
};

/// Unit pressure drop in x, no-flux top and bottom, f = 0; Q = 2 sum_j k(M-1,j) u(M-1,j).
DarcySolution solve_darcy(const CellField& k, const CycleSpec& cycle, double eps, int max_iterations);

/// Log-permeability sampler shared by every level, with one embedding factor.
class LevelSampler {
 public:
  LevelSampler(const MaternParams& matern, int coarsest_cells, int finest_level, std::uint64_t master_seed);

  int finest_level() const { return static_cast<int>(plans_.size()) - 1; }
  const EmbeddingPlan& plan(int level) const { return plans_[static_cast<std::size_t>(level)]; }

  /// Permeability drawn directly on `level` (the fine role of pair `level`).
  CellField fine_field(int level, std::uint64_t sample) const;
  /// Fine permeability of pair `level` and its upscaled coarse partner on level - 1.
  std::pair<CellField, CellField> pair_fields(int level, std::uint64_t sample) const;

 private:
  std::vector<EmbeddingPlan> plans_;
  std::uint64_t master_seed_;
};

struct CorrectionSample {
  double Y = 0.0;
  double Q_fine = 0.0;
  double Q_coarse = 0.0;  // 0 on level 0
  int iterations_fine = 0;
  int iterations_coarse = 0;
  bool converged = true;
};

/// Y_0 = Q_h0 and Y_l = Q_hl - Q_h(l-1) with the coarse field upscaled from the same draw.
CorrectionSample correction_sample(const LevelSampler& sampler, int level, std::uint64_t sample,
                                   const MlmcConfig& config);

struct LevelStats {
  int level = 0;
  double h = 0.0;
  int N = 0;
  int failed = 0;  // non-converged samples, excluded from the moments
  double mean_Y = 0.0;
  double var_Y = 0.0;
  double mean_Q_fine = 0.0;
  double var_Q_fine = 0.0;
  double mean_Q_coarse = 0.0;
  double correlation = 0.0;  // between Q_fine and Q_coarse
  std::map<int, int> iteration_histogram;  // fine-role solves
  double mean_iterations = 0.0;
  double mean_iterations_coarse = 0.0;
  double rho_lfa = 0.0;
  int predicted_iterations = 0;
  double work = 0.0;            // N (W_l + W_(l-1)) with measured iterations
  double predicted_work = 0.0;  // same with predicted iterations
};

struct MlmcResult {
  double estimate = 0.0;
  double estimator_variance = 0.0;  // sum of V_l / N_l
  std::vector<LevelStats> levels;
  std::optional<double> alpha, beta_fit;
  double beta_used = 0.0;
  bool warmup = false;
  double total_work = 0.0;
  double total_predicted_work = 0.0;
};

struct Rates {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Negated least-squares slopes of log2|mean| and log2(variance) against the
/// level index; means[i] and variances[i] belong to level first_level + i.
Rates estimate_rates(const std::vector<double>& means, const std::vector<double>& variances,
                     int first_level = 1);

/// ceil(log eps / log rho).
int predicted_iterations(double rho, double eps);

/// W = c_bar nu k h^-2.
double level_work(double c_bar, int nu, double iterations, double h);

/// Fills work and predicted_work per level and the totals.
void cost_report(MlmcResult& result, int nu, double c_bar);

/// Mean two-grid LFA factor of the central 8 x 8 windows of `count` fine-role fields.
double level_lfa_rho(const LevelSampler& sampler, int level, const CycleSpec& cycle, int count);

MlmcResult run_mlmc(const MlmcConfig& config);

}  // namespace mglfa
