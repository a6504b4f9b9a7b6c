#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mglfa/grid.hpp"

namespace mglfa {

/// Isotropic Matérn parameters (smoothness, correlation length, variance).
struct MaternParams {
  double nu = 0.5;
  double lambda = 0.3;
  double sigma2 = 1.0;

  void validate() const;
};

/// The four reference sets, index 1..4: (1.5,0.3,1), (0.5,0.3,1), (1.5,0.1,3), (0.5,0.1,3).
MaternParams reference_matern(int index);
/// Accepts "phi1".."phi4" (any case) or "nu,lambda,sigma2".
MaternParams parse_matern(const std::string& text);

struct AnisoMaternParams {
  double nu = 0.5;
  double lambda_x = 0.3;
  double lambda_y = 0.01;
  double sigma2 = 1.0;
  double theta = 0.0;  // counterclockwise rotation of the principal axes

  void validate() const;
};

double matern_cov(double r, const MaternParams& p);
/// Matérn profile evaluated at the already scaled distance r_tilde.
double matern_scaled(double r_tilde, double nu, double sigma2);
double aniso_matern_cov(double x1, double y1, double x2, double y2, const AnisoMaternParams& p);

/// Stationary covariance as a function of the lag vector.
using LagCovariance = std::function<double(double dx, double dy)>;
LagCovariance isotropic_covariance(const MaternParams& p);
LagCovariance anisotropic_covariance(const AnisoMaternParams& p);

/// Standard normals on an N x N embedding grid, reproducible from (master_seed, level, sample).
struct NormalDraw {
  int side = 0;
  std::vector<double> y;  // row-major, x fastest
  std::uint64_t master_seed = 0;
  int level = 0;
  std::uint64_t sample = 0;
  int averaging_steps = 0;  // how many times this draw was upscaled from its origin
};

NormalDraw draw_normals(int side, std::uint64_t master_seed, int level, std::uint64_t sample);

/// y_coarse(I,J) = (1/2) * sum of the 2x2 fine block (2I..2I+1, 2J..2J+1).
NormalDraw upscale_normals(const NormalDraw& fine);

/// Circulant embedding of a stationary covariance on a periodic N x N grid (N = factor * M)
/// with the square-rooted eigenvalues of the embedded covariance.
class EmbeddingPlan {
 public:
  static constexpr double kClipTolerance = 1e-9;

  /// Fixed embedding factor; throws NumericalError if the spectrum has negative
  /// values beyond the clip tolerance.
  EmbeddingPlan(UniformGrid grid, const LagCovariance& cov, int factor);
  ~EmbeddingPlan();
  EmbeddingPlan(EmbeddingPlan&&) noexcept;
  EmbeddingPlan& operator=(EmbeddingPlan&&) noexcept;

  const UniformGrid& grid() const { return grid_; }
  int embedding_side() const { return side_; }
  int factor() const { return side_ / grid_.cells_per_side(); }
  int clip_count() const { return clip_count_; }
  const std::vector<double>& spectrum_sqrt() const { return spectrum_sqrt_; }  // N x (N/2+1)

  /// z restricted to the physical block (cells 0..M-1 in both directions).
  CellField sample(const NormalDraw& y) const;

 private:
  UniformGrid grid_;
  int side_ = 0;
  int clip_count_ = 0;
  std::vector<double> spectrum_sqrt_;
  struct Fft;
  std::unique_ptr<Fft> fft_;
};

/// Smallest factor in {2, 4, 8} whose embedding is positive semidefinite.
EmbeddingPlan plan_embedding(UniformGrid grid, const LagCovariance& cov);

/// Plans for a nested sequence of grids sharing one embedding factor, so that
/// upscale_normals maps the embedding grid of level l onto that of level l-1.
std::vector<EmbeddingPlan> plan_hierarchy(const std::vector<UniformGrid>& grids, const LagCovariance& cov);

CellField sample_field(const EmbeddingPlan& plan, const NormalDraw& y);
/// Coarse-level log-permeability from the upscaled draw; same map as sample_field.
CellField upscaled_field(const EmbeddingPlan& coarse_plan, const NormalDraw& y_coarse);

/// k = exp(z) elementwise.
CellField exponentiate(const CellField& z);

/// Header line "# key=value ..." is written by the caller; these emit the array only.
void write_field_csv(std::ostream& out, const CellField& field);
/// Little-endian int32 side, then side*side float64 values, row-major.
void write_field_binary(std::ostream& out, const CellField& field);

}  // namespace mglfa
