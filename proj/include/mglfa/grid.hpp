#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mglfa {

/// Uniform cell-centered grid on (0, extent)^2 with M cells per side.
/// Cell (i, j) has its center at ((i + 1/2) h, (j + 1/2) h), 0-based.
class UniformGrid {
 public:
  UniformGrid(int cells_per_side, double extent = 1.0);

  int cells_per_side() const { return cells_; }
  double extent() const { return extent_; }
  double h() const { return extent_ / cells_; }
  std::size_t size() const { return static_cast<std::size_t>(cells_) * cells_; }
  double center(int i) const { return (i + 0.5) * h(); }

  /// Grid with twice the cell width; throws if M is odd.
  UniformGrid coarsened() const;

  bool operator==(const UniformGrid& other) const {
    return cells_ == other.cells_ && extent_ == other.extent_;
  }

 private:
  int cells_;
  double extent_;
};

/// Per-cell scalar values, row-major with x fastest: value(i, j) = values[j * M + i].
class CellField {
 public:
  explicit CellField(UniformGrid grid, double fill = 0.0);
  CellField(UniformGrid grid, std::vector<double> values);

  const UniformGrid& grid() const { return grid_; }
  int side() const { return grid_.cells_per_side(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double max_abs() const;
  bool all_positive() const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * grid_.cells_per_side() + i;
  }

  UniformGrid grid_;
  std::vector<double> values_;
};

/// n x n block of coefficients whose periodic extension is analysed by LFA.
/// value(k, l) with k the x index; n is even and at least 2.
class CoefficientWindow {
 public:
  CoefficientWindow(int n, std::vector<double> values);
  CoefficientWindow(int n, double fill);

  int n() const { return n_; }
  double operator()(int k, int l) const { return values_[static_cast<std::size_t>(l) * n_ + k]; }
  double& operator()(int k, int l) { return values_[static_cast<std::size_t>(l) * n_ + k]; }
  /// Periodic access: indices are reduced modulo n.
  double periodic(int k, int l) const;
  const std::vector<double>& values() const { return values_; }

  /// Cyclic relabeling of the window by (dk, dl) cells.
  CoefficientWindow shifted(int dk, int dl) const;

 private:
  int n_;
  std::vector<double> values_;
};

enum class BenchmarkKind {
  VerticalJump,
  FourCorner,
  SquareInclusion,
  PeriodicSquares,
  PeriodicLShapes,
  RandomJump,
};

struct BenchmarkId {
  BenchmarkKind kind = BenchmarkKind::VerticalJump;
  double k0 = 1e4;  // square inclusion value, 1e4 or 1e-4
  int m = 0;        // random jump magnitude

  static BenchmarkId vertical_jump() { return {BenchmarkKind::VerticalJump}; }
  static BenchmarkId four_corner() { return {BenchmarkKind::FourCorner}; }
  static BenchmarkId square_inclusion(double k0) { return {BenchmarkKind::SquareInclusion, k0}; }
  static BenchmarkId periodic_squares() { return {BenchmarkKind::PeriodicSquares}; }
  static BenchmarkId periodic_lshapes() { return {BenchmarkKind::PeriodicLShapes}; }
  static BenchmarkId random_jump(int m) { return {BenchmarkKind::RandomJump, 1e4, m}; }

  std::string name() const;
  bool stochastic() const { return kind == BenchmarkKind::RandomJump; }
};

/// Parses names such as "vertical-jump", "square-inclusion:1e-4", "random-jump:5".
BenchmarkId parse_benchmark(const std::string& text);

/// The five deterministic benchmarks, with both square-inclusion contrasts.
std::vector<BenchmarkId> deterministic_benchmarks();

CellField make_benchmark_field(const BenchmarkId& id, int cells_per_side,
                               std::optional<std::uint64_t> rng_seed = std::nullopt);

CoefficientWindow make_lfa_window(const BenchmarkId& id, int n,
                                  std::optional<std::uint64_t> rng_seed = std::nullopt);

/// Copies the n x n block whose lower-left cell is (anchor_i, anchor_j).
CoefficientWindow sample_window_from_field(const CellField& field, int anchor_i, int anchor_j,
                                           int n);

}  // namespace mglfa
