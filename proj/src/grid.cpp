#include "mglfa/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mglfa/error.hpp"
#include "mglfa/rng.hpp"

namespace mglfa {

UniformGrid::UniformGrid(int cells_per_side, double extent) : cells_(cells_per_side), extent_(extent) {
  if (cells_per_side < 2) throw ConfigError("grid needs at least 2 cells per side");
  if (!(extent > 0.0)) throw ConfigError("grid extent must be positive");
}

UniformGrid UniformGrid::coarsened() const {
  if (cells_ % 2 != 0) throw ConfigError("cannot coarsen a grid with an odd number of cells");
  return UniformGrid(cells_ / 2, extent_);
}

CellField::CellField(UniformGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

CellField::CellField(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("cell field size does not match grid");
}

double CellField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool CellField::all_positive() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v) && v > 0.0; });
}

CoefficientWindow::CoefficientWindow(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 2 || n % 2 != 0) throw ConfigError("LFA window side must be even and >= 2");
  if (values_.size() != static_cast<std::size_t>(n) * n)
    throw ConfigError("LFA window has wrong number of values");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("LFA window values must be positive");
}

CoefficientWindow::CoefficientWindow(int n, double fill)
    : CoefficientWindow(n, std::vector<double>(static_cast<std::size_t>(std::max(n, 0)) *
                                                   static_cast<std::size_t>(std::max(n, 0)),
                                               fill)) {}

double CoefficientWindow::periodic(int k, int l) const {
  auto wrap = [this](int a) { return ((a % n_) + n_) % n_; };
  return (*this)(wrap(k), wrap(l));
}

CoefficientWindow CoefficientWindow::shifted(int dk, int dl) const {
  std::vector<double> out(values_.size());
  for (int l = 0; l < n_; ++l)
    for (int k = 0; k < n_; ++k) out[static_cast<std::size_t>(l) * n_ + k] = periodic(k + dk, l + dl);
  return CoefficientWindow(n_, std::move(out));
}

std::string BenchmarkId::name() const {
  switch (kind) {
    case BenchmarkKind::VerticalJump: return "vertical-jump";
    case BenchmarkKind::FourCorner: return "four-corner";
    case BenchmarkKind::SquareInclusion: return k0 > 1.0 ? "square-inclusion:1e4" : "square-inclusion:1e-4";
    case BenchmarkKind::PeriodicSquares: return "periodic-squares";
    case BenchmarkKind::PeriodicLShapes: return "periodic-lshapes";
    case BenchmarkKind::RandomJump: return "random-jump:" + std::to_string(m);
  }
  return "unknown";
}

BenchmarkId parse_benchmark(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "vertical-jump") return BenchmarkId::vertical_jump();
  if (head == "four-corner") return BenchmarkId::four_corner();
  if (head == "periodic-squares") return BenchmarkId::periodic_squares();
  if (head == "periodic-lshapes") return BenchmarkId::periodic_lshapes();
  if (head == "square-inclusion") {
    const double k0 = arg.empty() ? 1e4 : std::stod(arg);
    if (k0 != 1e4 && k0 != 1e-4) throw ConfigError("square inclusion k0 must be 1e4 or 1e-4");
    return BenchmarkId::square_inclusion(k0);
  }
  if (head == "random-jump") {
    const int m = arg.empty() ? 0 : std::stoi(arg);
    if (m < 0) throw ConfigError("random jump magnitude must be nonnegative");
    return BenchmarkId::random_jump(m);
  }
  throw ConfigError("unknown benchmark '" + text + "'");
}

std::vector<BenchmarkId> deterministic_benchmarks() {
  return {BenchmarkId::vertical_jump(),          BenchmarkId::four_corner(),
          BenchmarkId::square_inclusion(1e4),    BenchmarkId::square_inclusion(1e-4),
          BenchmarkId::periodic_squares(),       BenchmarkId::periodic_lshapes()};
}

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Cells (0-based) with center x < 1/2 + h are exactly those with i <= M/2.
bool below_shifted_half(int i, int cells) { return 2 * i + 1 < cells + 2; }

// 2x2-cell inclusions of 1000 on a 4-cell period, occupying cells 1 and 2 of each
// period in both directions; background 1.
double periodic_squares_value(int i, int j) {
  const bool in_x = (i % 4 == 1) || (i % 4 == 2);
  const bool in_y = (j % 4 == 1) || (j % 4 == 2);
  return in_x && in_y ? 1000.0 : 1.0;
}

// 8x8-cell tile holding one L of unit width and arm length 3: column 3 over rows
// 5..7 and row 7 over columns 1..3. The L carries 1e4, the rest 1.
double periodic_lshape_value(int i, int j) {
  const int a = i % 8;
  const int b = j % 8;
  const bool in_l = (a == 3 && b >= 5) || (b == 7 && a >= 1 && a <= 3);
  return in_l ? 1e4 : 1.0;
}

double deterministic_value(const BenchmarkId& id, int i, int j, int cells) {
  switch (id.kind) {
    case BenchmarkKind::VerticalJump:
      return below_shifted_half(i, cells) ? 1.0 : 1e3;
    case BenchmarkKind::FourCorner: {
      const bool left = below_shifted_half(i, cells);
      const bool bottom = below_shifted_half(j, cells);
      if (left && bottom) return 1e4;
      if (left) return 1.0;
      if (!bottom) return 1e-2;
      return 1e-4;
    }
    case BenchmarkKind::SquareInclusion:
      return (i == cells / 2 - 1 && j == cells / 2 - 1) ? id.k0 : 1.0;
    case BenchmarkKind::PeriodicSquares:
      return periodic_squares_value(i, j);
    case BenchmarkKind::PeriodicLShapes:
      return periodic_lshape_value(i, j);
    case BenchmarkKind::RandomJump:
      break;
  }
  throw ConfigError("not a deterministic benchmark");
}

// e^U per block with U uniform on {-m, ..., m}; blocks are drawn row by row.
std::vector<double> random_block_values(int m, int blocks, std::uint64_t seed) {
  auto engine = make_engine(seed, 0x524a);
  std::uniform_int_distribution<int> dist(-m, m);
  std::vector<double> values(static_cast<std::size_t>(blocks) * blocks);
  for (double& v : values) v = std::exp(static_cast<double>(dist(engine)));
  return values;
}

}  // namespace

CellField make_benchmark_field(const BenchmarkId& id, int cells_per_side,
                               std::optional<std::uint64_t> rng_seed) {
  if (!is_power_of_two(cells_per_side) || cells_per_side < 2)
    throw ConfigError("benchmark grids need a power-of-two number of cells");
  const UniformGrid grid(cells_per_side);
  CellField field(grid);
  if (id.kind == BenchmarkKind::RandomJump) {
    if (!rng_seed) throw ConfigError("random-jump benchmark requires a seed");
    if (cells_per_side % 8 != 0) throw ConfigError("random-jump fields need M divisible by 8");
    const int block = cells_per_side / 8;
    const auto values = random_block_values(id.m, 8, *rng_seed);
    for (int j = 0; j < cells_per_side; ++j)
      for (int i = 0; i < cells_per_side; ++i)
        field(i, j) = values[static_cast<std::size_t>(j / block) * 8 + i / block];
    return field;
  }
  for (int j = 0; j < cells_per_side; ++j)
    for (int i = 0; i < cells_per_side; ++i) field(i, j) = deterministic_value(id, i, j, cells_per_side);
  return field;
}

CoefficientWindow make_lfa_window(const BenchmarkId& id, int n, std::optional<std::uint64_t> rng_seed) {
  if (n < 2 || n % 2 != 0) throw ConfigError("LFA window side must be even and >= 2");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  auto at = [&](int k, int l) -> double& { return values[static_cast<std::size_t>(l) * n + k]; };
  const int half = n / 2;
  switch (id.kind) {
    case BenchmarkKind::VerticalJump:
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) at(k, l) = k < half ? 1.0 : 1e3;
      break;
    case BenchmarkKind::FourCorner:
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          const bool left = k < half;
          const bool bottom = l < half;
          at(k, l) = left ? (bottom ? 1e4 : 1.0) : (bottom ? 1e-4 : 1e-2);
        }
      break;
    case BenchmarkKind::SquareInclusion:
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) at(k, l) = (k == half - 1 && l == half - 1) ? id.k0 : 1.0;
      break;
    case BenchmarkKind::PeriodicSquares:
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) at(k, l) = periodic_squares_value(k, l);
      break;
    case BenchmarkKind::PeriodicLShapes:
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) at(k, l) = periodic_lshape_value(k, l);
      break;
    case BenchmarkKind::RandomJump: {
      if (!rng_seed) throw ConfigError("random-jump window requires a seed");
      const auto block = random_block_values(id.m, 2, *rng_seed);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) at(k, l) = block[static_cast<std::size_t>(l / half) * 2 + k / half];
      break;
    }
  }
  return CoefficientWindow(n, std::move(values));
}

CoefficientWindow sample_window_from_field(const CellField& field, int anchor_i, int anchor_j, int n) {
  const int side = field.side();
  if (anchor_i < 0 || anchor_j < 0 || anchor_i + n > side || anchor_j + n > side)
    throw ConfigError("window anchor out of range");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) values[static_cast<std::size_t>(l) * n + k] = field(anchor_i + k, anchor_j + l);
  return CoefficientWindow(n, std::move(values));
}

}  // namespace mglfa
