#include "mglfa/randfield.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <ostream>
#include <sstream>

#include "mglfa/error.hpp"
#include "mglfa/rng.hpp"

namespace mglfa {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

constexpr std::uint64_t kNormalStream = 0x6e6f726d616c0000ULL;

}  // namespace

void MaternParams::validate() const {
  if (!(nu > 0.0) || !(lambda > 0.0) || !(sigma2 > 0.0))
    throw ConfigError("Matern parameters must be positive");
}

void AnisoMaternParams::validate() const {
  if (!(nu > 0.0) || !(lambda_x > 0.0) || !(lambda_y > 0.0) || !(sigma2 > 0.0))
    throw ConfigError("anisotropic Matern parameters must be positive");
  if (!std::isfinite(theta)) throw ConfigError("rotation angle must be finite");
}

MaternParams reference_matern(int index) {
  switch (index) {
    case 1: return {1.5, 0.3, 1.0};
    case 2: return {0.5, 0.3, 1.0};
    case 3: return {1.5, 0.1, 3.0};
    case 4: return {0.5, 0.1, 3.0};
    default: throw ConfigError("reference Matern sets are numbered 1..4");
  }
}

MaternParams parse_matern(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.size() == 4 && lower.rfind("phi", 0) == 0 && lower[3] >= '1' && lower[3] <= '4')
    return reference_matern(lower[3] - '0');
  std::istringstream in(text);
  MaternParams p;
  char c1 = 0, c2 = 0;
  if (!(in >> p.nu >> c1 >> p.lambda >> c2 >> p.sigma2) || c1 != ',' || c2 != ',')
    throw ConfigError("cannot parse Matern parameters '" + text + "'");
  p.validate();
  return p;
}

double matern_scaled(double r_tilde, double nu, double sigma2) {
  const double x = 2.0 * std::sqrt(nu) * r_tilde;
  if (x <= 0.0) return sigma2;
  // Half-integer orders have elementary closed forms; use them for accuracy.
  if (nu == 0.5) return sigma2 * std::exp(-x);
  if (nu == 1.5) return sigma2 * (1.0 + x) * std::exp(-x);
  if (nu == 2.5) return sigma2 * (1.0 + x + x * x / 3.0) * std::exp(-x);
  if (x > 700.0) return 0.0;
  return sigma2 * std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) * std::cyl_bessel_k(nu, x);
}

double matern_cov(double r, const MaternParams& p) {
  if (r < 0.0) throw ConfigError("negative distance");
  return matern_scaled(r / p.lambda, p.nu, p.sigma2);
}

double aniso_matern_cov(double x1, double y1, double x2, double y2, const AnisoMaternParams& p) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double dx = x1 - x2, dy = y1 - y2;
  const double dxr = dx * c - dy * s;
  const double dyr = dx * s + dy * c;
  const double rt = std::sqrt(dxr * dxr / (p.lambda_x * p.lambda_x) + dyr * dyr / (p.lambda_y * p.lambda_y));
  return matern_scaled(rt, p.nu, p.sigma2);
}

LagCovariance isotropic_covariance(const MaternParams& p) {
  p.validate();
  return [p](double dx, double dy) { return matern_cov(std::hypot(dx, dy), p); };
}

LagCovariance anisotropic_covariance(const AnisoMaternParams& p) {
  p.validate();
  return [p](double dx, double dy) { return aniso_matern_cov(dx, dy, 0.0, 0.0, p); };
}

NormalDraw draw_normals(int side, std::uint64_t master_seed, int level, std::uint64_t sample) {
  if (side < 1) throw ConfigError("embedding side must be positive");
  NormalDraw d;
  d.side = side;
  d.master_seed = master_seed;
  d.level = level;
  d.sample = sample;
  d.y.resize(static_cast<std::size_t>(side) * side);
  auto engine = make_engine(master_seed, kNormalStream + static_cast<std::uint64_t>(level), sample);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : d.y) v = normal(engine);
  return d;
}

NormalDraw upscale_normals(const NormalDraw& fine) {
  if (fine.side < 2 || fine.side % 2 != 0) throw ConfigError("upscaling needs an even embedding side");
  NormalDraw c;
  c.side = fine.side / 2;
  c.master_seed = fine.master_seed;
  c.level = fine.level - 1;
  c.sample = fine.sample;
  c.averaging_steps = fine.averaging_steps + 1;
  c.y.resize(static_cast<std::size_t>(c.side) * c.side);
  const auto n = static_cast<std::size_t>(fine.side);
  for (int j = 0; j < c.side; ++j)
    for (int i = 0; i < c.side; ++i) {
      const std::size_t p = static_cast<std::size_t>(2 * j) * n + 2 * i;
      c.y[static_cast<std::size_t>(j) * c.side + i] =
          0.5 * (fine.y[p] + fine.y[p + 1] + fine.y[p + n] + fine.y[p + n + 1]);
    }
  return c;
}

struct EmbeddingPlan::Fft {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

EmbeddingPlan::EmbeddingPlan(UniformGrid grid, const LagCovariance& cov, int factor) : grid_(grid) {
  const int m = grid.cells_per_side();
  if (!is_power_of_two(m)) throw ConfigError("random fields need a power-of-two grid");
  if (factor < 2 || !is_power_of_two(factor)) throw ConfigError("embedding factor must be a power of two >= 2");
  side_ = factor * m;
  const int n = side_;
  const int nh = n / 2 + 1;
  const double h = grid.h();

  // First row of the block-circulant covariance with minimum-image lags.
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    const int dj = j <= n / 2 ? j : j - n;
    for (int i = 0; i < n; ++i) {
      const int di = i <= n / 2 ? i : i - n;
      c[static_cast<std::size_t>(j) * n + i] = cov(di * h, dj * h);
    }
  }
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n) * nh);
  fft_ = std::make_unique<Fft>();
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fft_->forward = fftw_plan_dft_r2c_2d(n, n, c.data(), reinterpret_cast<fftw_complex*>(spec.data()), flags);
    fft_->backward = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(spec.data()), c.data(),
                                          flags | FFTW_DESTROY_INPUT);
  }
  if (!fft_->forward || !fft_->backward) throw NumericalError("FFTW planning failed");
  fftw_execute_dft_r2c(fft_->forward, c.data(), reinterpret_cast<fftw_complex*>(spec.data()));

  double vmax = 0.0;
  for (const auto& z : spec) vmax = std::max(vmax, z.real());
  if (!(vmax > 0.0)) throw NumericalError("covariance spectrum has no positive values");
  spectrum_sqrt_.resize(spec.size());
  for (std::size_t p = 0; p < spec.size(); ++p) {
    const double v = spec[p].real();
    if (v < 0.0) {
      if (-v > kClipTolerance * vmax)
        throw NumericalError("circulant embedding is not positive semidefinite");
      ++clip_count_;
      spectrum_sqrt_[p] = 0.0;
    } else {
      spectrum_sqrt_[p] = std::sqrt(v);
    }
  }
}

EmbeddingPlan::~EmbeddingPlan() = default;
EmbeddingPlan::EmbeddingPlan(EmbeddingPlan&&) noexcept = default;
EmbeddingPlan& EmbeddingPlan::operator=(EmbeddingPlan&&) noexcept = default;

CellField EmbeddingPlan::sample(const NormalDraw& y) const {
  if (y.side != side_ || y.y.size() != static_cast<std::size_t>(side_) * side_)
    throw ConfigError("normal draw does not match the embedding grid");
  const int n = side_;
  const int nh = n / 2 + 1;
  std::vector<double> buf(y.y);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n) * nh);
  fftw_execute_dft_r2c(fft_->forward, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()));
  for (std::size_t p = 0; p < spec.size(); ++p) spec[p] *= spectrum_sqrt_[p];
  fftw_execute_dft_c2r(fft_->backward, reinterpret_cast<fftw_complex*>(spec.data()), buf.data());
  const int m = grid_.cells_per_side();
  const double scale = 1.0 / (static_cast<double>(n) * n);
  CellField z(grid_);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) z(i, j) = buf[static_cast<std::size_t>(j) * n + i] * scale;
  return z;
}

EmbeddingPlan plan_embedding(UniformGrid grid, const LagCovariance& cov) {
  for (int factor = 2;; factor *= 2) {
    try {
      return EmbeddingPlan(grid, cov, factor);
    } catch (const NumericalError&) {
      if (factor >= 8) throw;
    }
  }
}

std::vector<EmbeddingPlan> plan_hierarchy(const std::vector<UniformGrid>& grids, const LagCovariance& cov) {
  if (grids.empty()) throw ConfigError("empty grid hierarchy");
  for (std::size_t l = 1; l < grids.size(); ++l)
    if (grids[l].cells_per_side() != 2 * grids[l - 1].cells_per_side())
      throw ConfigError("grid hierarchy must double the cell count per level");
  for (int factor = 2; factor <= 8; factor *= 2) {
    std::vector<EmbeddingPlan> plans;
    try {
      for (const auto& g : grids) plans.emplace_back(g, cov, factor);
      return plans;
    } catch (const NumericalError&) {
      if (factor == 8) throw;
    }
  }
  throw NumericalError("unreachable");
}

CellField sample_field(const EmbeddingPlan& plan, const NormalDraw& y) { return plan.sample(y); }

CellField upscaled_field(const EmbeddingPlan& coarse_plan, const NormalDraw& y_coarse) {
  return coarse_plan.sample(y_coarse);
}

CellField exponentiate(const CellField& z) {
  CellField k(z.grid());
  for (std::size_t p = 0; p < z.values().size(); ++p) k.values()[p] = std::exp(z.values()[p]);
  return k;
}

void write_field_csv(std::ostream& out, const CellField& field) {
  const int m = field.side();
  char buf[40];
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", field(i, j));
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_field_binary(std::ostream& out, const CellField& field) {
  const std::int32_t side = field.side();
  char raw[8];
  std::memcpy(raw, &side, sizeof side);
  out.write(raw, sizeof side);
  for (double v : field.values()) {
    std::memcpy(raw, &v, sizeof v);
    out.write(raw, sizeof v);
  }
}

}  // namespace mglfa
