#include "mglfa/mlmc.hpp"

#include <algorithm>
#include <cmath>

#include "mglfa/error.hpp"
#include "mglfa/lfa.hpp"
#include "mglfa/parallel.hpp"
#include "mglfa/rng.hpp"

namespace mglfa {

namespace {

constexpr std::uint64_t kWarmupStream = 0x7761726d;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

double correlation_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

// Negated least-squares slope of y against x.
double negated_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return -sxy / sxx;
}

CycleSpec lfa_spec(const CycleSpec& cycle) {
  return CycleSpec::two_grid(cycle.smoother, cycle.transfers, cycle.nu1, cycle.nu2);
}

double window_rho(const LevelSampler& sampler, int level, std::uint64_t sample, const CycleSpec& cycle) {
  const CellField k = sampler.fine_field(level, sample);
  const int m = k.side();
  const int anchor = std::max(0, m / 2 - 4);
  const auto window = sample_window_from_field(k, anchor, anchor, std::min(8, m));
  return lfa::two_grid_rho(window, k.grid().h(), lfa_spec(cycle));
}

std::vector<CorrectionSample> run_level(const LevelSampler& sampler, int level, int count,
                                        const MlmcConfig& config) {
  std::vector<CorrectionSample> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), config.threads, [&](std::size_t i) {
    out[i] = correction_sample(sampler, level, i, config);
  });
  return out;
}

LevelStats summarize(int level, const MlmcConfig& config, const std::vector<CorrectionSample>& samples) {
  LevelStats st;
  st.level = level;
  st.h = config.h(level);
  st.N = static_cast<int>(samples.size());
  std::vector<double> y, qf, qc;
  double it_f = 0.0, it_c = 0.0;
  for (const auto& s : samples) {
    ++st.iteration_histogram[s.iterations_fine];
    it_f += s.iterations_fine;
    it_c += s.iterations_coarse;
    if (!s.converged) {
      ++st.failed;
      continue;
    }
    y.push_back(s.Y);
    qf.push_back(s.Q_fine);
    qc.push_back(s.Q_coarse);
  }
  st.mean_iterations = it_f / std::max(1, st.N);
  st.mean_iterations_coarse = level > 0 ? it_c / std::max(1, st.N) : 0.0;
  st.mean_Y = mean_of(y);
  st.var_Y = variance_of(y, st.mean_Y);
  st.mean_Q_fine = mean_of(qf);
  st.var_Q_fine = variance_of(qf, st.mean_Q_fine);
  if (level > 0) {
    st.mean_Q_coarse = mean_of(qc);
    st.correlation = correlation_of(qf, qc);
  }
  return st;
}

}  // namespace

void MlmcConfig::validate() const {
  if (L < 0) throw ConfigError("L must be nonnegative");
  if (coarsest_cells < cycle.coarsest_side || (coarsest_cells & (coarsest_cells - 1)) != 0)
    throw ConfigError("coarsest MLMC grid must be a power of two no smaller than the multigrid coarsest grid");
  if (samples.empty() && N_L < 2) throw ConfigError("N_L must be at least 2");
  if (!samples.empty()) {
    if (samples.size() != static_cast<std::size_t>(L + 1)) throw ConfigError("need one sample count per level");
    for (int n : samples)
      if (n < 2) throw ConfigError("every level needs at least 2 samples");
  }
  if (beta && *beta < 0.0) throw ConfigError("beta must be nonnegative");
  if (!(eps_mg > 0.0 && eps_mg < 1.0)) throw ConfigError("eps_mg must lie in (0, 1)");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (lfa_samples < 0 || warmup_samples < 2) throw ConfigError("invalid LFA or warm-up sample count");
  matern.validate();
  cycle.validate();
}

std::vector<int> allocate_samples(int L, int N_L, double beta) {
  if (L < 0 || N_L < 1 || beta < 0.0) throw ConfigError("invalid sample allocation input");
  std::vector<int> n(static_cast<std::size_t>(L + 1));
  for (int l = 0; l <= L; ++l) n[static_cast<std::size_t>(l)] = static_cast<int>(std::ceil(N_L * std::exp2(beta * (L - l)) - 1e-9));
  return n;
}

DarcySolution solve_darcy(const CellField& k, const CycleSpec& cycle, double eps, int max_iterations) {
  const auto bc = BoundarySpec::unit_pressure_drop();
  const Hierarchy hierarchy(k, bc, cycle);
  // The hierarchy keeps operators only; the boundary data comes from the assembly.
  const CellField f(k.grid(), assemble_operator(k, bc).rhs_bc);
  CellField u(k.grid(), 0.0);
  DarcySolution out;
  out.stats = solve(hierarchy, u, f, cycle, eps, max_iterations);
  const int m = k.side();
  double q = 0.0;
  for (int j = 0; j < m; ++j) q += k(m - 1, j) * u(m - 1, j);
  out.Q = 2.0 * q;
  return out;
}

LevelSampler::LevelSampler(const MaternParams& matern, int coarsest_cells, int finest_level,
                           std::uint64_t master_seed)
    : master_seed_(master_seed) {
  std::vector<UniformGrid> grids;
  for (int l = 0; l <= finest_level; ++l) grids.emplace_back(coarsest_cells << l);
  plans_ = plan_hierarchy(grids, isotropic_covariance(matern));
}

CellField LevelSampler::fine_field(int level, std::uint64_t sample) const {
  const auto& p = plan(level);
  return exponentiate(p.sample(draw_normals(p.embedding_side(), master_seed_, level, sample)));
}

std::pair<CellField, CellField> LevelSampler::pair_fields(int level, std::uint64_t sample) const {
  if (level < 1) throw ConfigError("pairs start at level 1");
  const auto& fine = plan(level);
  const NormalDraw y = draw_normals(fine.embedding_side(), master_seed_, level, sample);
  CellField kf = exponentiate(fine.sample(y));
  CellField kc = exponentiate(upscaled_field(plan(level - 1), upscale_normals(y)));
  return {std::move(kf), std::move(kc)};
}

CorrectionSample correction_sample(const LevelSampler& sampler, int level, std::uint64_t sample,
                                   const MlmcConfig& config) {
  CorrectionSample out;
  if (level == 0) {
    const auto s = solve_darcy(sampler.fine_field(0, sample), config.cycle, config.eps_mg, config.max_iterations);
    out.Q_fine = s.Q;
    out.Y = s.Q;
    out.iterations_fine = s.stats.iterations;
    out.converged = s.stats.converged;
    return out;
  }
  const auto [kf, kc] = sampler.pair_fields(level, sample);
  const auto sf = solve_darcy(kf, config.cycle, config.eps_mg, config.max_iterations);
  const auto sc = solve_darcy(kc, config.cycle, config.eps_mg, config.max_iterations);
  out.Q_fine = sf.Q;
  out.Q_coarse = sc.Q;
  out.Y = sf.Q - sc.Q;
  out.iterations_fine = sf.stats.iterations;
  out.iterations_coarse = sc.stats.iterations;
  out.converged = sf.stats.converged && sc.stats.converged;
  return out;
}

Rates estimate_rates(const std::vector<double>& means, const std::vector<double>& variances, int first_level) {
  if (means.size() < 3 || means.size() != variances.size()) throw ConfigError("rate fit needs at least 3 levels");
  std::vector<double> x, lm, lv;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] == 0.0 || !(variances[i] > 0.0)) throw NumericalError("degenerate level statistics in rate fit");
    x.push_back(first_level + static_cast<double>(i));
    lm.push_back(std::log2(std::abs(means[i])));
    lv.push_back(std::log2(variances[i]));
  }
  return {negated_slope(x, lm), negated_slope(x, lv)};
}

int predicted_iterations(double rho, double eps) {
  if (!(rho > 0.0) || rho >= 1.0) throw NumericalError("no convergence predicted for rho outside (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  return static_cast<int>(std::ceil(std::log(eps) / std::log(rho) - 1e-12));
}

double level_work(double c_bar, int nu, double iterations, double h) { return c_bar * nu * iterations / (h * h); }

void cost_report(MlmcResult& result, int nu, double c_bar) {
  result.total_work = 0.0;
  result.total_predicted_work = 0.0;
  for (auto& st : result.levels) {
    double w = level_work(c_bar, nu, st.mean_iterations, st.h);
    double wp = level_work(c_bar, nu, st.predicted_iterations, st.h);
    if (st.level > 0) {
      const double hc = 2.0 * st.h;
      w += level_work(c_bar, nu, st.mean_iterations_coarse, hc);
      // The coarse partner inherits the prediction of the level below.
      const auto& below = result.levels[static_cast<std::size_t>(st.level - 1)];
      wp += level_work(c_bar, nu, below.predicted_iterations, hc);
    }
    st.work = st.N * w;
    st.predicted_work = st.N * wp;
    result.total_work += st.work;
    result.total_predicted_work += st.predicted_work;
  }
}

double level_lfa_rho(const LevelSampler& sampler, int level, const CycleSpec& cycle, int count) {
  if (count < 1) throw ConfigError("need at least one LFA sample");
  double s = 0.0;
  for (int j = 0; j < count; ++j) s += window_rho(sampler, level, static_cast<std::uint64_t>(j), cycle);
  return s / count;
}

MlmcResult run_mlmc(const MlmcConfig& config) {
  config.validate();
  MlmcResult result;

  std::vector<int> counts = config.samples;
  if (counts.empty()) {
    if (config.beta) {
      result.beta_used = *config.beta;
    } else if (config.L == 0) {
      result.beta_used = 0.0;
    } else {
      if (config.L < 2) throw ConfigError("beta must be given when fewer than 3 levels are available for warm-up");
      // Warm-up on the three coarsest levels with an unrelated stream.
      const LevelSampler warm(config.matern, config.coarsest_cells, 2, stream_seed(config.master_seed, kWarmupStream));
      std::vector<double> v;
      for (int l = 1; l <= 2; ++l) v.push_back(summarize(l, config, run_level(warm, l, config.warmup_samples, config)).var_Y);
      if (!(v[0] > 0.0) || !(v[1] > 0.0)) throw NumericalError("warm-up variances vanish");
      result.beta_used = std::clamp(std::log2(v[0] / v[1]), 0.0, 4.0);
      result.warmup = true;
    }
    counts = allocate_samples(config.L, config.N_L, result.beta_used);
  }

  const LevelSampler sampler(config.matern, config.coarsest_cells, config.L, config.master_seed);
  for (int l = 0; l <= config.L; ++l)
    result.levels.push_back(summarize(l, config, run_level(sampler, l, counts[static_cast<std::size_t>(l)], config)));

  if (config.lfa_samples > 0) {
    const auto per = static_cast<std::size_t>(config.lfa_samples);
    std::vector<double> rho((config.L + 1) * per);
    parallel_for(rho.size(), config.threads, [&](std::size_t i) {
      rho[i] = window_rho(sampler, static_cast<int>(i / per), i % per, config.cycle);
    });
    for (auto& st : result.levels) {
      double s = 0.0;
      for (std::size_t j = 0; j < per; ++j) s += rho[static_cast<std::size_t>(st.level) * per + j];
      st.rho_lfa = s / static_cast<double>(per);
      st.predicted_iterations = predicted_iterations(st.rho_lfa, config.eps_mg);
    }
  }

  for (const auto& st : result.levels) {
    const int used = st.N - st.failed;
    if (used < 2) throw NumericalError("fewer than 2 converged samples on a level");
    result.estimate += st.mean_Y;
    result.estimator_variance += st.var_Y / used;
  }
  if (config.L >= 3) {
    std::vector<double> m, v;
    for (int l = 1; l <= config.L; ++l) {
      m.push_back(result.levels[static_cast<std::size_t>(l)].mean_Y);
      v.push_back(result.levels[static_cast<std::size_t>(l)].var_Y);
    }
    try {
      const Rates r = estimate_rates(m, v, 1);
      result.alpha = r.alpha;
      result.beta_fit = r.beta;
    } catch (const NumericalError&) {
      // Degenerate statistics (e.g. constant fields): leave the rates unset.
    }
  }
  cost_report(result, config.cycle.nu1 + config.cycle.nu2, config.c_bar);
  return result;
}

}  // namespace mglfa
