#include "mglfa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "mglfa/error.hpp"
#include "mglfa/parallel.hpp"
#include "mglfa/rng.hpp"

namespace mglfa::experiments {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("invalid value for '") + key + "'");
  }
}

std::vector<std::pair<int, int>> parse_smoothing(const Json& j) {
  std::vector<std::pair<int, int>> out;
  if (!j.is_array()) throw ConfigError("'smoothing' must be a list of [nu1, nu2] pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw ConfigError("'smoothing' entries must be [nu1, nu2]");
    out.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return out;
}

std::vector<std::string> string_list(const Json& j, const char* key, std::vector<std::string> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<std::string> out;
  if (!j.at(key).is_array()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
  for (const auto& s : j.at(key)) {
    if (!s.is_string()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

lfa::FrequencySampling parse_sampling(const Json& j) {
  lfa::FrequencySampling s;
  s.points_per_dim = get_or(j, "frequencies", s.points_per_dim);
  s.det_tolerance = get_or(j, "det_tolerance", s.det_tolerance);
  if (s.points_per_dim < 2) throw ConfigError("'frequencies' must be at least 2");
  return s;
}

std::ofstream open_out(const fs::path& path, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  written.push_back(path.string());
  return out;
}

int first_below(const std::vector<double>& history, double eps) {
  for (std::size_t k = 1; k < history.size(); ++k)
    if (history[k] < eps * history.front()) return static_cast<int>(k);
  return 0;
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string provenance_header(const Provenance& p) {
  return std::string("# mglfa ") + kVersion + " experiment=" + p.experiment + " seed=" + std::to_string(p.seed) +
         "\n# config=" + p.config.dump() + "\n";
}

Json provenance_json(const Provenance& p) {
  return {{"tool", "mglfa"}, {"version", kVersion}, {"experiment", p.experiment}, {"seed", p.seed},
          {"config", p.config}};
}

CycleSpec parse_cycle(const Json& j, CycleSpec fallback) {
  if (j.is_null()) return fallback;
  check_keys(j, {"type", "nu1", "nu2", "smoother", "transfers", "coarsest", "max_levels"}, "cycle");
  CycleSpec c = fallback;
  const std::string type = get_or<std::string>(j, "type", c.cycle == CycleKind::W ? "W" : "V");
  if (type == "W" || type == "w") c.cycle = CycleKind::W;
  else if (type == "V" || type == "v") c.cycle = CycleKind::V;
  else throw ConfigError("cycle type must be V or W");
  c.nu1 = get_or(j, "nu1", c.nu1);
  c.nu2 = get_or(j, "nu2", c.nu2);
  if (j.contains("smoother")) c.smoother = parse_smoother(get_or<std::string>(j, "smoother", ""));
  if (j.contains("transfers")) c.transfers = parse_transfers(get_or<std::string>(j, "transfers", ""));
  c.coarsest_side = get_or(j, "coarsest", c.coarsest_side);
  c.max_levels = get_or(j, "max_levels", c.max_levels);
  c.validate();
  return c;
}

MaternParams parse_matern_json(const Json& j) {
  if (j.is_string()) return parse_matern(j.get<std::string>());
  check_keys(j, {"nu", "lambda", "sigma2"}, "matern");
  MaternParams p;
  p.nu = get_or(j, "nu", p.nu);
  p.lambda = get_or(j, "lambda", p.lambda);
  p.sigma2 = get_or(j, "sigma2", p.sigma2);
  p.validate();
  return p;
}

lfa::GsSplitting parse_splitting(const std::string& s) {
  if (s == "offset-lex") return lfa::GsSplitting::OffsetLex;
  if (s == "subgrid-sequential") return lfa::GsSplitting::SubgridSequential;
  throw ConfigError("splitting must be offset-lex or subgrid-sequential");
}

// ---------------------------------------------------------------------------
// Jumping-coefficient benchmarks

std::vector<BenchmarkCase> table1_cases() {
  std::vector<BenchmarkCase> cases;
  for (const auto& b : deterministic_benchmarks())
    for (const auto& s : {Smoother::jacobi(0.8), Smoother::gauss_seidel()})
      for (const auto& t : {TransferPair::cp_cr(), TransferPair::wp_cr()})
        for (auto [nu1, nu2] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 2}}) cases.push_back({b, s, t, nu1, nu2, 8});
  return cases;
}

BenchmarkOptions parse_benchmark_options(const Json& config, std::uint64_t seed, int threads) {
  check_keys(config, {"benchmarks", "smoothers", "transfers", "smoothing", "windows", "frequencies", "det_tolerance",
                      "cells", "iterations", "seed"},
             "benchmark config");
  BenchmarkOptions o;
  o.seed = seed;
  o.threads = threads;
  o.sampling = parse_sampling(config);
  o.cells = get_or(config, "cells", o.cells);
  o.iterations = get_or(config, "iterations", o.iterations);
  if (o.iterations < 1) throw ConfigError("'iterations' must be positive");
  std::vector<BenchmarkId> benchmarks;
  if (config.contains("benchmarks")) {
    for (const auto& name : string_list(config, "benchmarks", {})) benchmarks.push_back(parse_benchmark(name));
  } else {
    benchmarks = deterministic_benchmarks();
  }
  std::vector<Smoother> smoothers;
  for (const auto& s : string_list(config, "smoothers", {"jacobi:0.8", "gs"})) smoothers.push_back(parse_smoother(s));
  std::vector<TransferPair> transfers;
  for (const auto& t : string_list(config, "transfers", {"CP,CR", "WP,CR"})) transfers.push_back(parse_transfers(t));
  const auto smoothing =
      config.contains("smoothing") ? parse_smoothing(config.at("smoothing")) : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 2}};
  std::vector<int> windows = get_or<std::vector<int>>(config, "windows", {8});
  for (int n : windows)
    if (n < 2 || n % 2) throw ConfigError("windows must be even and at least 2");
  for (const auto& b : benchmarks) {
    if (b.stochastic()) throw ConfigError("benchmark suites take deterministic benchmarks only");
    for (const auto& s : smoothers)
      for (const auto& t : transfers)
        for (auto [nu1, nu2] : smoothing) {
          if (nu1 < 0 || nu2 < 0 || nu1 + nu2 < 1) throw ConfigError("need at least one smoothing step");
          for (int n : windows) o.cases.push_back({b, s, t, nu1, nu2, n});
        }
  }
  return o;
}

std::vector<BenchmarkRow> run_benchmark_suite(const BenchmarkOptions& opts, bool measure) {
  std::vector<BenchmarkRow> rows(opts.cases.size());
  const double h = 1.0 / opts.cells;
  parallel_for(rows.size(), opts.threads, [&](std::size_t i) {
    const auto& c = opts.cases[i];
    BenchmarkRow r;
    r.c = c;
    const auto spec = CycleSpec::two_grid(c.smoother, c.transfers, c.nu1, c.nu2);
    const auto window = make_lfa_window(c.benchmark, c.window);
    r.rho_lfa = lfa::two_grid_rho(window, h, spec, opts.sampling, lfa::GsSplitting::OffsetLex);
    r.rho_lfa_subgrid = c.smoother.kind == SmootherKind::Jacobi
                            ? r.rho_lfa
                            : lfa::two_grid_rho(window, h, spec, opts.sampling, lfa::GsSplitting::SubgridSequential);
    if (measure) {
      const auto field = make_benchmark_field(c.benchmark, opts.cells);
      const auto st = measure_asymptotic_rate(field, BoundarySpec::homogeneous_dirichlet(), spec, opts.iterations, opts.seed);
      r.rho_measured = st.rho_mean_ratio;
      r.rho_measured_geometric = st.rho_measured;
    }
    rows[i] = r;
  });
  return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows, const Provenance& prov,
                         bool measured) {
  out << provenance_header(prov);
  out << "benchmark,smoother,transfers,nu1,nu2,window,rho_lfa,rho_lfa_subgrid";
  if (measured) out << ",rho_measured,rho_measured_geometric";
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.c.benchmark.name()) << ',' << r.c.smoother.name() << ',' << csv_field(r.c.transfers.name())
        << ',' << r.c.nu1 << ',' << r.c.nu2 << ',' << r.c.window << ',' << fmt(r.rho_lfa) << ','
        << fmt(r.rho_lfa_subgrid);
    if (measured) out << ',' << fmt(r.rho_measured) << ',' << fmt(r.rho_measured_geometric);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Random-coefficient study

RandomStudyOptions parse_random_options(const Json& config, std::uint64_t seed, int threads) {
  check_keys(config, {"field", "matern", "m", "cells", "samples", "smoothing", "cycle", "iterations", "window", "eps",
                      "frequencies", "det_tolerance", "seed"},
             "random-lfa config");
  RandomStudyOptions o;
  o.seed = seed;
  o.threads = threads;
  const std::string field = get_or<std::string>(config, "field", "matern");
  if (field == "matern") o.field = RandomStudyOptions::Field::Matern;
  else if (field == "random-jump") o.field = RandomStudyOptions::Field::RandomJump;
  else throw ConfigError("field must be matern or random-jump");
  if (config.contains("matern")) o.matern = parse_matern_json(config.at("matern"));
  o.m = get_or(config, "m", o.m);
  o.cells = get_or(config, "cells", o.cells);
  o.samples = get_or(config, "samples", o.samples);
  if (config.contains("smoothing")) o.smoothing = parse_smoothing(config.at("smoothing"));
  o.cycle = parse_cycle(config.contains("cycle") ? config.at("cycle") : Json(), o.cycle);
  o.iterations = get_or(config, "iterations", o.iterations);
  o.window = get_or(config, "window", o.window);
  o.eps = get_or(config, "eps", o.eps);
  o.sampling = parse_sampling(config);
  if (o.m < 0) throw ConfigError("'m' must be nonnegative");
  if (o.samples < 2) throw ConfigError("'samples' must be at least 2");
  if (o.iterations < 1) throw ConfigError("'iterations' must be positive");
  if (o.window < 2 || o.window % 2 || o.window > o.cells) throw ConfigError("invalid LFA window size");
  if (!(o.eps > 0.0 && o.eps < 1.0)) throw ConfigError("'eps' must lie in (0, 1)");
  if (o.field == RandomStudyOptions::Field::RandomJump && o.cells % 8) throw ConfigError("random jumps need cells divisible by 8");
  for (auto [a, b] : o.smoothing)
    if (a < 0 || b < 0 || a + b < 1) throw ConfigError("need at least one smoothing step");
  return o;
}

CellField random_study_field(const RandomStudyOptions& opts, int sample) {
  if (opts.field == RandomStudyOptions::Field::RandomJump)
    return make_benchmark_field(BenchmarkId::random_jump(opts.m), opts.cells,
                                stream_seed(opts.seed, 0x726a, static_cast<std::uint64_t>(sample)));
  // A plan per call keeps this function self-contained; run_random_study shares one.
  const auto plan = plan_embedding(UniformGrid(opts.cells), isotropic_covariance(opts.matern));
  return exponentiate(plan.sample(draw_normals(plan.embedding_side(), opts.seed, 0, static_cast<std::uint64_t>(sample))));
}

RandomStudy run_random_study(const RandomStudyOptions& opts) {
  std::optional<EmbeddingPlan> plan;
  if (opts.field == RandomStudyOptions::Field::Matern)
    plan.emplace(plan_embedding(UniformGrid(opts.cells), isotropic_covariance(opts.matern)));
  auto field_of = [&](int s) {
    if (!plan) return random_study_field(opts, s);
    return exponentiate(plan->sample(draw_normals(plan->embedding_side(), opts.seed, 0, static_cast<std::uint64_t>(s))));
  };

  const std::size_t per = opts.smoothing.size();
  std::vector<RandomSampleRow> rows(static_cast<std::size_t>(opts.samples) * per);
  parallel_for(rows.size(), opts.threads, [&](std::size_t i) {
    const int s = static_cast<int>(i / per);
    const auto [nu1, nu2] = opts.smoothing[i % per];
    const CellField k = field_of(s);
    CycleSpec cycle = opts.cycle;
    cycle.nu1 = nu1;
    cycle.nu2 = nu2;
    const auto st = measure_asymptotic_rate(k, BoundarySpec::homogeneous_dirichlet(), cycle, opts.iterations,
                                            stream_seed(opts.seed, 0x6d67, static_cast<std::uint64_t>(s)));
    const int anchor = opts.cells / 2 - opts.window / 2;
    const auto window = sample_window_from_field(k, anchor, anchor, opts.window);
    RandomSampleRow r;
    r.sample = s;
    r.nu1 = nu1;
    r.nu2 = nu2;
    r.rho_lfa = lfa::two_grid_rho(window, k.grid().h(),
                                  CycleSpec::two_grid(cycle.smoother, cycle.transfers, nu1, nu2), opts.sampling);
    r.rho_measured = st.rho_measured;
    r.rho_mean_ratio = st.rho_mean_ratio;
    r.iterations_to_eps = first_below(st.residual_history, opts.eps);
    rows[i] = r;
  });

  RandomStudy study;
  study.samples = rows;
  for (std::size_t p = 0; p < per; ++p) {
    std::vector<double> mg, lf;
    for (std::size_t s = 0; s < static_cast<std::size_t>(opts.samples); ++s) {
      mg.push_back(rows[s * per + p].rho_measured);
      lf.push_back(rows[s * per + p].rho_lfa);
    }
    study.summary.push_back({opts.smoothing[p].first, opts.smoothing[p].second, rate_statistics(mg), rate_statistics(lf)});
  }
  return study;
}

void write_random_csv(std::ostream& samples, std::ostream& summary, std::ostream& histogram,
                      const RandomStudy& study, const Provenance& prov) {
  samples << provenance_header(prov) << "sample,nu1,nu2,rho_lfa,rho_measured,rho_mean_ratio,iterations_to_eps\n";
  for (const auto& r : study.samples)
    samples << r.sample << ',' << r.nu1 << ',' << r.nu2 << ',' << fmt(r.rho_lfa) << ',' << fmt(r.rho_measured) << ','
            << fmt(r.rho_mean_ratio) << ',' << r.iterations_to_eps << '\n';

  summary << provenance_header(prov) << "nu1,nu2,mean_mg,stddev_mg,mean_lfa,stddev_lfa\n";
  for (const auto& s : study.summary)
    summary << s.nu1 << ',' << s.nu2 << ',' << fmt(s.mg.mean) << ',' << fmt(s.mg.stddev) << ',' << fmt(s.lfa.mean)
            << ',' << fmt(s.lfa.stddev) << '\n';

  std::map<std::pair<int, int>, std::map<int, int>> hist;
  for (const auto& r : study.samples) ++hist[{r.nu1, r.nu2}][r.iterations_to_eps];
  histogram << provenance_header(prov) << "nu1,nu2,iterations,count\n";
  for (const auto& [key, counts] : hist)
    for (const auto& [it, n] : counts) histogram << key.first << ',' << key.second << ',' << it << ',' << n << '\n';
}

// ---------------------------------------------------------------------------
// MLMC

MlmcConfig parse_mlmc_config(const Json& config, std::uint64_t seed, int threads) {
  check_keys(config, {"L", "coarsest_cells", "N_L", "beta", "samples", "matern", "cycle", "eps_mg", "max_iterations",
                      "lfa_samples", "warmup_samples", "c_bar", "seed"},
             "mlmc config");
  MlmcConfig c;
  c.master_seed = seed;
  c.threads = threads;
  c.L = get_or(config, "L", c.L);
  c.coarsest_cells = get_or(config, "coarsest_cells", c.coarsest_cells);
  c.N_L = get_or(config, "N_L", c.N_L);
  if (config.contains("beta") && !config.at("beta").is_null()) c.beta = get_or(config, "beta", 2.0);
  c.samples = get_or<std::vector<int>>(config, "samples", {});
  if (config.contains("matern")) c.matern = parse_matern_json(config.at("matern"));
  c.cycle = parse_cycle(config.contains("cycle") ? config.at("cycle") : Json(), c.cycle);
  c.eps_mg = get_or(config, "eps_mg", c.eps_mg);
  c.max_iterations = get_or(config, "max_iterations", c.max_iterations);
  c.lfa_samples = get_or(config, "lfa_samples", c.lfa_samples);
  c.warmup_samples = get_or(config, "warmup_samples", c.warmup_samples);
  c.c_bar = get_or(config, "c_bar", c.c_bar);
  c.validate();
  return c;
}

Json mlmc_json(const MlmcResult& r, const Provenance& prov) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    Json hist = Json::array();
    for (const auto& [it, n] : l.iteration_histogram) hist.push_back({{"iterations", it}, {"count", n}});
    levels.push_back({{"level", l.level},
                      {"h", l.h},
                      {"N", l.N},
                      {"failed", l.failed},
                      {"mean_Y", l.mean_Y},
                      {"var_Y", l.var_Y},
                      {"mean_Q_fine", l.mean_Q_fine},
                      {"var_Q_fine", l.var_Q_fine},
                      {"mean_Q_coarse", l.mean_Q_coarse},
                      {"correlation", l.correlation},
                      {"mean_iterations", l.mean_iterations},
                      {"mean_iterations_coarse", l.mean_iterations_coarse},
                      {"rho_lfa", l.rho_lfa},
                      {"predicted_iterations", l.predicted_iterations},
                      {"work", l.work},
                      {"predicted_work", l.predicted_work},
                      {"iteration_histogram", hist}});
  }
  Json out = {{"provenance", provenance_json(prov)},
              {"estimate", r.estimate},
              {"estimator_variance", r.estimator_variance},
              {"alpha", r.alpha ? Json(*r.alpha) : Json()},
              {"beta_fit", r.beta_fit ? Json(*r.beta_fit) : Json()},
              {"beta_used", r.beta_used},
              {"warmup", r.warmup},
              {"total_work", r.total_work},
              {"total_predicted_work", r.total_predicted_work},
              {"levels", levels}};
  return out;
}

void write_mlmc_levels_csv(std::ostream& out, const MlmcResult& r, const Provenance& prov) {
  out << provenance_header(prov)
      << "level,h,N,mean_Y,var_Y,mean_iters,predicted_iters,failed,rho_lfa,correlation,work,predicted_work\n";
  for (const auto& l : r.levels)
    out << l.level << ',' << fmt(l.h) << ',' << l.N << ',' << fmt(l.mean_Y) << ',' << fmt(l.var_Y) << ','
        << fmt(l.mean_iterations) << ',' << l.predicted_iterations << ',' << l.failed << ',' << fmt(l.rho_lfa) << ','
        << fmt(l.correlation) << ',' << fmt(l.work) << ',' << fmt(l.predicted_work) << '\n';
}

void write_mlmc_histogram_csv(std::ostream& out, const MlmcResult& r, const Provenance& prov) {
  out << provenance_header(prov) << "level,iterations,count\n";
  for (const auto& l : r.levels)
    for (const auto& [it, n] : l.iteration_histogram) out << l.level << ',' << it << ',' << n << '\n';
}

// ---------------------------------------------------------------------------
// Field export

namespace {

std::vector<std::string> run_field_sample(const Json& config, std::uint64_t seed, const Provenance& prov,
                                          const fs::path& dir) {
  check_keys(config, {"matern", "anisotropic", "cells", "samples", "levels", "format", "quantity", "seed"},
             "field-sample config");
  const int cells = get_or(config, "cells", 64);
  const int samples = get_or(config, "samples", 1);
  const int levels = get_or(config, "levels", 1);
  const std::string format = get_or<std::string>(config, "format", "csv");
  const std::string quantity = get_or<std::string>(config, "quantity", "log");
  if (samples < 1 || levels < 1) throw ConfigError("'samples' and 'levels' must be positive");
  if (format != "csv" && format != "binary") throw ConfigError("format must be csv or binary");
  if (quantity != "log" && quantity != "k") throw ConfigError("quantity must be log or k");
  if (config.contains("matern") && config.contains("anisotropic"))
    throw ConfigError("give either 'matern' or 'anisotropic'");

  LagCovariance cov;
  if (config.contains("anisotropic")) {
    const auto& a = config.at("anisotropic");
    check_keys(a, {"nu", "lambda_x", "lambda_y", "sigma2", "theta"}, "anisotropic");
    AnisoMaternParams p;
    p.nu = get_or(a, "nu", p.nu);
    p.lambda_x = get_or(a, "lambda_x", p.lambda_x);
    p.lambda_y = get_or(a, "lambda_y", p.lambda_y);
    p.sigma2 = get_or(a, "sigma2", p.sigma2);
    p.theta = get_or(a, "theta", p.theta);
    cov = anisotropic_covariance(p);
  } else {
    cov = isotropic_covariance(config.contains("matern") ? parse_matern_json(config.at("matern")) : reference_matern(2));
  }

  std::vector<UniformGrid> grids;
  for (int l = levels - 1; l >= 0; --l) {
    if (cells % (1 << l)) throw ConfigError("cells must be divisible by 2^(levels-1)");
    grids.emplace_back(cells >> l);
  }
  const auto plans = plan_hierarchy(grids, cov);
  const int finest = levels - 1;

  std::vector<std::string> written;
  for (int s = 0; s < samples; ++s) {
    NormalDraw y = draw_normals(plans.back().embedding_side(), seed, finest, static_cast<std::uint64_t>(s));
    for (int l = finest; l >= 0; --l) {
      CellField z = plans[static_cast<std::size_t>(l)].sample(y);
      if (quantity == "k") z = exponentiate(z);
      const std::string stem = "field_s" + std::to_string(s) + "_l" + std::to_string(l);
      if (format == "csv") {
        auto out = open_out(dir / (stem + ".csv"), written);
        out << provenance_header(prov) << "# sample=" << s << " level=" << l << " cells=" << z.side()
            << " quantity=" << quantity << " clip_count=" << plans[static_cast<std::size_t>(l)].clip_count() << '\n';
        // Column i holds cell index i along x; each row is one j.
        for (int i = 0; i < z.side(); ++i) out << (i ? ",i" : "i") << i;
        out << '\n';
        write_field_csv(out, z);
      } else {
        auto out = open_out(dir / (stem + ".bin"), written);
        write_field_binary(out, z);
        auto meta = open_out(dir / (stem + ".json"), written);
        Json m = provenance_json(prov);
        m["sample"] = s;
        m["level"] = l;
        m["cells"] = z.side();
        m["quantity"] = quantity;
        meta << m.dump(2) << '\n';
      }
      if (l > 0) y = upscale_normals(y);
    }
  }
  return written;
}

}  // namespace

std::vector<std::string> run_experiment(const std::string& kind, Json config, std::uint64_t seed, int threads,
                                        const std::string& out_dir) {
  if (threads < 1) throw ConfigError("threads must be positive");
  if (config.is_null()) config = Json::object();
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  config["seed"] = seed;
  const Provenance prov{kind, seed, config};
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir);
  std::vector<std::string> written;

  if (kind == "benchmark-lfa" || kind == "benchmark-mg") {
    const bool measure = kind == "benchmark-mg";
    const auto opts = parse_benchmark_options(config, seed, threads);
    const auto rows = run_benchmark_suite(opts, measure);
    auto out = open_out(dir / (measure ? "benchmark_mg.csv" : "benchmark_lfa.csv"), written);
    write_benchmark_csv(out, rows, prov, measure);
  } else if (kind == "random-lfa") {
    const auto opts = parse_random_options(config, seed, threads);
    const auto study = run_random_study(opts);
    auto a = open_out(dir / "random_samples.csv", written);
    auto b = open_out(dir / "random_summary.csv", written);
    auto c = open_out(dir / "random_histogram.csv", written);
    write_random_csv(a, b, c, study, prov);
  } else if (kind == "field-sample") {
    written = run_field_sample(config, seed, prov, dir);
  } else if (kind == "mlmc") {
    const auto cfg = parse_mlmc_config(config, seed, threads);
    const auto result = run_mlmc(cfg);
    auto j = open_out(dir / "mlmc.json", written);
    j << mlmc_json(result, prov).dump(2) << '\n';
    auto l = open_out(dir / "mlmc_levels.csv", written);
    write_mlmc_levels_csv(l, result, prov);
    auto h = open_out(dir / "mlmc_histogram.csv", written);
    write_mlmc_histogram_csv(h, result, prov);
  } else {
    throw ConfigError("unknown experiment '" + kind + "'");
  }
  return written;
}

}  // namespace mglfa::experiments
