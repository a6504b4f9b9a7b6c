#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mglfa/grid.hpp"
#include "mglfa/lfa.hpp"
#include "mglfa/mlmc.hpp"
#include "mglfa/multigrid.hpp"
#include "mglfa/randfield.hpp"

namespace mglfa::experiments {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Round-trip formatting (17 significant digits).
std::string fmt(double v);
/// Quotes the field if it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

struct Provenance {
  std::string experiment;
  std::uint64_t seed = 0;
  Json config;
};

/// "# mglfa <version> experiment=<kind> seed=<seed>\n# config=<compact json>\n"
std::string provenance_header(const Provenance& p);
/// The same information as a JSON object.
Json provenance_json(const Provenance& p);

// Shared config pieces.
CycleSpec parse_cycle(const Json& j, CycleSpec fallback);
MaternParams parse_matern_json(const Json& j);
lfa::GsSplitting parse_splitting(const std::string& s);

struct BenchmarkCase {
  BenchmarkId benchmark;
  Smoother smoother;
  TransferPair transfers;
  int nu1 = 1;
  int nu2 = 0;
  int window = 8;
};

struct BenchmarkOptions {
  std::vector<BenchmarkCase> cases;
  lfa::FrequencySampling sampling;
  int cells = 128;       // grid for the measured two-grid factors
  int iterations = 50;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Every deterministic benchmark x {Jacobi(0.8), GS} x {(CP,CR), (WP,CR)} x {(1,0), (1,1), (2,2)}.
std::vector<BenchmarkCase> table1_cases();
BenchmarkOptions parse_benchmark_options(const Json& config, std::uint64_t seed, int threads);

struct BenchmarkRow {
  BenchmarkCase c;
  double rho_lfa = 0.0;           // OffsetLex splitting (the only one for Jacobi)
  double rho_lfa_subgrid = 0.0;   // SubgridSequential splitting
  double rho_measured = 0.0;      // mean of per-cycle reductions
  double rho_measured_geometric = 0.0;
};

std::vector<BenchmarkRow> run_benchmark_suite(const BenchmarkOptions& opts, bool measure);
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows, const Provenance& prov,
                         bool measured);

struct RandomStudyOptions {
  enum class Field { Matern, RandomJump } field = Field::Matern;
  MaternParams matern{1.5, 0.3, 1.0};
  int m = 2;
  int cells = 64;
  int samples = 20;
  std::vector<std::pair<int, int>> smoothing{{1, 1}, {2, 2}};
  CycleSpec cycle = CycleSpec::w_cycle(1, 1);
  int iterations = 50;
  int window = 8;
  double eps = 1e-10;  // histogram threshold for the residual reduction
  lfa::FrequencySampling sampling;
  std::uint64_t seed = 1;
  int threads = 1;
};

RandomStudyOptions parse_random_options(const Json& config, std::uint64_t seed, int threads);

struct RandomSampleRow {
  int sample = 0;
  int nu1 = 0, nu2 = 0;
  double rho_lfa = 0.0;
  double rho_measured = 0.0;
  double rho_mean_ratio = 0.0;
  int iterations_to_eps = 0;  // 0 if not reached within the iteration budget
};

struct RandomSummaryRow {
  int nu1 = 0, nu2 = 0;
  RateStatistics mg, lfa;
};

struct RandomStudy {
  std::vector<RandomSampleRow> samples;
  std::vector<RandomSummaryRow> summary;
};

/// Coefficient field of one sample; the LFA window is its central n x n block.
CellField random_study_field(const RandomStudyOptions& opts, int sample);
RandomStudy run_random_study(const RandomStudyOptions& opts);
void write_random_csv(std::ostream& samples, std::ostream& summary, std::ostream& histogram,
                      const RandomStudy& study, const Provenance& prov);

MlmcConfig parse_mlmc_config(const Json& config, std::uint64_t seed, int threads);
Json mlmc_json(const MlmcResult& result, const Provenance& prov);
/// level, h, N, mean_Y, var_Y, mean_iters, predicted_iters, and the remaining level statistics.
void write_mlmc_levels_csv(std::ostream& out, const MlmcResult& result, const Provenance& prov);
void write_mlmc_histogram_csv(std::ostream& out, const MlmcResult& result, const Provenance& prov);

/// Runs one experiment kind and writes its files into out_dir. Throws ConfigError
/// or NumericalError; returns the list of files written.
std::vector<std::string> run_experiment(const std::string& kind, Json config, std::uint64_t seed, int threads,
                                        const std::string& out_dir);

}  // namespace mglfa::experiments
