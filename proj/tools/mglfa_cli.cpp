// Command-line driver: one subcommand per experiment kind.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "mglfa/error.hpp"
#include "mglfa/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

const char* const kKinds[] = {"benchmark-lfa", "benchmark-mg", "random-lfa", "field-sample", "mlmc"};

mglfa::experiments::Json load_config(const std::string& path) {
  if (path.empty()) return mglfa::experiments::Json::object();
  std::ifstream in(path);
  if (!in) throw mglfa::ConfigError("cannot read config file " + path);
  try {
    return mglfa::experiments::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw mglfa::ConfigError(std::string("malformed config: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multigrid, local Fourier analysis and MLMC experiments for heterogeneous diffusion"};
  app.set_version_flag("--version", mglfa::experiments::kVersion);

  std::string config_path, out_dir = ".", experiment;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; }, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--experiment", experiment, "experiment kind, as an alternative to a subcommand");
  app.fallthrough();  // options may follow the subcommand
  for (const char* kind : kKinds) app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!app.get_subcommands().empty()) {
      const std::string sub = app.get_subcommands().front()->get_name();
      if (!experiment.empty() && experiment != sub) throw mglfa::ConfigError("--experiment disagrees with the subcommand");
      experiment = sub;
    }
    auto config = load_config(config_path);
    if (experiment.empty() && config.is_object() && config.contains("experiment")) {
      experiment = config.at("experiment").get<std::string>();
    }
    if (config.is_object()) config.erase("experiment");
    if (experiment.empty()) throw mglfa::ConfigError("no experiment given (subcommand, --experiment or config key)");
    if (!seed_given) {
      if (config.is_object() && config.contains("seed")) seed = config.at("seed").get<std::uint64_t>();
      else seed = 1;
    }
    const auto files = mglfa::experiments::run_experiment(experiment, config, seed, threads, out_dir);
    for (const auto& f : files) std::cout << f << '\n';
    return 0;
  } catch (const mglfa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mglfa::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
