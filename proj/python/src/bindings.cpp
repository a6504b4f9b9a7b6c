#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "mglfa/error.hpp"
#include "mglfa/experiments.hpp"
#include "mglfa/lfa.hpp"
#include "mglfa/mlmc.hpp"
#include "mglfa/randfield.hpp"

namespace py = pybind11;
using namespace mglfa;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are indexed [j, i] (rows follow y), matching the row-major field layout.
CellField to_field(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ConfigError("expected a square 2-D array");
  const int m = static_cast<int>(a.shape(0));
  std::vector<double> v(a.data(), a.data() + a.size());
  return CellField(UniformGrid(m), std::move(v));
}

Array to_array(const CellField& f) {
  Array a({f.side(), f.side()});
  std::memcpy(a.mutable_data(), f.values().data(), f.values().size() * sizeof(double));
  return a;
}

Array window_array(const CoefficientWindow& w) {
  Array a({w.n(), w.n()});
  std::memcpy(a.mutable_data(), w.values().data(), w.values().size() * sizeof(double));
  return a;
}

CycleSpec make_cycle(const std::string& type, int nu1, int nu2, const std::string& smoother,
                     const std::string& transfers, bool two_grid) {
  CycleSpec c = two_grid ? CycleSpec::two_grid(parse_smoother(smoother), parse_transfers(transfers), nu1, nu2)
                         : CycleSpec::w_cycle(nu1, nu2);
  if (!two_grid) {
    c.smoother = parse_smoother(smoother);
    c.transfers = parse_transfers(transfers);
    if (type == "V" || type == "v") c.cycle = CycleKind::V;
    else if (type != "W" && type != "w") throw ConfigError("cycle type must be V or W");
  }
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cell-centered multigrid, local Fourier analysis and MLMC for heterogeneous Darcy flow";
  m.attr("__version__") = experiments::kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<MaternParams>(m, "MaternParams")
      .def(py::init([](double nu, double lambda, double sigma2) {
             MaternParams p{nu, lambda, sigma2};
             p.validate();
             return p;
           }),
           py::arg("nu"), py::arg("lam"), py::arg("sigma2"))
      .def_readonly("nu", &MaternParams::nu)
      .def_readonly("lam", &MaternParams::lambda)
      .def_readonly("sigma2", &MaternParams::sigma2)
      .def("__repr__", [](const MaternParams& p) {
        return "MaternParams(nu=" + experiments::fmt(p.nu) + ", lam=" + experiments::fmt(p.lambda) +
               ", sigma2=" + experiments::fmt(p.sigma2) + ")";
      });

  m.def("reference_matern", &reference_matern, py::arg("index"));
  m.def("parse_matern", &parse_matern, py::arg("text"));
  m.def("matern_cov", &matern_cov, py::arg("r"), py::arg("params"));

  m.def("benchmark_field",
        [](const std::string& name, int cells, std::optional<std::uint64_t> seed) {
          return to_array(make_benchmark_field(parse_benchmark(name), cells, seed));
        },
        py::arg("name"), py::arg("cells"), py::arg("seed") = py::none());
  m.def("lfa_window",
        [](const std::string& name, int n, std::optional<std::uint64_t> seed) {
          return window_array(make_lfa_window(parse_benchmark(name), n, seed));
        },
        py::arg("name"), py::arg("n") = 8, py::arg("seed") = py::none());

  m.def("two_grid_rho",
        [](const Array& window, double h, int nu1, int nu2, const std::string& smoother, const std::string& transfers,
           int frequencies, const std::string& splitting) {
          const auto k = to_field(window);
          CoefficientWindow w(k.side(), k.values());
          lfa::FrequencySampling s;
          s.points_per_dim = frequencies;
          return lfa::two_grid_rho(w, h, make_cycle("V", nu1, nu2, smoother, transfers, true), s,
                                   experiments::parse_splitting(splitting));
        },
        py::arg("window"), py::arg("h"), py::arg("nu1") = 1, py::arg("nu2") = 1, py::arg("smoother") = "gs",
        py::arg("transfers") = "CP,CR", py::arg("frequencies") = 16, py::arg("splitting") = "offset-lex");

  m.def("measure_rate",
        [](const Array& k, int nu1, int nu2, const std::string& cycle, const std::string& smoother,
           const std::string& transfers, int iterations, std::uint64_t seed) {
          const bool two_grid = cycle == "two-grid";
          const auto st = measure_asymptotic_rate(to_field(k), BoundarySpec::homogeneous_dirichlet(),
                                                  make_cycle(two_grid ? "V" : cycle, nu1, nu2, smoother, transfers, two_grid),
                                                  iterations, seed);
          py::dict d;
          d["rho"] = st.rho_measured;
          d["rho_mean_ratio"] = st.rho_mean_ratio;
          d["residuals"] = st.residual_history;
          return d;
        },
        py::arg("k"), py::arg("nu1") = 1, py::arg("nu2") = 1, py::arg("cycle") = "W", py::arg("smoother") = "gs",
        py::arg("transfers") = "CP,CR", py::arg("iterations") = 50, py::arg("seed") = 0);

  m.def("solve_darcy",
        [](const Array& k, int nu1, int nu2, double eps, int max_iterations) {
          const auto sol = solve_darcy(to_field(k), CycleSpec::w_cycle(nu1, nu2), eps, max_iterations);
          py::dict d;
          d["Q"] = sol.Q;
          d["iterations"] = sol.stats.iterations;
          d["converged"] = sol.stats.converged;
          return d;
        },
        py::arg("k"), py::arg("nu1") = 2, py::arg("nu2") = 2, py::arg("eps") = 1e-10, py::arg("max_iterations") = 100);

  m.def("sample_log_permeability",
        [](const MaternParams& p, int cells, std::uint64_t seed, std::uint64_t sample) {
          const auto plan = plan_embedding(UniformGrid(cells), isotropic_covariance(p));
          return to_array(plan.sample(draw_normals(plan.embedding_side(), seed, 0, sample)));
        },
        py::arg("params"), py::arg("cells"), py::arg("seed"), py::arg("sample") = 0);

  m.def("run_experiment",
        [](const std::string& kind, const std::string& config_json, std::uint64_t seed, int threads,
           const std::string& out_dir) {
          experiments::Json cfg;
          try {
            cfg = experiments::Json::parse(config_json.empty() ? "{}" : config_json);
          } catch (const experiments::Json::exception& e) {
            throw ConfigError(e.what());
          }
          py::gil_scoped_release release;
          return experiments::run_experiment(kind, cfg, seed, threads, out_dir);
        },
        py::arg("kind"), py::arg("config_json") = "{}", py::arg("seed") = 1, py::arg("threads") = 1,
        py::arg("out_dir") = ".");
}
