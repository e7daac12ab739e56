#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adagmrf/commands.hpp"
#include "adagmrf/errors.hpp"
#include "adagmrf/evaluation.hpp"
#include "adagmrf/sampler.hpp"
#include "adagmrf/simgen.hpp"

namespace py = pybind11;
using namespace adagmrf;

namespace {

template <class T>
py::array_t<T> as_grid(const std::vector<T>& v, int rows, int cols) {
  py::array_t<T> out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

using DoubleGrid = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteGrid = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

LatticeGrid grid_of(const py::array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  return LatticeGrid(int(a.shape(0)), int(a.shape(1)));
}

py::dict fit(const ByteGrid& y, const std::string& link, double r, bool adaptive,
             std::size_t iterations, std::size_t burn_in, std::size_t thin,
             std::uint64_t seed, double nu, double rho, double scale,
             double boundary_precision) {
  const LatticeGrid g = grid_of(y);
  const std::vector<std::uint8_t> obs(y.data(), y.data() + y.size());
  ModelSpec spec;
  spec.link = parse_link(link);
  spec.miscoding = r;
  spec.adaptive = adaptive;
  spec.nu = nu;
  spec.rho = rho;
  spec.scale = scale;
  spec.boundary_precision = boundary_precision;
  ChainConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;
  SampleStream stream;
  PosteriorSummary sum;
  {
    py::gil_scoped_release release;
    stream = run_chain(spec, obs, g, cfg);
    sum = summarize(stream, spec.link, obs, r);
  }
  py::dict out;
  out["prob_map"] = as_grid(sum.prob_map, g.rows(), g.cols());
  out["miscoding_map"] = as_grid(sum.miscoding_map, g.rows(), g.cols());
  out["mean_field"] = as_grid(sum.mean_field, g.rows(), g.cols());
  out["theta_sq"] = py::array_t<double>(py::ssize_t(stream.theta_sq.size()),
                                        stream.theta_sq.data());
  out["dic"] = py::dict(py::arg("dic") = sum.dic->dic, py::arg("dbar") = sum.dic->dbar,
                        py::arg("d_at_mean") = sum.dic->d_at_mean,
                        py::arg("pd") = sum.dic->pd());
  out["link"] = spec.link.name();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = ADAGMRF_VERSION;

  m.def(
      "bimodal_truth",
      [](int rows, int cols, double lo, double hi) {
        const LatticeGrid g(rows, cols);
        return as_grid(bimodal_truth(g, Domain{lo, hi}).p, rows, cols);
      },
      py::arg("rows") = 30, py::arg("cols") = 30, py::arg("lo") = -2.0, py::arg("hi") = 7.0,
      "Bimodal probability surface on an evenly spaced lattice.");

  m.def(
      "two_disc_truth",
      [](int rows, int cols, double peak_prob, double background, bool flat) {
        const LatticeGrid g(rows, cols);
        TwoDiscOptions opt;
        opt.peak_prob = peak_prob;
        opt.background = background;
        opt.profile = flat ? DiscProfile::flat : DiscProfile::raised_cosine;
        return as_grid(two_disc_truth(g, opt).p, rows, cols);
      },
      py::arg("rows") = 64, py::arg("cols") = 64, py::arg("peak_prob") = 0.4,
      py::arg("background") = 0.01, py::arg("flat") = false,
      "Two-disc activation map with a constant background.");

  m.def(
      "sample_peaks",
      [](const DoubleGrid& truth, std::uint64_t seed) {
        const LatticeGrid g = grid_of(truth);
        TruthMap t{g, std::vector<double>(truth.data(), truth.data() + truth.size())};
        return as_grid(sample_peaks(t, seed).y, g.rows(), g.cols());
      },
      py::arg("truth"), py::arg("seed"), "Independent Bernoulli draw per voxel.");

  m.def("fit", &fit, py::arg("y"), py::arg("link") = "probit", py::arg("r") = 0.0,
        py::arg("adaptive") = true, py::arg("iterations") = 15000, py::arg("burn_in") = 5000,
        py::arg("thin") = 10, py::arg("seed") = 1, py::arg("nu") = 1.0, py::arg("rho") = 1.0,
        py::arg("scale") = 1.0, py::arg("boundary_precision") = 0.01,
        "Run one Gibbs chain and return posterior maps and DIC.");

  m.def(
      "link_cdf", [](const std::string& link, double z) { return parse_link(link).cdf(z); },
      py::arg("link"), py::arg("z"));

  m.def(
      "miscoding_probability",
      [](int y, double h, double r) { return miscoding_probability(y, h, r); }, py::arg("y"),
      py::arg("h"), py::arg("r"), "Posterior probability that y was miscoded.");

  m.def(
      "mspe",
      [](const DoubleGrid& a, const DoubleGrid& b) {
        return mspe(std::span<const double>(a.data(), a.size()),
                    std::span<const double>(b.data(), b.size()));
      },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "main", [](const std::vector<std::string>& args) { return run_cli(args); },
      py::arg("args"), "Command-line entry point; returns the exit code.");

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
}
