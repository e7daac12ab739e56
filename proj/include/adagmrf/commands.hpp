#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adagmrf/io.hpp"
#include "adagmrf/model.hpp"
#include "adagmrf/sampler.hpp"
#include "adagmrf/simgen.hpp"

namespace adagmrf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Environment variable holding the default worker-thread count.
inline constexpr const char* kThreadsEnv = "ADAGMRF_THREADS";

// Peak input shared by fit and baseline: a binary CSV grid, or a peak list
// (header "x,y[,z]") together with the lattice extent.
struct PeakInput {
  std::string path;
  int rows = 0;  // required for peak lists
  int cols = 0;
  std::optional<Slab> slab;
  double spacing = 1.0;  // physical units per cell
};

struct LoadedPeaks {
  LatticeGrid grid;
  std::vector<std::uint8_t> y;
};

LoadedPeaks load_peaks(const PeakInput& in);

struct SimulateOptions {
  std::string kind = "bimodal";  // or "two-disc"
  int rows = 0;                  // 0: 30 for bimodal, 64 for two-disc
  int cols = 0;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  Domain domain;
  TwoDiscOptions discs;
  std::string out_dir;
};

struct FitOptions {
  PeakInput input;
  std::string link = "probit";
  double df = 1.0;  // student-t degrees of freedom when not given as "student-t:<df>"
  ModelSpec spec;
  ChainConfig chain;
  std::optional<std::size_t> monitor;
  std::size_t max_lag = 50;
  bool dump_precision = false;
  std::string out_dir;
};

struct BaselineOptions {
  PeakInput input;
  std::string method = "ale";  // or "kda"
  double fwhm = 10.0;
  double radius = 10.0;
  double alpha = 0.05;
  std::size_t n_perm = 1000;
  std::uint64_t seed = 1;
  std::string mask;  // optional binary grid restricting null peaks
  std::string out_dir;
};

struct EvaluateOptions {
  std::vector<std::string> fit_dirs;
  std::string truth;  // optional probability grid
  std::string mask;   // optional binary grid of true activation
  std::vector<double> thresholds{0.01, 0.05, 0.1, 0.2, 0.3, 0.5};
  std::string out_dir;
};

// Each command writes its files plus manifest.json into out_dir (created if
// missing). `echo` is the command line recorded in the manifest.
void cmd_simulate(const SimulateOptions& opt,
                  const std::vector<std::string>& echo = {});
void cmd_fit(const FitOptions& opt, const std::vector<std::string>& echo = {});
void cmd_baseline(const BaselineOptions& opt,
                  const std::vector<std::string>& echo = {});
void cmd_evaluate(const EvaluateOptions& opt,
                  const std::vector<std::string>& echo = {});

// Full command-line entry point (args excludes the program name). Errors are
// reported on stderr and mapped to kExitConfig or kExitNumerical.
int run_cli(const std::vector<std::string>& args);

}  // namespace adagmrf
