#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adagmrf/model.hpp"
#include "adagmrf/sampler.hpp"

namespace adagmrf {

// Probabilities are clipped to [kProbClamp, 1 - kProbClamp] before logging.
inline constexpr double kProbClamp = 1e-12;

struct DicResult {
  double dic = 0.0;
  double dbar = 0.0;       // posterior mean deviance
  double d_at_mean = 0.0;  // deviance at the posterior-mean field
  double pd() const { return dbar - d_at_mean; }
};

struct Autocorrelation {
  std::vector<double> values;  // lags 0..max_lag
  bool degenerate = false;     // constant trace
};

struct EssResult {
  double value = 0.0;
  bool degenerate = false;
};

struct TraceDiagnostics {
  std::string variable;  // e.g. "z[center]"
  Autocorrelation acf;
  EssResult ess;
};

struct PosteriorSummary {
  std::vector<double> prob_map;       // posterior mean of H(z_i)
  std::vector<double> miscoding_map;  // posterior mean of psi_i
  std::vector<double> mean_field;     // posterior mean of z_i
  std::optional<DicResult> dic;
  std::vector<TraceDiagnostics> diagnostics;
};

// Posterior maps, plus ACF / ESS for every monitor trace and the global
// scale. Throws std::invalid_argument on an empty stream.
PosteriorSummary summarize(const SampleStream& stream, const Link& link,
                           std::size_t max_lag = 50);

// Same, with DIC for the given data.
PosteriorSummary summarize(const SampleStream& stream, const Link& link,
                           std::span<const std::uint8_t> y, double r,
                           std::size_t max_lag = 50);

// Deviance -2 log p(y | z) with miscoding-marginalized success probability
// (1 - r) H(z) + r (1 - H(z)).
double deviance(std::span<const double> z, std::span<const std::uint8_t> y,
                const Link& link, double r);

DicResult dic(const SampleStream& stream, std::span<const std::uint8_t> y,
              const Link& link, double r);

// Mean squared probability error (1/n) sum (p_i - q_i)^2.
double mspe(std::span<const double> estimate, std::span<const double> truth);

Autocorrelation autocorrelation(std::span<const double> trace,
                                std::size_t max_lag);

// Effective sample size with Geyer's initial positive sequence truncation.
EssResult ess(std::span<const double> trace);

}  // namespace adagmrf
