#include "adagmrf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

double success_probability(double z, const Link& link, double r) {
  const double h = link.cdf(z);
  if (r == 0.0) return h;
  return (1.0 - r) * h + r * link.cdf(-z);
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [&](double v) { return v == x.front(); });
}

}  // namespace

double deviance(std::span<const double> z, std::span<const std::uint8_t> y,
                const Link& link, double r) {
  if (z.size() != y.size()) throw DimensionError("deviance: size mismatch");
  double ll = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = std::clamp(success_probability(z[i], link, r), kProbClamp,
                                1.0 - kProbClamp);
    ll += y[i] ? std::log(p) : std::log1p(-p);
  }
  return -2.0 * ll;
}

DicResult dic(const SampleStream& stream, std::span<const std::uint8_t> y,
              const Link& link, double r) {
  if (stream.empty()) throw std::invalid_argument("dic: empty sample stream");
  std::vector<double> mean(stream.n, 0.0);
  double dsum = 0.0;
  for (std::size_t s = 0; s < stream.size(); ++s) {
    const auto z = stream.z_sample(s);
    dsum += deviance(z, y, link, r);
    for (std::size_t i = 0; i < stream.n; ++i) mean[i] += z[i];
  }
  const double count = double(stream.size());
  for (double& v : mean) v /= count;
  DicResult out;
  out.dbar = dsum / count;
  out.d_at_mean = deviance(mean, y, link, r);
  out.dic = 2.0 * out.dbar - out.d_at_mean;
  return out;
}

PosteriorSummary summarize(const SampleStream& stream, const Link& link,
                           std::size_t max_lag) {
  if (stream.empty())
    throw std::invalid_argument("summarize: empty sample stream");
  PosteriorSummary out;
  out.prob_map.assign(stream.n, 0.0);
  out.miscoding_map.assign(stream.n, 0.0);
  out.mean_field.assign(stream.n, 0.0);
  for (std::size_t s = 0; s < stream.size(); ++s) {
    const auto z = stream.z_sample(s);
    const auto psi = stream.psi_sample(s);
    for (std::size_t i = 0; i < stream.n; ++i) {
      out.prob_map[i] += link.cdf(z[i]);
      out.miscoding_map[i] += psi[i];
      out.mean_field[i] += z[i];
    }
  }
  const double count = double(stream.size());
  for (std::size_t i = 0; i < stream.n; ++i) {
    out.prob_map[i] = std::clamp(out.prob_map[i] / count, 0.0, 1.0);
    out.miscoding_map[i] /= count;
    out.mean_field[i] /= count;
  }

  const auto add = [&](std::string name, std::span<const double> trace) {
    if (trace.size() < 2) return;
    const std::size_t lag = std::min(max_lag, trace.size() - 1);
    out.diagnostics.push_back(
        {std::move(name), autocorrelation(trace, lag), ess(trace)});
  };
  for (const auto& t : stream.traces) {
    add("z[" + t.label + "]", t.z);
    add("gamma_sq[" + t.label + "]", t.gamma_sq);
    add("w[" + t.label + "]", t.w);
  }
  add("theta_sq", stream.theta_sq);
  add("delta", stream.delta);
  return out;
}

PosteriorSummary summarize(const SampleStream& stream, const Link& link,
                           std::span<const std::uint8_t> y, double r,
                           std::size_t max_lag) {
  PosteriorSummary out = summarize(stream, link, max_lag);
  out.dic = dic(stream, y, link, r);
  return out;
}

double mspe(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size())
    throw DimensionError("mspe: length mismatch (" +
                         std::to_string(estimate.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  if (truth.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - estimate[i];
    s += d * d;
  }
  return s / double(truth.size());
}

Autocorrelation autocorrelation(std::span<const double> trace,
                                std::size_t max_lag) {
  const std::size_t n = trace.size();
  if (n <= max_lag)
    throw std::invalid_argument("autocorrelation: trace shorter than max_lag");
  Autocorrelation out;
  out.values.assign(max_lag + 1, 0.0);
  out.values[0] = 1.0;
  if (is_constant(trace)) {
    out.degenerate = true;
    return out;
  }
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= double(n);
  double c0 = 0.0;
  for (double v : trace) c0 += (v - mean) * (v - mean);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      ck += (trace[t] - mean) * (trace[t + k] - mean);
    out.values[k] = ck / c0;
  }
  return out;
}

EssResult ess(std::span<const double> trace) {
  const std::size_t n = trace.size();
  if (n < 4 || is_constant(trace)) return {double(n), true};
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= double(n);
  double c0 = 0.0;
  for (double v : trace) c0 += (v - mean) * (v - mean);
  const auto rho = [&](std::size_t k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      ck += (trace[t] - mean) * (trace[t + k] - mean);
    return ck / c0;
  };
  // Sum consecutive lag pairs while they stay positive.
  double tau = -1.0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const double pair = (k == 0 ? 1.0 : rho(k)) + rho(k + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / double(n));
  return {double(n) / tau, false};
}

}  // namespace adagmrf
