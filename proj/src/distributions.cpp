#include "adagmrf/distributions.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

constexpr double kTinyPositive = std::numeric_limits<double>::min();

// Upper tail of the standard normal, Phi(-a).
double normal_upper_tail(double a) {
  return 0.5 * std::erfc(a / std::numbers::sqrt2);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Standard logistic restricted to (lower, +inf).
double logistic_tail(double lower, Rng& rng) {
  // Survival S(t) = 1 / (1 + e^t); draw S uniformly on (0, S(lower)).
  const double log_s = std::log(rng.uniform()) - softplus(lower);
  double t = std::log(-std::expm1(log_s)) - log_s;
  return t < lower ? lower : t;
}

// Series bounds for the acceptance probability of a GIG(1/2, 1, r^2)
// proposal. Right-hand representation, used for lambda > 4/3.
bool accept_right(double u, double lambda) {
  double z = 1.0;
  const double x = std::exp(-0.5 * lambda);
  int j = 0;
  for (;;) {
    ++j;
    double n = j + 1;
    z -= n * n * std::pow(x, n * n - 1.0);
    if (z > u) return true;
    ++j;
    n = j + 1;
    z += n * n * std::pow(x, n * n - 1.0);
    if (z < u) return false;
  }
}

// Left-hand (Jacobi-transformed) representation, used for lambda <= 4/3.
bool accept_left(double u, double lambda) {
  constexpr double pi = std::numbers::pi;
  const double h = 0.5 * std::log(2.0) + 2.5 * std::log(pi) -
                   2.5 * std::log(lambda) - pi * pi / (2.0 * lambda) +
                   0.5 * lambda;
  const double log_u = std::log(u);
  double z = 1.0;
  const double x = std::exp(-pi * pi / (2.0 * lambda));
  const double k = lambda / (pi * pi);
  int j = 0;
  for (;;) {
    ++j;
    z -= k * std::pow(x, double(j) * j - 1.0);
    if (h + std::log(z) > log_u) return true;
    ++j;
    const double n = j + 1;
    z += n * n * std::pow(x, n * n - 1.0);
    if (h + std::log(z) < log_u) return false;
  }
}

}  // namespace

double sample_normal_tail(double lower, Rng& rng) {
  if (lower <= kTailSwitch) {
    // t = -Phi^{-1}(U Phi(-lower)) = sqrt(2) erfc^{-1}(2 U Phi(-lower))
    const double p = rng.uniform() * normal_upper_tail(lower);
    const double t = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    return t < lower ? lower : t;
  }
  // Exponential envelope with the optimal rate for this bound.
  const double alpha = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (long i = 0; i < kMaxRejections; ++i) {
    const double z = lower + rng.exponential(alpha);
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
  throw RejectionLimitError("normal tail sampler: rejection cap reached");
}

double sample_truncated_normal(double mean, double variance,
                               TruncationSide side, Rng& rng) {
  const double sd = std::sqrt(variance);
  if (side == TruncationSide::positive) {
    const double x = mean + sd * sample_normal_tail(-mean / sd, rng);
    return x > 0.0 ? x : kTinyPositive;
  }
  const double x = mean - sd * sample_normal_tail(mean / sd, rng);
  return x <= 0.0 ? x : 0.0;
}

double sample_truncated_logistic(double location, double scale,
                                 TruncationSide side, Rng& rng) {
  if (side == TruncationSide::positive) {
    const double x = location + scale * logistic_tail(-location / scale, rng);
    return x > 0.0 ? x : kTinyPositive;
  }
  const double x = location - scale * logistic_tail(location / scale, rng);
  return x <= 0.0 ? x : 0.0;
}

double sample_inverse_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("inverse gamma: shape and rate must be positive");
  return 1.0 / rng.gamma(shape, rate);
}

double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  // Michael, Schucany & Haas transformation with a cancellation-free root.
  const double nu = rng.normal();
  const double c = mean * nu * nu / (2.0 * shape);
  const double x = mean / (1.0 + c + std::sqrt(c * c + 2.0 * c));
  if (rng.uniform() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

double sample_gig_half(double b, Rng& rng) {
  if (b <= 0.0) return rng.gamma(0.5, 0.5);
  // If X ~ GIG(1/2, 1, b) then 1/X ~ IG(mean 1/sqrt(b), shape 1).
  return 1.0 / sample_inverse_gaussian(1.0 / std::sqrt(b), 1.0, rng);
}

double sample_lambda_ks(double residual, Rng& rng) {
  const double b = residual * residual;
  for (long i = 0; i < kMaxRejections; ++i) {
    const double lambda = sample_gig_half(b, rng);
    const double u = rng.uniform();
    const bool ok =
        lambda > 4.0 / 3.0 ? accept_right(u, lambda) : accept_left(u, lambda);
    if (ok) return lambda;
  }
  throw RejectionLimitError("KS mixing sampler: rejection cap reached");
}

double ks_mixture_acceptance(double lambda) {
  constexpr double pi = std::numbers::pi;
  double sum = 0.0;
  if (lambda > 4.0 / 3.0) {
    const double x = std::exp(-0.5 * lambda);
    for (int n = 1; n < 200; ++n) {
      const double term = double(n) * n * std::pow(x, double(n) * n - 1.0);
      sum += (n % 2 == 1) ? term : -term;
      if (term < 1e-300) break;
    }
    return sum;
  }
  const double k = lambda / (pi * pi);
  const double x = std::exp(-pi * pi / (2.0 * lambda));
  const double h = 0.5 * std::log(2.0) + 2.5 * std::log(pi) -
                   2.5 * std::log(lambda) - pi * pi / (2.0 * lambda) +
                   0.5 * lambda;
  for (int n = 1; n < 200; ++n) {
    const double odd = 2.0 * n - 1.0;
    const double term = (odd * odd - k) * std::pow(x, odd * odd - 1.0);
    sum += term;
    if (term < 1e-300) break;
  }
  return std::exp(h) * sum;
}

}  // namespace adagmrf
