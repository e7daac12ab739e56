#pragma once

#include "adagmrf/random.hpp"

namespace adagmrf {

// Which half-line a truncated draw is restricted to: w > 0 or w <= 0.
enum class TruncationSide { positive, nonpositive };

// Rejection loops give up (RejectionLimitError) after this many proposals.
inline constexpr long kMaxRejections = 1'000'000;

// Standardized truncation bound beyond which the exponential-envelope
// rejection sampler replaces CDF inversion.
inline constexpr double kTailSwitch = 4.0;

// N(mean, variance) restricted to `side`. Positive-side draws are strictly
// greater than zero.
double sample_truncated_normal(double mean, double variance,
                               TruncationSide side, Rng& rng);

// Standard normal restricted to [lower, +inf).
double sample_normal_tail(double lower, Rng& rng);

// Logistic(location, scale) restricted to `side`, by CDF inversion carried out
// on the log-odds scale.
double sample_truncated_logistic(double location, double scale,
                                 TruncationSide side, Rng& rng);

// X with 1/X ~ Gamma(shape, rate).
double sample_inverse_gamma(double shape, double rate, Rng& rng);

// Inverse Gaussian (Wald) with the given mean and shape.
double sample_inverse_gaussian(double mean, double shape, Rng& rng);

// GIG(1/2, 1, b): density proportional to x^{-1/2} exp(-(x + b/x)/2).
double sample_gig_half(double b, Rng& rng);

// Mixing scale of the logistic-as-normal-scale-mixture representation,
// conditional on the residual r = w - z. Target density is proportional to
// lambda^{-1} exp(-r^2 / (2 lambda)) KS(sqrt(lambda)/2), with KS the
// Kolmogorov-Smirnov density.
double sample_lambda_ks(double residual, Rng& rng);

// Acceptance probability of a GIG(1/2, 1, r^2) proposal in sample_lambda_ks,
// evaluated by summing the series to convergence. Exposed for tests.
double ks_mixture_acceptance(double lambda);

}  // namespace adagmrf
