#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>

#include "adagmrf/distributions.hpp"
#include "adagmrf/errors.hpp"
#include "adagmrf/model.hpp"
#include "adagmrf/sampler.hpp"
#include "oracles.hpp"

using namespace adagmrf;

namespace {

double logistic_cdf(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Mean of N(mu, 1) restricted to (0, inf): mu + phi(mu) / Phi(mu).
double truncated_mean(double mu) {
  return mu + oracle::normal_pdf(mu) / oracle::normal_cdf(mu);
}

}  // namespace

TEST_CASE("uniform stays inside the open unit interval") {
  Rng rng(0);
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    CHECK((u > 0.0 && u < 1.0));
  }
  Rng a = Rng::substream(4, 0), b = Rng::substream(4, 1), c = Rng::substream(4, 0);
  CHECK(a.next_u64() != b.next_u64());
  CHECK(Rng::substream(4, 0).next_u64() == c.next_u64());
}

TEST_CASE("half-normal mean") {
  Rng rng(101);
  double s = 0.0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) s += sample_truncated_normal(0.0, 1.0, TruncationSide::positive, rng);
  CHECK(std::abs(s / n - std::sqrt(2.0 / M_PI)) < 0.003);
}

TEST_CASE("truncated normal respects the side and the Mills-ratio mean") {
  Rng rng(7);
  for (double mu : {-9.0, -5.0, -2.0, 0.0, 1.5, 6.0}) {
    std::vector<double> pos, neg;
    for (int k = 0; k < 100000; ++k) {
      pos.push_back(sample_truncated_normal(mu, 1.0, TruncationSide::positive, rng));
      neg.push_back(sample_truncated_normal(-mu, 1.0, TruncationSide::nonpositive, rng));
    }
    for (double v : pos) REQUIRE(v > 0.0);
    for (double v : neg) REQUIRE(v <= 0.0);
    const double expect = truncated_mean(mu);
    const double se = std::sqrt(oracle::variance(pos) / pos.size());
    CHECK(std::abs(oracle::mean(pos) - expect) < 5 * se);
    CHECK(std::abs(-oracle::mean(neg) - expect) < 5 * se);
  }
  // Non-unit variance: standardize.
  std::vector<double> x;
  for (int k = 0; k < 100000; ++k)
    x.push_back(sample_truncated_normal(-3.0, 4.0, TruncationSide::positive, rng));
  const double expect = -3.0 + 2.0 * oracle::normal_pdf(-1.5) / oracle::normal_cdf(-1.5);
  CHECK(std::abs(oracle::mean(x) - expect) < 5 * std::sqrt(oracle::variance(x) / x.size()));
}

TEST_CASE("normal tail sampler far beyond the switch point") {
  Rng rng(3);
  for (double a : {2.0, 4.5, 8.0, 20.0}) {
    std::vector<double> x;
    for (int k = 0; k < 50000; ++k) x.push_back(sample_normal_tail(a, rng));
    for (double v : x) REQUIRE(v >= a);
    // E[X | X > a] for the standard normal, via the continued-fraction-free
    // ratio computed in long double.
    const long double phi = std::exp(-0.5L * a * a) / std::sqrt(2.0L * M_PI);
    const long double tail = 0.5L * std::erfc((long double)a / std::sqrt(2.0L));
    const double expect = double(phi / tail);
    CHECK(std::abs(oracle::mean(x) - expect) < 5 * std::sqrt(oracle::variance(x) / x.size()));
  }
}

TEST_CASE("truncated logistic") {
  Rng rng(17);
  std::vector<double> x;
  for (int k = 0; k < 200000; ++k)
    x.push_back(sample_truncated_logistic(0.0, 1.0, TruncationSide::positive, rng));
  std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
  // P(X > m | X > 0) = 1/2  =>  m = ln 3.
  CHECK(x[x.size() / 2] == doctest::Approx(std::log(3.0)).epsilon(0.01));

  // Conditional CDF of the non-positive side for location 2, scale 0.5.
  std::vector<double> y;
  for (int k = 0; k < 50000; ++k) {
    const double v = sample_truncated_logistic(2.0, 0.5, TruncationSide::nonpositive, rng);
    REQUIRE(v <= 0.0);
    y.push_back(v);
  }
  const double f0 = logistic_cdf((0.0 - 2.0) / 0.5);
  CHECK(oracle::ks_pvalue(y, [&](double v) { return logistic_cdf((v - 2.0) / 0.5) / f0; }) > 0.01);

  // Extreme locations keep the draw on the right side.
  for (int k = 0; k < 1000; ++k) {
    CHECK(sample_truncated_logistic(-60.0, 1.0, TruncationSide::positive, rng) > 0.0);
    CHECK(sample_truncated_logistic(60.0, 1.0, TruncationSide::nonpositive, rng) <= 0.0);
  }
}

TEST_CASE("inverse gamma moments") {
  Rng rng(5);
  for (auto [a, b] : {std::pair{3.5, 2.0}, std::pair{6.0, 0.5}, std::pair{12.0, 30.0}}) {
    std::vector<double> x;
    const int n = 200000;
    for (int k = 0; k < n; ++k) x.push_back(sample_inverse_gamma(a, b, rng));
    const double mean = b / (a - 1);
    const double var = b * b / ((a - 1) * (a - 1) * (a - 2));
    CHECK(std::abs(oracle::mean(x) - mean) < 5 * std::sqrt(var / n));
    if (a > 4) {
      // Var of the sample variance needs the fourth moment.
      const double m4 = std::pow(b, 4) / ((a - 1) * (a - 2) * (a - 3) * (a - 4));
      const double m3 = std::pow(b, 3) / ((a - 1) * (a - 2) * (a - 3));
      const double m2 = b * b / ((a - 1) * (a - 2));
      const double c4 = m4 - 4 * m3 * mean + 6 * m2 * mean * mean - 3 * std::pow(mean, 4);
      CHECK(std::abs(oracle::variance(x) - var) < 5 * std::sqrt((c4 - var * var) / n));
    }
  }
  CHECK_THROWS_AS(sample_inverse_gamma(0.0, 1.0, rng), DomainError);
  CHECK_THROWS_AS(sample_inverse_gamma(1.0, -1.0, rng), DomainError);
}

TEST_CASE("inverse Gaussian and GIG(1/2) moments") {
  Rng rng(13);
  const int n = 200000;
  for (auto [mu, lam] : {std::pair{1.0, 1.0}, std::pair{0.05, 1.0}, std::pair{20.0, 3.0}}) {
    std::vector<double> x;
    for (int k = 0; k < n; ++k) x.push_back(sample_inverse_gaussian(mu, lam, rng));
    const double var = mu * mu * mu / lam;
    CHECK(std::abs(oracle::mean(x) - mu) < 5 * std::sqrt(var / n));
  }
  // GIG(1/2, 1, b) has mean sqrt(b) + 1; b = 0 is Gamma(1/2, 1/2) with mean 1.
  for (double b : {0.0, 0.25, 4.0, 100.0}) {
    std::vector<double> x;
    for (int k = 0; k < n; ++k) x.push_back(sample_gig_half(b, rng));
    const double m = std::sqrt(b) + 1.0;
    CHECK(std::abs(oracle::mean(x) - m) < 5 * std::sqrt(oracle::variance(x) / n));
  }
}

TEST_CASE("KS mixing scale reconstructs the logistic marginal") {
  // w ~ Logistic(0,1), lambda | w, then w' ~ N(0, lambda) must be logistic
  // again when lambda | w is exact.
  Rng rng(29);
  std::vector<double> w2;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    const double w = std::log(u / (1.0 - u));
    const double lambda = sample_lambda_ks(w, rng);
    REQUIRE(lambda > 0.0);
    w2.push_back(std::sqrt(lambda) * rng.normal());
  }
  CHECK(oracle::ks_pvalue(w2, logistic_cdf) > 0.01);

  for (double l : {0.05, 0.5, 1.0, 4.0 / 3.0, 2.0, 10.0}) {
    const double a = ks_mixture_acceptance(l);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("logit latent at fixed field is logistic") {
  // Alternating {w, lambda} updates at fixed z leave w - z ~ Logistic(0, 1)
  // marginally; check through the joint draw used by the sampler.
  Rng rng(41);
  const double z = 0.7;
  std::vector<double> r;
  for (int k = 0; k < 100000; ++k) {
    const bool positive = rng.uniform() < logistic_cdf(z);
    const double w = sample_truncated_logistic(
        z, 1.0, positive ? TruncationSide::positive : TruncationSide::nonpositive, rng);
    r.push_back(w - z);
  }
  CHECK(oracle::ks_pvalue(r, logistic_cdf) > 0.01);
}

TEST_CASE("scale-mixture conditionals reconstruct their marginals") {
  Rng rng(57);
  const int n = 100000;
  SUBCASE("laplace") {
    std::vector<double> w2;
    for (int k = 0; k < n; ++k) {
      const double u = rng.uniform() - 0.5;
      const double w = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
      const double v = sample_mixing_variance(Link::laplace(), w, rng);
      w2.push_back(std::sqrt(v) * rng.normal());
    }
    const auto cdf = [](double x) {
      return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    };
    CHECK(oracle::ks_pvalue(w2, cdf) > 0.01);
  }
  SUBCASE("student-t, 4 df") {
    boost::math::students_t t4(4.0);
    std::vector<double> w2;
    for (int k = 0; k < n; ++k) {
      const double chi2 = rng.gamma(2.0, 0.5);  // 4 degrees of freedom
      const double w = rng.normal() / std::sqrt(chi2 / 4.0);
      const double v = sample_mixing_variance(Link::student_t(4.0), w, rng);
      w2.push_back(std::sqrt(v) * rng.normal());
    }
    CHECK(oracle::ks_pvalue(w2, [&](double x) { return boost::math::cdf(t4, x); }) > 0.01);
  }
  SUBCASE("cauchy link conditional is IG(1, r^2/2 + 1/2)") {
    const double r = 1.7;
    std::vector<double> inv;
    for (int k = 0; k < n; ++k)
      inv.push_back(1.0 / sample_mixing_variance(Link::student_t(1.0), r, rng));
    // 1/v ~ Gamma(1, r^2/2 + 1/2): mean 1 / rate, variance 1 / rate^2.
    const double rate = r * r / 2 + 0.5;
    CHECK(std::abs(oracle::mean(inv) - 1.0 / rate) < 5 * (1.0 / rate) / std::sqrt(n));
  }
  SUBCASE("laplace conditional moments") {
    // 1/v | r ~ InverseGaussian(1/|r|, 1).
    const double r = 0.6;
    std::vector<double> inv;
    for (int k = 0; k < n; ++k)
      inv.push_back(1.0 / sample_mixing_variance(Link::laplace(), r, rng));
    const double mu = 1.0 / r;
    CHECK(std::abs(oracle::mean(inv) - mu) < 5 * std::sqrt(mu * mu * mu / n));
  }
  CHECK(sample_mixing_variance(Link::probit(), 3.0, rng) == 1.0);
}
