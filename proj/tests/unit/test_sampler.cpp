#include <doctest.h>

#include "adagmrf/errors.hpp"
#include "adagmrf/evaluation.hpp"
#include "adagmrf/sampler.hpp"
#include "adagmrf/simgen.hpp"
#include "oracles.hpp"

using namespace adagmrf;

namespace {

std::vector<std::uint8_t> checker(const LatticeGrid& g) {
  std::vector<std::uint8_t> y(g.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i * 7 % 5) == 0;
  return y;
}

}  // namespace

TEST_CASE("chain initialisation") {
  const LatticeGrid g(6, 7);
  const auto y = checker(g);
  for (const Link& link : {Link::probit(), Link::logit(), Link::laplace()}) {
    ModelSpec spec;
    spec.link = link;
    const ChainState s = init_chain(spec, g, y, 3u);
    CHECK(s.xi == 1.0);
    CHECK(s.theta_sq == 1.0);
    CHECK(s.gamma_sq.size() == g.interior_count());
    for (double v : s.gamma_sq) CHECK(v == 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(s.eta[i] == 0.0);
      CHECK(s.lambda[i] == 1.0);
      CHECK(s.psi[i] == 0);
      if (y[i]) CHECK(s.w[i] > 0.0);
      else CHECK(s.w[i] <= 0.0);
    }
  }
  std::vector<std::uint8_t> bad(g.size(), 0);
  bad[3] = 2;
  CHECK_THROWS_AS(init_chain(ModelSpec{}, g, bad, 1u), DomainError);
  CHECK_THROWS_AS(init_chain(ModelSpec{}, g, std::vector<std::uint8_t>(5), 1u),
                  DimensionError);
}

TEST_CASE("field update matches conjugate algebra on a single free node") {
  // With a huge boundary precision everywhere except node c, the draw of
  // eta_c is N(xi w / (xi^2 + a), 1 / (xi^2 + a)) with a = A_cc / theta^2.
  const LatticeGrid g(5, 5);
  ModelSpec spec;
  spec.boundary_precision = 0.0;
  GibbsWorkspace ws(g);
  const auto y = checker(g);
  ChainState s = init_chain(spec, g, y, 1u);
  s.xi = 1.0;
  s.theta_sq = 4.0;
  for (auto& v : s.gamma_sq) v = 1.0;
  const std::size_t c = g.index(2, 2);
  std::fill(s.w.begin(), s.w.end(), 0.0);
  s.w[c] = 1.5;
  // Pin every other node at zero through a large diagonal weight: put a
  // tiny lambda (large 1/lambda) with w = 0 there.
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i != c) s.lambda[i] = 1e-12;
  const double a = 20.0 / s.theta_sq;
  Rng rng(77);
  std::vector<double> xs;
  for (int k = 0; k < 40000; ++k) {
    update_field(s, spec, ws, rng);
    xs.push_back(s.eta[c]);
  }
  CHECK(oracle::mean(xs) == doctest::Approx(1.5 / (1.0 + a)).epsilon(0.01));
  CHECK(oracle::variance(xs) == doctest::Approx(1.0 / (1.0 + a)).epsilon(0.03));
}

TEST_CASE("expansion and variance updates follow their conditionals") {
  const LatticeGrid g(6, 6);
  ModelSpec spec;
  GibbsWorkspace ws(g);
  const auto y = checker(g);
  ChainState s = init_chain(spec, g, y, 5u);
  Rng rng(8);
  for (auto& v : s.eta) v = rng.normal();
  for (auto& v : s.w) v = rng.normal();

  SUBCASE("xi") {
    double prec = 1.0, lin = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      prec += s.eta[i] * s.eta[i];
      lin += s.eta[i] * s.w[i];
    }
    std::vector<double> xs;
    for (int k = 0; k < 50000; ++k) {
      update_expansion(s, rng);
      xs.push_back(s.xi);
    }
    CHECK(std::abs(oracle::mean(xs) - lin / prec) < 5 * std::sqrt(1.0 / prec / xs.size()));
    CHECK(oracle::variance(xs) == doctest::Approx(1.0 / prec).epsilon(0.03));
  }
  SUBCASE("theta^2") {
    spec.rho = 3.0;
    spec.scale = 0.5;
    const auto inc = ws.op().apply(s.eta);
    double quad = 0.0;
    for (std::size_t j = 0; j < inc.size(); ++j) quad += inc[j] * inc[j] / s.gamma_sq[j];
    const double shape = 0.5 * (16 + 3.0), rate = 0.5 * quad + 0.5 * 3.0 * 0.25;
    std::vector<double> xs;
    for (int k = 0; k < 50000; ++k) {
      update_global_variance(s, spec, ws, rng);
      xs.push_back(s.theta_sq);
    }
    const double mean = rate / (shape - 1);
    const double sd = mean / std::sqrt(shape - 2);
    CHECK(std::abs(oracle::mean(xs) - mean) < 5 * sd / std::sqrt(xs.size()));
  }
  SUBCASE("gamma^2") {
    spec.nu = 5.0;
    s.theta_sq = 2.0;
    const auto inc = ws.op().apply(s.eta);
    std::vector<double> sum(inc.size(), 0.0);
    const int n = 40000;
    for (int k = 0; k < n; ++k) {
      update_local_variances(s, spec, ws, rng);
      for (std::size_t j = 0; j < inc.size(); ++j) sum[j] += 1.0 / s.gamma_sq[j];
    }
    // 1/gamma^2 ~ Gamma(3, inc^2/4 + 5/2): mean 3 / rate.
    for (std::size_t j = 0; j < inc.size(); ++j) {
      const double rate = inc[j] * inc[j] / 4.0 + 2.5;
      const double m = 3.0 / rate, sd = std::sqrt(3.0) / rate;
      CHECK(std::abs(sum[j] / n - m) < 5 * sd / std::sqrt(double(n)));
    }
  }
}

TEST_CASE("retention arithmetic and reproducibility") {
  const LatticeGrid g(8, 8);
  const auto y = checker(g);
  ChainConfig cfg;
  cfg.iterations = 100;
  cfg.burn_in = 50;
  cfg.thin = 10;
  cfg.seed = 42;
  const auto a = run_chain(ModelSpec{}, y, g, cfg, default_monitors(g, 5));
  CHECK(a.size() == 5);
  CHECK(cfg.retained() == 5);
  CHECK(a.iteration == std::vector<std::uint64_t>{60, 70, 80, 90, 100});
  CHECK(a.z.size() == 5 * 64);
  CHECK(a.gamma_sq.size() == 5 * 36);
  CHECK(a.traces.size() == 3);
  CHECK(a.traces[0].label == "center");
  CHECK(a.traces[1].label == "edge");
  CHECK(a.traces[2].voxel == 5);
  const auto b = run_chain(ModelSpec{}, y, g, cfg, default_monitors(g, 5));
  CHECK(a.z == b.z);
  CHECK(a.gamma_sq == b.gamma_sq);
  CHECK(a.theta_sq == b.theta_sq);
  cfg.seed = 43;
  const auto c = run_chain(ModelSpec{}, y, g, cfg);
  CHECK(a.z != c.z);

  ChainConfig bad = cfg;
  bad.burn_in = 100;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.thin = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("nonadaptive fit keeps gamma^2 at one") {
  const LatticeGrid g(7, 7);
  ModelSpec spec;
  spec.adaptive = false;
  ChainConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 10;
  cfg.thin = 5;
  const auto s = run_chain(spec, checker(g), g, cfg);
  for (double v : s.gamma_sq) CHECK(v == 1.0);
}

TEST_CASE("r = 0 leaves every miscoding flag at zero") {
  const LatticeGrid g(7, 7);
  ChainConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 10;
  cfg.thin = 5;
  for (const Link& link : {Link::probit(), Link::logit(), Link::student_t(3), Link::laplace()}) {
    ModelSpec spec;
    spec.link = link;
    const auto s = run_chain(spec, checker(g), g, cfg);
    for (auto v : s.psi) CHECK(v == 0);
    spec.miscoding = 0.2;
    const auto r = run_chain(spec, checker(g), g, cfg);
    CHECK(std::count(r.psi.begin(), r.psi.end(), 1) > 0);
  }
}

TEST_CASE("wide lattices are solved transposed and reported in caller order") {
  // A 6 x 11 field and its 11 x 6 transpose must give transposed streams.
  const LatticeGrid wide(6, 11), tall(11, 6);
  std::vector<std::uint8_t> y(wide.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 3) == 0;
  const auto yt = transpose_field<std::uint8_t>(y, 6, 11);
  ChainConfig cfg;
  cfg.iterations = 30;
  cfg.burn_in = 10;
  cfg.thin = 10;
  const auto a = run_chain(ModelSpec{}, y, wide, cfg, default_monitors(wide, std::nullopt));
  const auto b = run_chain(ModelSpec{}, yt, tall, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    const auto za = a.z_sample(s);
    const auto zt = transpose_field<double>(b.z_sample(s), 11, 6);
    for (std::size_t i = 0; i < za.size(); ++i) CHECK(za[i] == zt[i]);
    const auto ga = a.gamma_sample(s);
    const auto gt = transpose_field<double>(b.gamma_sample(s), 9, 4);
    for (std::size_t j = 0; j < ga.size(); ++j) CHECK(ga[j] == gt[j]);
  }
  // Monitor at the lattice centre reports the caller's voxel.
  CHECK(a.traces[0].voxel == wide.index(3, 5));
  CHECK(a.traces[0].z.back() == a.z_sample(a.size() - 1)[wide.index(3, 5)]);
}

TEST_CASE("multiple chains use distinct streams") {
  const LatticeGrid g(7, 7);
  ChainConfig cfg;
  cfg.iterations = 40;
  cfg.burn_in = 20;
  cfg.thin = 5;
  cfg.chains = 3;
  cfg.threads = 2;
  const auto chains = run_chains(ModelSpec{}, checker(g), g, cfg);
  REQUIRE(chains.size() == 3);
  CHECK(chains[0].z != chains[1].z);
  const auto single = run_chain(ModelSpec{}, checker(g), g, cfg, {}, 2);
  CHECK(single.z == chains[2].z);
}

TEST_CASE("every link runs on simulation data without failure") {
  const LatticeGrid g(20, 20);
  const auto truth = bimodal_truth(g);
  const auto y = sample_peaks(truth, 4);
  ChainConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 200;
  cfg.thin = 5;
  for (const Link& link : {Link::probit(), Link::logit(), Link::student_t(5), Link::laplace()}) {
    ModelSpec spec;
    spec.link = link;
    spec.miscoding = 0.01;
    const auto s = run_chain(spec, y.y, g, cfg);
    const auto sum = summarize(s, link);
    // Fitted map is closer to the truth than a flat guess at the base rate.
    const double base = double(y.count()) / double(g.size());
    CHECK(mspe(sum.prob_map, truth.p) <
          mspe(std::vector<double>(g.size(), base), truth.p));
  }
}
