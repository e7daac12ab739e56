#include <doctest.h>

#include <sstream>

#include "adagmrf/errors.hpp"
#include "adagmrf/lattice.hpp"
#include "oracles.hpp"

using namespace adagmrf;

namespace {

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Dense B' diag(1/g) B straight from the operator's dense form.
oracle::Dense dense_precision(const DiffOperator& op, const std::vector<double>& g) {
  const auto b = op.to_dense();
  const std::size_t m = op.rows(), n = op.cols();
  oracle::Dense db = b;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) db[j * n + i] /= g[j];
  return oracle::matmul(oracle::transpose(b, m, n), db, n, m, n);
}

}  // namespace

TEST_CASE("lattice geometry and dimension checks") {
  LatticeGrid g(6, 9);
  CHECK(g.size() == 54);
  CHECK(g.interior_count() == 4 * 7);
  CHECK(g.null_space_dim() == 2 * 6 + 2 * 9 - 4);
  CHECK(g.index(2, 3) == 21);
  CHECK(g.coords(21) == std::pair{2, 3});
  CHECK(g.is_boundary(g.index(0, 4)));
  CHECK_FALSE(g.is_boundary(g.index(1, 1)));
  CHECK(g.transposed().rows() == 9);
  CHECK_THROWS_AS(LatticeGrid(4, 10), DimensionError);
  CHECK_THROWS_AS(LatticeGrid(10, 3), DimensionError);
}

TEST_CASE("transpose_field round trip") {
  std::vector<int> f(4 * 7);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = int(i);
  const auto t = transpose_field<int>(f, 4, 7);
  CHECK(t[1] == 7);  // (row 1, col 0) of the original
  CHECK(transpose_field<int>(t, 7, 4) == f);
}

TEST_CASE("difference operator shape and stencil") {
  const auto op5 = build_diff_operator(LatticeGrid(5, 5));
  CHECK(op5.rows() == 9);
  CHECK(op5.cols() == 25);
  for (std::size_t r = 0; r < op5.rows(); ++r) {
    auto v = op5.row_values(r);
    std::vector<int> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{-4, 1, 1, 1, 1});
  }
  const auto op30 = build_diff_operator(LatticeGrid(30, 30));
  CHECK(op30.rows() == 784);
  CHECK(op30.cols() == 900);
  std::vector<double> c(900, 3.25);
  for (double v : op30.apply(c)) CHECK(v == 0.0);
}

TEST_CASE("assembled precision reproduces the interior stencil pattern") {
  const LatticeGrid g(9, 9);
  const auto op = build_diff_operator(g);
  const auto a = assemble_precision(op, ones(op.rows()));
  CHECK(a.matrix.bandwidth() == 2 * 9);
  for (int r = 2; r <= 6; ++r) {
    for (int c = 2; c <= 6; ++c) {
      const std::size_t i = g.index(r, c);
      for (int dr = -2; dr <= 2; ++dr) {
        for (int dc = -2; dc <= 2; ++dc) {
          const int ad = std::abs(dr) + std::abs(dc);
          double expect = 0.0;
          if (ad == 0) expect = 20;
          else if (ad == 1) expect = -8;
          else if (ad == 2 && dr != 0 && dc != 0) expect = 2;
          else if (ad == 2) expect = 1;
          CHECK(a.matrix(i, g.index(r + dr, c + dc)) == expect);
        }
      }
      // Nothing outside the 13-point stencil.
      double total = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) total += std::abs(a.matrix(i, j));
      CHECK(total == 20 + 4 * 8 + 4 * 2 + 4 * 1);
    }
  }
}

TEST_CASE("5x5 centre row and gamma scaling") {
  const LatticeGrid g(5, 5);
  const auto op = build_diff_operator(g);
  const auto a = assemble_precision(op, ones(9));
  const std::size_t c = g.index(2, 2);
  CHECK(a.matrix(c, c) == 20);
  CHECK(a.matrix(c, g.index(1, 2)) == -8);
  CHECK(a.matrix(c, g.index(1, 1)) == 2);
  CHECK(a.matrix(c, g.index(0, 2)) == 1);
  const auto half = assemble_precision(op, std::vector<double>(9, 2.0));
  const auto d1 = a.matrix.to_dense(), d2 = half.matrix.to_dense();
  for (std::size_t k = 0; k < d1.size(); ++k) CHECK(d2[k] == d1[k] / 2);
}

TEST_CASE("conditional mean matches the weighted stencil combination") {
  const LatticeGrid g(11, 11);
  const auto op = build_diff_operator(g);
  const auto a = assemble_precision(op, ones(op.rows()));
  Rng rng(5);
  std::vector<double> z(g.size());
  for (double& v : z) v = rng.normal();
  const auto at = [&](int r, int c) { return z[g.index(r, c)]; };
  for (int r = 2; r <= 8; ++r) {
    for (int c = 2; c <= 8; ++c) {
      const std::size_t i = g.index(r, c);
      double s = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j)
        if (j != i) s += a.matrix(i, j) * z[j];
      const double from_precision = -s / a.matrix(i, i);
      const double weights =
          (8 * (at(r - 1, c) + at(r + 1, c) + at(r, c - 1) + at(r, c + 1)) -
           2 * (at(r - 1, c - 1) + at(r - 1, c + 1) + at(r + 1, c - 1) + at(r + 1, c + 1)) -
           (at(r - 2, c) + at(r + 2, c) + at(r, c - 2) + at(r, c + 2))) /
          20.0;
      CHECK(from_precision == doctest::Approx(weights).epsilon(1e-13));
    }
  }
}

TEST_CASE("quadratic form equals the sum of weighted squared increments") {
  const LatticeGrid g(8, 13);
  const auto op = build_diff_operator(g);
  Rng rng(11);
  std::vector<double> gam(op.rows()), z(g.size());
  for (double& v : gam) v = std::exp(rng.normal());
  for (double& v : z) v = rng.normal();
  const auto a = assemble_precision(op, gam);
  const auto b = op.to_dense();
  double direct = 0.0;
  for (std::size_t j = 0; j < op.rows(); ++j) {
    double inc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) inc += b[j * g.size() + i] * z[i];
    direct += inc * inc / gam[j];
  }
  CHECK(a.matrix.quadratic_form(z) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(a.quadratic_form(op, z) == doctest::Approx(direct).epsilon(1e-12));

  const auto dense = dense_precision(op, gam);
  const auto banded = a.matrix.to_dense();
  for (std::size_t k = 0; k < dense.size(); ++k)
    CHECK(banded[k] == doctest::Approx(dense[k]).epsilon(1e-12));
}

TEST_CASE("null space holds affine fields and rank is the interior count") {
  const LatticeGrid g(6, 6);
  const auto op = build_diff_operator(g);
  const auto a = assemble_precision(op, ones(op.rows()));
  CHECK(oracle::rank(a.matrix.to_dense(), 36, 36) == 16);
  CHECK(36 - 16 == g.null_space_dim());

  const LatticeGrid h(7, 10);
  const auto oph = build_diff_operator(h);
  Rng rng(2);
  std::vector<double> gam(oph.rows());
  for (double& v : gam) v = 0.5 + rng.uniform();
  const auto ah = assemble_precision(oph, gam);
  CHECK(oracle::rank(ah.matrix.to_dense(), h.size(), h.size()) == h.interior_count());
  std::vector<double> z(h.size()), out(h.size());
  for (int r = 0; r < h.rows(); ++r)
    for (int c = 0; c < h.cols(); ++c) z[h.index(r, c)] = 1.5 - 0.25 * r + 0.75 * c;
  ah.matrix.multiply(z, out);
  for (double v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("non-positive local variance is rejected") {
  const auto op = build_diff_operator(LatticeGrid(5, 5));
  std::vector<double> g(9, 1.0);
  g[4] = 0.0;
  CHECK_THROWS_AS(assemble_precision(op, g), DomainError);
  g[4] = -1.0;
  CHECK_THROWS_AS(assemble_precision(op, g), DomainError);
}

TEST_CASE("banded Cholesky") {
  SUBCASE("identity and diagonal") {
    BandedMatrix m(2, 1);
    m.at(0, 0) = 4;
    m.at(1, 1) = 9;
    const auto l = banded_cholesky(m);
    CHECK(l.at(0, 0) == 2);
    CHECK(l.at(1, 1) == 3);
    CHECK(l.at(1, 0) == 0);
    BandedMatrix eye(5, 2);
    eye.add_diagonal(1.0);
    const auto li = banded_cholesky(eye);
    CHECK(li.to_dense() == eye.to_dense());
  }
  SUBCASE("round trip on A + I") {
    const LatticeGrid g(6, 6);
    const auto op = build_diff_operator(g);
    auto m = assemble_precision(op, ones(op.rows())).matrix;
    m.add_diagonal(1.0);
    const auto l = banded_cholesky(m);
    CHECK(l.bandwidth() == m.bandwidth());
    // The lower band holds L; rebuild the lower triangle explicitly.
    oracle::Dense ld(36 * 36, 0.0);
    for (std::size_t i = 0; i < 36; ++i)
      for (std::size_t j = l.row_begin(i); j <= i; ++j) ld[i * 36 + j] = l.at(i, j);
    const auto llt = oracle::matmul(ld, oracle::transpose(ld, 36, 36), 36, 36, 36);
    const auto md = m.to_dense();
    double err = 0.0;
    for (std::size_t k = 0; k < md.size(); ++k) err = std::max(err, std::abs(llt[k] - md[k]));
    CHECK(err < 1e-10);

    std::vector<double> x(36), b(36);
    Rng rng(3);
    for (double& v : x) v = rng.normal();
    m.multiply(x, b);
    solve_lower(l, b);
    solve_upper(l, b);
    for (std::size_t i = 0; i < 36; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-10));
  }
  SUBCASE("singular input reports the pivot") {
    const auto op = build_diff_operator(LatticeGrid(5, 5));
    auto m = assemble_precision(op, ones(9)).matrix;
    try {
      banded_cholesky(m);
      FAIL("expected a factorization error");
    } catch (const FactorizationError& e) {
      CHECK(e.pivot() < 25);
    }
  }
}

TEST_CASE("Gaussian field draws") {
  SUBCASE("one-dimensional conjugate case") {
    BandedMatrix q(1, 0);
    q.at(0, 0) = 4.0;
    std::vector<double> b{8.0};
    Rng rng(9);
    std::vector<double> xs;
    for (int k = 0; k < 100000; ++k) xs.push_back(sample_gaussian_field(q, b, rng)[0]);
    CHECK(oracle::mean(xs) == doctest::Approx(2.0).epsilon(0.005));
    CHECK(oracle::variance(xs) == doctest::Approx(0.25).epsilon(0.02));
  }
  SUBCASE("identity precision") {
    BandedMatrix q(3, 1);
    q.add_diagonal(1.0);
    std::vector<double> b(3, 0.0);
    Rng rng(1);
    std::vector<double> sum(3, 0.0);
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
      const auto x = sample_gaussian_field(q, b, rng);
      for (int i = 0; i < 3; ++i) sum[i] += x[i];
    }
    for (double s : sum) CHECK(std::abs(s / n) < 0.01);
  }
  SUBCASE("covariance matches the dense inverse on 6x6") {
    const LatticeGrid g(6, 6);
    const auto op = build_diff_operator(g);
    auto q = assemble_precision(op, ones(op.rows())).matrix;
    q.add_diagonal(1.0);
    const std::size_t n = 36;
    const auto sigma = oracle::inverse(q.to_dense(), n);
    std::vector<double> b(n, 0.0);
    b[7] = 1.0;  // non-zero mean at one node
    std::vector<double> mu(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) mu[i] = sigma[i * n + 7];

    Rng rng(21);
    const int draws = 100000;
    std::vector<double> m1(n, 0.0), m2(n * n, 0.0);
    for (int k = 0; k < draws; ++k) {
      const auto x = sample_gaussian_field(q, b, rng);
      for (std::size_t i = 0; i < n; ++i) {
        m1[i] += x[i];
        for (std::size_t j = 0; j <= i; ++j) m2[i * n + j] += (x[i] - mu[i]) * (x[j] - mu[j]);
      }
    }
    int bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double se_mean = std::sqrt(sigma[i * n + i] / draws);
      if (std::abs(m1[i] / draws - mu[i]) > 5 * se_mean) ++bad;
      for (std::size_t j = 0; j <= i; ++j) {
        const double s = sigma[i * n + j];
        // Var of x_i x_j for a centred Gaussian pair.
        const double se = std::sqrt((sigma[i * n + i] * sigma[j * n + j] + s * s) / draws);
        if (std::abs(m2[i * n + j] / draws - s) > 5 * se) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("coordinate dump lists the lower triangle") {
  BandedMatrix m(3, 1);
  m.at(0, 0) = 2;
  m.at(1, 0) = -1;
  m.at(1, 1) = 2;
  m.at(2, 2) = 0.5;
  std::ostringstream os;
  m.write_coordinates(os);
  CHECK(os.str() == "0 0 2\n1 0 -1\n1 1 2\n2 2 0.5\n");
}
