#include "adagmrf/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "adagmrf/errors.hpp"
#include "adagmrf/random.hpp"

namespace adagmrf {

std::size_t PeakField::count() const {
  return std::accumulate(y.begin(), y.end(), std::size_t{0});
}

double bimodal_probability(double x1, double x2) {
  const double sharp =
      6.0 * std::exp(-2.5 * ((x1 - 2.0) * (x1 - 2.0) + (x2 - 2.0) * (x2 - 2.0)));
  const double broad = 3.0 * std::exp(-(x1 * x1 + x2 * x2) / 10.0);
  return 0.5 * std::erfc(-(sharp + broad - 3.0) / std::numbers::sqrt2);
}

TruthMap bimodal_truth(const LatticeGrid& grid, Domain domain) {
  TruthMap t{grid, std::vector<double>(grid.size())};
  const auto coord = [&](int k, int extent) {
    return domain.lo + (domain.hi - domain.lo) * k / double(extent - 1);
  };
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      t.p[grid.index(r, c)] =
          bimodal_probability(coord(r, grid.rows()), coord(c, grid.cols()));
  return t;
}

TruthMap two_disc_truth(const LatticeGrid& grid, const TwoDiscOptions& opts) {
  if (!(opts.peak_prob >= 0.0 && opts.peak_prob <= 1.0) ||
      !(opts.background >= 0.0 && opts.background <= 1.0))
    throw DomainError("disc probabilities must lie in [0, 1]");
  for (const Disc& d : opts.discs) {
    if (!(d.radius > 0.0)) throw DomainError("disc radius must be positive");
    if (d.row < 0.0 || d.col < 0.0 || d.row > grid.rows() - 1 ||
        d.col > grid.cols() - 1)
      throw DimensionError("disc centre lies outside the lattice");
  }
  TruthMap t{grid, std::vector<double>(grid.size(), opts.background)};
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      double& p = t.p[grid.index(r, c)];
      for (const Disc& d : opts.discs) {
        const double dist = std::hypot(r - d.row, c - d.col);
        if (dist >= d.radius) continue;
        double v = opts.peak_prob;
        if (opts.profile == DiscProfile::raised_cosine)
          v = opts.background + (opts.peak_prob - opts.background) * 0.5 *
                                    (1.0 + std::cos(std::numbers::pi * dist / d.radius));
        p = std::max(p, v);
      }
    }
  }
  return t;
}

std::vector<std::uint8_t> disc_mask(const LatticeGrid& grid,
                                    const std::vector<Disc>& discs) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      for (const Disc& d : discs)
        if (std::hypot(r - d.row, c - d.col) < d.radius)
          mask[grid.index(r, c)] = 1;
  return mask;
}

PeakField sample_peaks(const TruthMap& truth, std::uint64_t seed) {
  Rng rng(seed);
  PeakField f{truth.grid, std::vector<std::uint8_t>(truth.p.size())};
  for (std::size_t i = 0; i < truth.p.size(); ++i)
    f.y[i] = rng.uniform() < truth.p[i] ? 1 : 0;
  return f;
}

}  // namespace adagmrf
