#include "adagmrf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

void splat(const KernelStencil& k, const LatticeGrid& grid, std::size_t peak,
           std::vector<double>& out) {
  const auto [pr, pc] = grid.coords(peak);
  const int r0 = std::max(pr - k.half, 0), r1 = std::min(pr + k.half, grid.rows() - 1);
  const int c0 = std::max(pc - k.half, 0), c1 = std::min(pc + k.half, grid.cols() - 1);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) out[grid.index(r, c)] += k.at(r - pr, c - pc);
}

}  // namespace

double fwhm_to_sigma(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

double KernelSpec::sigma() const { return fwhm_to_sigma(width); }

KernelStencil make_stencil(const KernelSpec& spec, const LatticeGrid& grid) {
  if (!(spec.width > 0.0)) throw DomainError("kernel width must be positive");
  const double cells = spec.width / grid.frame().spacing;
  const int extent = std::min(grid.rows(), grid.cols());
  KernelStencil k;
  if (spec.kind == KernelSpec::Kind::sphere) {
    if (2.0 * cells > extent)
      throw DimensionError("sphere kernel diameter exceeds the lattice");
    k.half = int(std::floor(cells));
    const int side = 2 * k.half + 1;
    k.weights.assign(std::size_t(side) * side, 0.0);
    for (int dr = -k.half; dr <= k.half; ++dr)
      for (int dc = -k.half; dc <= k.half; ++dc)
        if (dr * dr + dc * dc <= cells * cells + 1e-9)
          k.weights[std::size_t(dr + k.half) * side + (dc + k.half)] = 1.0;
    return k;
  }
  if (cells > extent)
    throw DimensionError("gaussian kernel FWHM exceeds the lattice");
  const double sigma = fwhm_to_sigma(cells);
  k.half = std::max(1, int(std::ceil(4.0 * sigma)));
  const int side = 2 * k.half + 1;
  k.weights.assign(std::size_t(side) * side, 0.0);
  for (int dr = -k.half; dr <= k.half; ++dr)
    for (int dc = -k.half; dc <= k.half; ++dc)
      k.weights[std::size_t(dr + k.half) * side + (dc + k.half)] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
  const double total = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
  for (double& v : k.weights) v /= total;
  return k;
}

std::vector<double> kernel_map(std::span<const std::uint8_t> peaks,
                               const KernelSpec& spec,
                               const LatticeGrid& grid) {
  if (peaks.size() != grid.size())
    throw DimensionError("kernel_map: peak field does not match lattice");
  const KernelStencil k = make_stencil(spec, grid);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < peaks.size(); ++i)
    if (peaks[i]) splat(k, grid, i, out);
  return out;
}

double mc_threshold(std::size_t n_peaks, const KernelSpec& spec,
                    const LatticeGrid& grid, double alpha, std::size_t n_perm,
                    Rng& rng, NullMask mask) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("alpha must lie in (0, 1]");
  if (n_perm == 0) throw DomainError("n_perm must be positive");
  if (n_peaks == 0) return 0.0;

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (mask.empty() || mask[i]) support.push_back(i);
  if (!mask.empty() && mask.size() != grid.size())
    throw DimensionError("null mask does not match lattice");
  if (n_peaks > support.size())
    throw DomainError("more null peaks than admissible voxels");

  const KernelStencil k = make_stencil(spec, grid);
  const std::uint64_t master = rng.next_u64();
  std::vector<double> pooled;
  pooled.reserve(n_perm * grid.size());
  std::vector<double> map(grid.size());
  std::vector<std::size_t> slots = support;
  for (std::size_t p = 0; p < n_perm; ++p) {
    Rng sub = Rng::substream(master, p);
    std::fill(map.begin(), map.end(), 0.0);
    // Partial Fisher-Yates: first n_peaks slots are a uniform subset.
    for (std::size_t j = 0; j < n_peaks; ++j) {
      const std::size_t pick = j + sub.below(slots.size() - j);
      std::swap(slots[j], slots[pick]);
      splat(k, grid, slots[j], map);
    }
    pooled.insert(pooled.end(), map.begin(), map.end());
  }
  // Inverse-ECDF quantile: smallest value with ECDF >= 1 - alpha.
  const double rank = std::ceil((1.0 - alpha) * double(pooled.size()));
  const std::size_t idx = rank < 1.0 ? 0 : std::size_t(rank) - 1;
  std::nth_element(pooled.begin(), pooled.begin() + idx, pooled.end());
  return pooled[idx];
}

std::vector<std::uint8_t> significant_voxels(std::span<const double> map,
                                             double threshold) {
  std::vector<std::uint8_t> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = map[i] > threshold;
  return out;
}

}  // namespace adagmrf
