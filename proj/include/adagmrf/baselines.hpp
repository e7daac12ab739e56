#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adagmrf/lattice.hpp"
#include "adagmrf/random.hpp"

namespace adagmrf {

// Fixed-width smoothing kernel. Widths are in the grid's physical units
// (lattice cells unless the frame carries a millimetre spacing).
struct KernelSpec {
  enum class Kind { gaussian, sphere };
  Kind kind = Kind::gaussian;
  double width = 10.0;  // FWHM for gaussian, radius for sphere

  static KernelSpec gaussian_fwhm(double fwhm) { return {Kind::gaussian, fwhm}; }
  static KernelSpec sphere(double radius) { return {Kind::sphere, radius}; }

  // Gaussian standard deviation, fwhm / (2 sqrt(2 ln 2)).
  double sigma() const;
};

double fwhm_to_sigma(double fwhm);

// Square stencil of kernel weights centred at (half, half), in cells.
struct KernelStencil {
  int half = 0;
  std::vector<double> weights;  // (2 half + 1)^2, row-major
  double at(int dr, int dc) const {
    return weights[std::size_t(dr + half) * (2 * half + 1) + (dc + half)];
  }
};

// Gaussian weights sum to one over the untruncated stencil; sphere weights
// are 1 inside the radius. Throws DomainError for non-positive widths and
// DimensionError when the kernel is wider than the lattice.
KernelStencil make_stencil(const KernelSpec& spec, const LatticeGrid& grid);

// Convolution of the binary peak indicator with the kernel, zero padded.
std::vector<double> kernel_map(std::span<const std::uint8_t> peaks,
                               const KernelSpec& spec, const LatticeGrid& grid);

// Optional support for null peaks; empty means the whole lattice.
using NullMask = std::span<const std::uint8_t>;

// Pooled-null (1 - alpha) quantile of kernel-map values over n_perm maps of
// n_peaks uniformly placed distinct peaks.
double mc_threshold(std::size_t n_peaks, const KernelSpec& spec,
                    const LatticeGrid& grid, double alpha, std::size_t n_perm,
                    Rng& rng, NullMask mask = {});

// 1 where map > threshold.
std::vector<std::uint8_t> significant_voxels(std::span<const double> map,
                                             double threshold);

}  // namespace adagmrf
