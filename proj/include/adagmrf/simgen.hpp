#pragma once

#include <cstdint>
#include <vector>

#include "adagmrf/lattice.hpp"

namespace adagmrf {

// Binary observation lattice: 1 where a peak was reported.
struct PeakField {
  LatticeGrid grid;
  std::vector<std::uint8_t> y;

  std::size_t count() const;
};

// Per-voxel probability of a reported peak.
struct TruthMap {
  LatticeGrid grid;
  std::vector<double> p;
};

// Square coordinate window the bimodal surface is evaluated on.
struct Domain {
  double lo = -2.0;
  double hi = 7.0;
};

// Phi(6 exp(-5/2 ((x1-2)^2 + (x2-2)^2)) + 3 exp(-(x1^2 + x2^2)/10) - 3).
double bimodal_probability(double x1, double x2);

// Bimodal surface sampled on an evenly spaced grid spanning `domain` in both
// directions (rows carry x1, columns x2).
TruthMap bimodal_truth(const LatticeGrid& grid, Domain domain = {});

struct Disc {
  double row = 0.0;
  double col = 0.0;
  double radius = 6.0;
};

enum class DiscProfile { raised_cosine, flat };

struct TwoDiscOptions {
  std::vector<Disc> discs{{20.0, 20.0, 6.0}, {44.0, 44.0, 6.0}};
  double peak_prob = 0.4;
  double background = 0.01;
  DiscProfile profile = DiscProfile::raised_cosine;
};

// Background probability everywhere, raised inside each disc; overlapping
// discs take the larger value. Throws DimensionError for a disc outside the
// lattice and DomainError for probabilities outside [0, 1].
TruthMap two_disc_truth(const LatticeGrid& grid, const TwoDiscOptions& opts = {});

// 1 where a voxel lies strictly inside any disc (distance < radius).
std::vector<std::uint8_t> disc_mask(const LatticeGrid& grid,
                                    const std::vector<Disc>& discs);

// Independent Bernoulli(p_i) per voxel.
PeakField sample_peaks(const TruthMap& truth, std::uint64_t seed);

}  // namespace adagmrf
