#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "adagmrf/lattice.hpp"
#include "adagmrf/model.hpp"
#include "adagmrf/random.hpp"

namespace adagmrf {

// Local variances are clamped to this range after every draw.
inline constexpr double kMinGammaSq = 1e-12;
inline constexpr double kMaxGammaSq = 1e12;

// All Gibbs variables. The latent field entering the link is z = xi * eta.
struct ChainState {
  std::vector<double> eta;
  double xi = 1.0;
  double theta_sq = 1.0;
  std::vector<double> gamma_sq;  // one per stencil row
  std::vector<double> w;
  std::vector<double> lambda;    // logit / scale-mixture variances, else 1
  std::vector<std::uint8_t> psi;

  double z(std::size_t i) const { return xi * eta[i]; }
  std::vector<double> latent_field() const;
};

struct ChainConfig {
  std::size_t iterations = 15000;
  std::size_t burn_in = 5000;
  std::size_t thin = 10;
  std::uint64_t seed = 1;
  std::size_t chains = 1;
  // Worker threads for multi-chain runs; 0 = one per chain.
  std::size_t threads = 0;

  void validate() const;
  std::size_t retained() const {
    return iterations > burn_in ? (iterations - burn_in) / thin : 0;
  }
};

// Per-iteration scratch space and the fixed stencil for one lattice.
class GibbsWorkspace {
 public:
  explicit GibbsWorkspace(const LatticeGrid& grid);

  const LatticeGrid& grid() const { return grid_; }
  const DiffOperator& op() const { return op_; }

  BandedMatrix precision;
  std::vector<double> linear_term;
  std::vector<double> increments;
  std::vector<double> boundary;  // 1 on boundary nodes, 0 inside

 private:
  LatticeGrid grid_;
  DiffOperator op_;
};

// eta = 0, xi = 1, theta^2 = 1, gamma^2 = 1, lambda = 1, psi = 0 and each w_i
// drawn from the link's latent distribution truncated to the side of y_i.
ChainState init_chain(const ModelSpec& spec, const LatticeGrid& grid,
                      std::span<const std::uint8_t> y, Rng& rng);
ChainState init_chain(const ModelSpec& spec, const LatticeGrid& grid,
                      std::span<const std::uint8_t> y, std::uint64_t seed);

// Individual conditional updates, exposed for testing. Weights are
// 1 / lambda_i (all ones for probit).
void update_field(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                  Rng& rng);
void update_expansion(ChainState& s, Rng& rng);
void update_local_variances(ChainState& s, const ModelSpec& spec,
                            GibbsWorkspace& ws, Rng& rng);
void update_global_variance(ChainState& s, const ModelSpec& spec,
                            GibbsWorkspace& ws, Rng& rng);

// Mixing-variance conditional for a scale-mixture link given residual
// w - z: inverse gamma for student-t, reciprocal inverse Gaussian for Laplace.
double sample_mixing_variance(const Link& link, double residual, Rng& rng);

// Draw psi from its conditional, then w (and lambda for logit) on the side
// dictated by y_i + psi_i = 1.
void robustify_step(ChainState& s, const ModelSpec& spec,
                    std::span<const std::uint8_t> y, Rng& rng);

// Full sweeps: latent variables, then eta, xi, gamma^2, theta^2.
void probit_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                 std::span<const std::uint8_t> y, Rng& rng);
void logit_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                std::span<const std::uint8_t> y, Rng& rng);
void smn_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
              std::span<const std::uint8_t> y, Rng& rng);

// Dispatch on spec.link.
void gibbs_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                std::span<const std::uint8_t> y, Rng& rng);

// Trace of one monitored voxel at every retained iteration.
struct MonitorTrace {
  std::string label;
  std::size_t voxel = 0;
  std::size_t stencil_row = 0;  // gamma^2 index nearest the voxel
  std::vector<double> z;
  std::vector<double> w;
  std::vector<double> gamma_sq;
};

// Retained samples of one chain, in the caller's lattice ordering.
struct SampleStream {
  int rows = 0;
  int cols = 0;
  std::size_t n = 0;  // voxels
  std::size_t m = 0;  // stencil rows
  std::vector<std::uint64_t> iteration;
  std::vector<double> z;         // samples x n
  std::vector<double> gamma_sq;  // samples x m
  std::vector<double> theta_sq;
  std::vector<double> delta;     // |xi| * theta
  std::vector<std::uint8_t> psi; // samples x n
  std::vector<MonitorTrace> traces;

  std::size_t size() const { return iteration.size(); }
  bool empty() const { return iteration.empty(); }
  std::span<const double> z_sample(std::size_t s) const {
    return {z.data() + s * n, n};
  }
  std::span<const double> gamma_sample(std::size_t s) const {
    return {gamma_sq.data() + s * m, m};
  }
  std::span<const std::uint8_t> psi_sample(std::size_t s) const {
    return {psi.data() + s * n, n};
  }

  // Concatenate another chain's samples (same lattice). Traces are appended
  // per monitor.
  void append(const SampleStream& other);
};

// Raised when a sweep fails; holds everything retained before the failure.
class ChainAborted : public std::runtime_error {
 public:
  ChainAborted(const std::string& what, std::size_t iteration,
               SampleStream partial)
      : std::runtime_error(what),
        iteration_(iteration),
        partial_(std::move(partial)) {}
  std::size_t iteration() const noexcept { return iteration_; }
  const SampleStream& partial() const noexcept { return partial_; }

 private:
  std::size_t iteration_;
  SampleStream partial_;
};

// Default monitors: lattice centre and the interior node next to the top
// boundary, plus an optional user voxel.
std::vector<std::size_t> default_monitors(const LatticeGrid& grid,
                                          std::optional<std::size_t> extra);

// Run one chain with the random stream Rng::substream(cfg.seed, chain_index).
SampleStream run_chain(const ModelSpec& spec, std::span<const std::uint8_t> y,
                       const LatticeGrid& grid, const ChainConfig& cfg,
                       std::span<const std::size_t> monitors = {},
                       std::size_t chain_index = 0);

// cfg.chains independent chains, in parallel on up to cfg.threads workers.
std::vector<SampleStream> run_chains(const ModelSpec& spec,
                                     std::span<const std::uint8_t> y,
                                     const LatticeGrid& grid,
                                     const ChainConfig& cfg,
                                     std::span<const std::size_t> monitors = {});

}  // namespace adagmrf
