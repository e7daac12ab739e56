#include "adagmrf/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "adagmrf/distributions.hpp"
#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

TruncationSide side_for(bool positive) {
  return positive ? TruncationSide::positive : TruncationSide::nonpositive;
}

// Draw w_i (and its mixing scale where the link augments jointly) given the
// side of zero it must fall on.
void draw_latent(ChainState& s, const Link& link, std::size_t i,
                 TruncationSide side, Rng& rng) {
  const double z = s.z(i);
  switch (link.kind) {
    case LinkKind::probit:
      s.w[i] = sample_truncated_normal(z, 1.0, side, rng);
      break;
    case LinkKind::logit:
      // Joint {w, lambda}: w from its lambda-marginal, then lambda | w.
      s.w[i] = sample_truncated_logistic(z, 1.0, side, rng);
      s.lambda[i] = sample_lambda_ks(s.w[i] - z, rng);
      break;
    case LinkKind::student_t:
    case LinkKind::laplace:
      s.w[i] = sample_truncated_normal(z, s.lambda[i], side, rng);
      break;
  }
}

void update_latent(ChainState& s, const ModelSpec& spec,
                   std::span<const std::uint8_t> y, Rng& rng) {
  if (spec.miscoding > 0.0) {
    robustify_step(s, spec, y, rng);
    return;
  }
  for (std::size_t i = 0; i < y.size(); ++i)
    draw_latent(s, spec.link, i, side_for(y[i] == 1), rng);
}

void update_mixing(ChainState& s, const ModelSpec& spec, Rng& rng) {
  for (std::size_t i = 0; i < s.w.size(); ++i)
    s.lambda[i] = sample_mixing_variance(spec.link, s.w[i] - s.z(i), rng);
}

void update_parameters(ChainState& s, const ModelSpec& spec,
                       GibbsWorkspace& ws, Rng& rng) {
  update_field(s, spec, ws, rng);
  update_expansion(s, rng);
  if (spec.adaptive) update_local_variances(s, spec, ws, rng);
  update_global_variance(s, spec, ws, rng);
}

void check_inputs(const LatticeGrid& grid, std::span<const std::uint8_t> y) {
  if (y.size() != grid.size())
    throw DimensionError("peak field has " + std::to_string(y.size()) +
                         " voxels, lattice has " +
                         std::to_string(grid.size()));
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > 1)
      throw DomainError("peak field entry " + std::to_string(i) +
                        " is not binary");
}

}  // namespace

std::vector<double> ChainState::latent_field() const {
  std::vector<double> z(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) z[i] = xi * eta[i];
  return z;
}

void ChainConfig::validate() const {
  if (iterations == 0) throw DomainError("iterations must be positive");
  if (burn_in >= iterations)
    throw DomainError("burn-in must be smaller than iterations");
  if (thin == 0) throw DomainError("thin must be positive");
  if (chains == 0) throw DomainError("chains must be positive");
}

GibbsWorkspace::GibbsWorkspace(const LatticeGrid& grid)
    : grid_(grid), op_(build_diff_operator(grid)) {
  precision = BandedMatrix(grid.size(), op_.precision_bandwidth());
  linear_term.assign(grid.size(), 0.0);
  increments.assign(op_.rows(), 0.0);
  boundary.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    boundary[i] = grid.is_boundary(i) ? 1.0 : 0.0;
}

ChainState init_chain(const ModelSpec& spec, const LatticeGrid& grid,
                      std::span<const std::uint8_t> y, Rng& rng) {
  spec.validate();
  check_inputs(grid, y);
  const std::size_t n = grid.size();
  ChainState s;
  s.eta.assign(n, 0.0);
  s.xi = 1.0;
  s.theta_sq = 1.0;
  s.gamma_sq.assign(grid.interior_count(), 1.0);
  s.w.assign(n, 0.0);
  s.lambda.assign(n, 1.0);
  s.psi.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto side = side_for(y[i] == 1);
    if (spec.link.kind == LinkKind::logit)
      s.w[i] = sample_truncated_logistic(0.0, 1.0, side, rng);
    else
      s.w[i] = sample_truncated_normal(0.0, 1.0, side, rng);
  }
  return s;
}

ChainState init_chain(const ModelSpec& spec, const LatticeGrid& grid,
                      std::span<const std::uint8_t> y, std::uint64_t seed) {
  Rng rng(seed);
  return init_chain(spec, grid, y, rng);
}

void update_field(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                  Rng& rng) {
  // Precision xi^2 W + A_gamma / theta^2 (+ kappa on the boundary), linear
  // term xi W w, with W = diag(1 / lambda).
  ws.precision.fill(0.0);
  accumulate_precision(ws.op(), s.gamma_sq, 1.0 / s.theta_sq, ws.precision);
  const double xi2 = s.xi * s.xi;
  const double kappa = spec.boundary_precision;
  for (std::size_t i = 0; i < s.eta.size(); ++i) {
    const double weight = 1.0 / s.lambda[i];
    ws.precision.at(i, i) += xi2 * weight + kappa * ws.boundary[i];
    ws.linear_term[i] = s.xi * weight * s.w[i];
  }
  sample_gaussian_field_inplace(ws.precision, ws.linear_term, rng, s.eta);
}

void update_expansion(ChainState& s, Rng& rng) {
  double prec = 1.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < s.eta.size(); ++i) {
    const double weight = 1.0 / s.lambda[i];
    prec += weight * s.eta[i] * s.eta[i];
    lin += weight * s.eta[i] * s.w[i];
  }
  s.xi = lin / prec + rng.normal() / std::sqrt(prec);
}

void update_local_variances(ChainState& s, const ModelSpec& spec,
                            GibbsWorkspace& ws, Rng& rng) {
  ws.op().apply(s.eta, ws.increments);
  const double shape = 0.5 * (spec.nu + 1.0);
  for (std::size_t j = 0; j < s.gamma_sq.size(); ++j) {
    const double inc = ws.increments[j];
    const double rate = inc * inc / (2.0 * s.theta_sq) + 0.5 * spec.nu;
    s.gamma_sq[j] = std::clamp(sample_inverse_gamma(shape, rate, rng),
                               kMinGammaSq, kMaxGammaSq);
  }
}

void update_global_variance(ChainState& s, const ModelSpec& spec,
                            GibbsWorkspace& ws, Rng& rng) {
  ws.op().apply(s.eta, ws.increments);
  double quad = 0.0;
  for (std::size_t j = 0; j < s.gamma_sq.size(); ++j)
    quad += ws.increments[j] * ws.increments[j] / s.gamma_sq[j];
  // Rank of A_gamma is the stencil row count n - d, independent of gamma.
  const double rank = double(s.gamma_sq.size());
  const double shape = 0.5 * (rank + spec.rho);
  const double rate = 0.5 * quad + 0.5 * spec.rho * spec.scale * spec.scale;
  s.theta_sq = sample_inverse_gamma(shape, rate, rng);
}

double sample_mixing_variance(const Link& link, double residual, Rng& rng) {
  const double r2 = residual * residual;
  switch (link.kind) {
    case LinkKind::student_t:
      return sample_inverse_gamma(0.5 * (link.df + 1.0), 0.5 * (link.df + r2),
                                  rng);
    case LinkKind::laplace:
      return sample_gig_half(r2, rng);
    case LinkKind::logit:
      return sample_lambda_ks(residual, rng);
    case LinkKind::probit:
      return 1.0;
  }
  return 1.0;
}

void robustify_step(ChainState& s, const ModelSpec& spec,
                    std::span<const std::uint8_t> y, Rng& rng) {
  const double r = spec.miscoding;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = s.z(i);
    const double p = miscoding_probability(y[i], spec.link.cdf(z),
                                           spec.link.cdf(-z), r);
    s.psi[i] = rng.uniform() < p ? 1 : 0;
    draw_latent(s, spec.link, i, side_for(y[i] + s.psi[i] == 1), rng);
  }
}

void probit_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                 std::span<const std::uint8_t> y, Rng& rng) {
  update_latent(s, spec, y, rng);
  update_parameters(s, spec, ws, rng);
}

void logit_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                std::span<const std::uint8_t> y, Rng& rng) {
  update_latent(s, spec, y, rng);
  update_parameters(s, spec, ws, rng);
}

void smn_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
              std::span<const std::uint8_t> y, Rng& rng) {
  update_latent(s, spec, y, rng);
  update_mixing(s, spec, rng);
  update_parameters(s, spec, ws, rng);
}

void gibbs_step(ChainState& s, const ModelSpec& spec, GibbsWorkspace& ws,
                std::span<const std::uint8_t> y, Rng& rng) {
  switch (spec.link.kind) {
    case LinkKind::probit:
      probit_step(s, spec, ws, y, rng);
      break;
    case LinkKind::logit:
      logit_step(s, spec, ws, y, rng);
      break;
    case LinkKind::student_t:
    case LinkKind::laplace:
      smn_step(s, spec, ws, y, rng);
      break;
  }
}

void SampleStream::append(const SampleStream& other) {
  if (other.n != n || other.m != m)
    throw DimensionError("SampleStream::append: lattice mismatch");
  iteration.insert(iteration.end(), other.iteration.begin(),
                   other.iteration.end());
  z.insert(z.end(), other.z.begin(), other.z.end());
  gamma_sq.insert(gamma_sq.end(), other.gamma_sq.begin(),
                  other.gamma_sq.end());
  theta_sq.insert(theta_sq.end(), other.theta_sq.begin(),
                  other.theta_sq.end());
  delta.insert(delta.end(), other.delta.begin(), other.delta.end());
  psi.insert(psi.end(), other.psi.begin(), other.psi.end());
  for (std::size_t k = 0; k < traces.size() && k < other.traces.size(); ++k) {
    auto& t = traces[k];
    const auto& o = other.traces[k];
    t.z.insert(t.z.end(), o.z.begin(), o.z.end());
    t.w.insert(t.w.end(), o.w.begin(), o.w.end());
    t.gamma_sq.insert(t.gamma_sq.end(), o.gamma_sq.begin(), o.gamma_sq.end());
  }
}

std::vector<std::size_t> default_monitors(const LatticeGrid& grid,
                                          std::optional<std::size_t> extra) {
  std::vector<std::size_t> out{grid.index(grid.rows() / 2, grid.cols() / 2),
                               grid.index(1, grid.cols() / 2)};
  if (extra) {
    if (*extra >= grid.size())
      throw DimensionError("monitor voxel " + std::to_string(*extra) +
                           " outside the lattice");
    out.push_back(*extra);
  }
  return out;
}

SampleStream run_chain(const ModelSpec& spec, std::span<const std::uint8_t> y,
                       const LatticeGrid& grid, const ChainConfig& cfg,
                       std::span<const std::size_t> monitors,
                       std::size_t chain_index) {
  spec.validate();
  cfg.validate();
  check_inputs(grid, y);

  // Solve on the layout whose fast index is the shorter side.
  const bool flip = grid.cols() > grid.rows();
  const LatticeGrid work = flip ? grid.transposed() : grid;
  const std::vector<std::uint8_t> yw =
      flip ? transpose_field(y, grid.rows(), grid.cols())
           : std::vector<std::uint8_t>(y.begin(), y.end());
  const auto to_work = [&](std::size_t idx) {
    if (!flip) return idx;
    auto [r, c] = grid.coords(idx);
    return work.index(c, r);
  };

  SampleStream out;
  out.rows = grid.rows();
  out.cols = grid.cols();
  out.n = grid.size();
  out.m = grid.interior_count();
  const std::size_t keep = cfg.retained();
  out.iteration.reserve(keep);
  out.z.reserve(keep * out.n);
  out.gamma_sq.reserve(keep * out.m);
  out.psi.reserve(keep * out.n);

  static const char* kLabels[] = {"center", "edge"};
  std::vector<std::size_t> work_monitor;
  for (std::size_t k = 0; k < monitors.size(); ++k) {
    if (monitors[k] >= grid.size())
      throw DimensionError("monitor voxel outside the lattice");
    MonitorTrace t;
    t.label = k < 2 ? kLabels[k] : "voxel" + std::to_string(monitors[k]);
    t.voxel = monitors[k];
    const std::size_t wi = to_work(monitors[k]);
    auto [r, c] = work.coords(wi);
    r = std::clamp(r, 1, work.rows() - 2);
    c = std::clamp(c, 1, work.cols() - 2);
    t.stencil_row = std::size_t(r - 1) * (work.cols() - 2) + (c - 1);
    work_monitor.push_back(wi);
    out.traces.push_back(std::move(t));
  }

  Rng rng = Rng::substream(cfg.seed, chain_index);
  GibbsWorkspace ws(work);
  ChainState st = init_chain(spec, work, yw, rng);
  std::vector<double> zbuf(out.n);

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    try {
      gibbs_step(st, spec, ws, yw, rng);
    } catch (const std::exception& e) {
      const StepError err(t, e.what());
      throw ChainAborted(err.what(), t, std::move(out));
    }
    if (t <= cfg.burn_in || (t - cfg.burn_in) % cfg.thin != 0) continue;

    for (std::size_t i = 0; i < out.n; ++i) zbuf[i] = st.z(i);
    out.iteration.push_back(t);
    if (flip) {
      const auto zt = transpose_field<double>(zbuf, work.rows(), work.cols());
      out.z.insert(out.z.end(), zt.begin(), zt.end());
      const auto pt =
          transpose_field<std::uint8_t>(st.psi, work.rows(), work.cols());
      out.psi.insert(out.psi.end(), pt.begin(), pt.end());
      const auto gt = transpose_field<double>(st.gamma_sq, work.rows() - 2,
                                              work.cols() - 2);
      out.gamma_sq.insert(out.gamma_sq.end(), gt.begin(), gt.end());
    } else {
      out.z.insert(out.z.end(), zbuf.begin(), zbuf.end());
      out.psi.insert(out.psi.end(), st.psi.begin(), st.psi.end());
      out.gamma_sq.insert(out.gamma_sq.end(), st.gamma_sq.begin(),
                          st.gamma_sq.end());
    }
    out.theta_sq.push_back(st.theta_sq);
    out.delta.push_back(std::abs(st.xi) * std::sqrt(st.theta_sq));
    for (std::size_t k = 0; k < out.traces.size(); ++k) {
      auto& tr = out.traces[k];
      const std::size_t wi = work_monitor[k];
      tr.z.push_back(st.z(wi));
      tr.w.push_back(st.w[wi]);
      tr.gamma_sq.push_back(st.gamma_sq[tr.stencil_row]);
    }
  }
  // Report stencil rows in the caller's layout.
  if (flip) {
    for (auto& tr : out.traces) {
      const int wc = work.cols() - 2;
      const int r = int(tr.stencil_row / wc), c = int(tr.stencil_row % wc);
      tr.stencil_row = std::size_t(c) * (grid.cols() - 2) + r;
    }
  }
  return out;
}

std::vector<SampleStream> run_chains(const ModelSpec& spec,
                                     std::span<const std::uint8_t> y,
                                     const LatticeGrid& grid,
                                     const ChainConfig& cfg,
                                     std::span<const std::size_t> monitors) {
  cfg.validate();
  std::vector<SampleStream> out(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);
  std::size_t workers = cfg.threads == 0 ? cfg.chains : cfg.threads;
  workers = std::clamp<std::size_t>(workers, 1, cfg.chains);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cfg.chains; c = next++) {
      try {
        out[c] = run_chain(spec, y, grid, cfg, monitors, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace adagmrf
