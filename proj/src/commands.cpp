#include "adagmrf/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "adagmrf/baselines.hpp"
#include "adagmrf/errors.hpp"
#include "adagmrf/evaluation.hpp"

namespace adagmrf {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Files written by one command, hashed into the manifest in write order.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    if (dir.empty()) throw DomainError("an output directory is required (--out)");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw std::runtime_error(dir + ": cannot create output directory");
  }

  fs::path add(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

  json hashes() const {
    json out = json::object();
    for (const auto& f : files_) out[f] = git_blob_sha1(dir_ / f);
    return out;
  }

  void write_json(const std::string& name, const json& doc) {
    write_text(add(name), doc.dump(2) + "\n");
  }

  // manifest.json is deterministic; wall time goes to timing.json.
  void finish(const std::string& command, const std::vector<std::string>& echo,
              json config, std::uint64_t seed, json inputs, double seconds,
              json timing = json::object()) {
    json m;
    m["command"] = command;
    m["argv"] = echo;
    m["version"] = ADAGMRF_VERSION;
    m["seed"] = seed;
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = hashes();
    write_text(dir_ / "manifest.json", m.dump(2) + "\n");
    timing["wall_seconds"] = seconds;
    write_text(dir_ / "timing.json", timing.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string replicate_name(std::size_t k, std::size_t total) {
  if (total == 1) return "peaks.csv";
  char buf[32];
  std::snprintf(buf, sizeof buf, "peaks_%04zu.csv", k + 1);
  return buf;
}

json input_json(const PeakInput& in) {
  json j{{"path", in.path}, {"rows", in.rows}, {"cols", in.cols},
         {"spacing", in.spacing}};
  if (in.slab)
    j["slab"] = {{"center", in.slab->center}, {"half_width", in.slab->half_width}};
  return j;
}

std::string file_label(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::size_t default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw DomainError(std::string(kThreadsEnv) + " must be a non-negative integer");
  }
  return 0;
}

// Linear-interpolation sample quantile.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const std::size_t lo = std::size_t(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Counts confusion(std::span<const std::uint8_t> detected,
                 std::span<const std::uint8_t> truth) {
  Counts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (detected[i] && truth[i]) ++c.tp;
    else if (detected[i]) ++c.fp;
    else if (truth[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

json counts_json(const Counts& c) {
  return {{"true_positive", c.tp}, {"false_positive", c.fp},
          {"false_negative", c.fn}, {"true_negative", c.tn}};
}

}  // namespace

LoadedPeaks load_peaks(const PeakInput& in) {
  if (in.path.empty()) throw DomainError("a peak file is required");
  if (!(in.spacing > 0.0)) throw DomainError("spacing must be positive");
  const Frame frame{0.0, 0.0, in.spacing};
  if (is_peak_list(in.path)) {
    if (in.rows == 0 || in.cols == 0)
      throw DomainError(in.path + ": a peak list needs --rows and --cols");
    return {LatticeGrid(in.rows, in.cols, frame),
            read_peak_list(in.path, in.rows, in.cols, in.slab)};
  }
  if (in.slab) throw DomainError("--slab applies only to x,y,z peak lists");
  int rows = 0, cols = 0;
  auto y = read_binary_grid(in.path, rows, cols);
  if ((in.rows && in.rows != rows) || (in.cols && in.cols != cols))
    throw DimensionError(in.path + ": grid is " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", expected " +
                         std::to_string(in.rows) + "x" + std::to_string(in.cols));
  return {LatticeGrid(rows, cols, frame), std::move(y)};
}

void cmd_simulate(const SimulateOptions& opt, const std::vector<std::string>& echo) {
  const auto t0 = Clock::now();
  const bool bimodal = opt.kind == "bimodal";
  if (!bimodal && opt.kind != "two-disc")
    throw DomainError("unknown simulation '" + opt.kind + "'");
  if (opt.replicates == 0) throw DomainError("replicates must be positive");
  const int base = bimodal ? 30 : 64;
  const LatticeGrid grid(opt.rows ? opt.rows : base, opt.cols ? opt.cols : base);
  const TruthMap truth =
      bimodal ? bimodal_truth(grid, opt.domain) : two_disc_truth(grid, opt.discs);

  OutputDir out(opt.out_dir);
  write_csv_grid(out.add("truth.csv"), truth.p, grid.rows(), grid.cols());
  write_pgm(out.add("truth.pgm"), truth.p, grid.rows(), grid.cols());
  json config{{"kind", opt.kind}, {"rows", grid.rows()}, {"cols", grid.cols()},
              {"replicates", opt.replicates}};
  if (bimodal) {
    config["domain"] = {opt.domain.lo, opt.domain.hi};
  } else {
    write_csv_grid(out.add("mask.csv"), disc_mask(grid, opt.discs.discs),
                   grid.rows(), grid.cols());
    json discs = json::array();
    for (const Disc& d : opt.discs.discs)
      discs.push_back({{"row", d.row}, {"col", d.col}, {"radius", d.radius}});
    config["discs"] = discs;
    config["peak_prob"] = opt.discs.peak_prob;
    config["background"] = opt.discs.background;
    config["profile"] =
        opt.discs.profile == DiscProfile::flat ? "flat" : "raised-cosine";
  }
  json counts = json::array();
  for (std::size_t k = 0; k < opt.replicates; ++k) {
    const std::uint64_t seed = Rng::substream(opt.seed, k).next_u64();
    const PeakField f = sample_peaks(truth, seed);
    write_csv_grid(out.add(replicate_name(k, opt.replicates)), f.y, grid.rows(),
                   grid.cols());
    counts.push_back(f.count());
  }
  out.write_json("metrics.json", {{"command", "simulate"}, {"peak_counts", counts}});
  out.finish("simulate", echo, config, opt.seed, json::object(), seconds_since(t0));
}

void cmd_fit(const FitOptions& opt, const std::vector<std::string>& echo) {
  const auto t0 = Clock::now();
  ModelSpec spec = opt.spec;
  spec.link = parse_link(opt.link, opt.df);
  spec.validate();
  ChainConfig cfg = opt.chain;
  cfg.validate();
  if (cfg.retained() == 0)
    throw DomainError("no samples retained: increase iterations or reduce thin");

  const LoadedPeaks in = load_peaks(opt.input);
  const LatticeGrid& grid = in.grid;
  const auto monitors = default_monitors(grid, opt.monitor);
  OutputDir out(opt.out_dir);

  const auto t_sample = Clock::now();
  const std::vector<SampleStream> chains = run_chains(spec, in.y, grid, cfg, monitors);
  const double sample_seconds = seconds_since(t_sample);
  SampleStream merged = chains.front();
  for (std::size_t c = 1; c < chains.size(); ++c) merged.append(chains[c]);

  PosteriorSummary summary =
      summarize(merged, spec.link, in.y, spec.miscoding, opt.max_lag);
  // Autocorrelation is a within-chain quantity: report the first chain.
  if (chains.size() > 1)
    summary.diagnostics = summarize(chains.front(), spec.link, opt.max_lag).diagnostics;

  const int R = grid.rows(), C = grid.cols();
  write_csv_grid(out.add("prob_map.csv"), summary.prob_map, R, C);
  write_csv_grid(out.add("miscoding_map.csv"), summary.miscoding_map, R, C);
  write_csv_grid(out.add("mean_field.csv"), summary.mean_field, R, C);
  write_pgm(out.add("prob_map.pgm"), summary.prob_map, R, C);
  write_pgm(out.add("miscoding_map.pgm"), summary.miscoding_map, R, C);

  write_samples(out.add("samples.bin"), merged);
  json spec_json{{"link", spec.link.name()},
                 {"nu", spec.nu},
                 {"rho", spec.rho},
                 {"scale", spec.scale},
                 {"miscoding", spec.miscoding},
                 {"adaptive", spec.adaptive},
                 {"boundary_precision", spec.boundary_precision}};
  json cfg_json{{"iterations", cfg.iterations}, {"burn_in", cfg.burn_in},
                {"thin", cfg.thin},             {"chains", cfg.chains},
                {"seed", cfg.seed}};
  out.write_json(
      "samples.json",
      {{"format", "ADGMRFS1 little-endian columnar"},
       {"file", "samples.bin"},
       {"sha1", git_blob_sha1(out.path("samples.bin"))},
       {"rows", R},
       {"cols", C},
       {"voxels", merged.n},
       {"stencil_rows", merged.m},
       {"samples", merged.size()},
       {"samples_per_chain", cfg.retained()},
       {"blocks",
        {"iteration u64[samples]", "z f64[samples*voxels]",
         "gamma_sq f64[samples*stencil_rows]", "theta_sq f64[samples]",
         "delta f64[samples]", "psi u8[samples*voxels]"}},
       {"spec", spec_json},
       {"config", cfg_json}});

  const SampleStream& first = chains.front();
  for (const auto& t : first.traces) {
    write_trace_csv(out.add("trace_z_" + t.label + ".csv"), first.iteration, t.z);
    write_trace_csv(out.add("trace_w_" + t.label + ".csv"), first.iteration, t.w);
    write_trace_csv(out.add("trace_gamma_sq_" + t.label + ".csv"), first.iteration,
                    t.gamma_sq);
  }
  write_trace_csv(out.add("trace_theta_sq.csv"), first.iteration, first.theta_sq);
  write_trace_csv(out.add("trace_delta.csv"), first.iteration, first.delta);

  json diag = json::array();
  for (const auto& d : summary.diagnostics) {
    const std::string label = file_label(d.variable);
    std::ostringstream acf;
    acf << "lag,value\n";
    acf.precision(17);
    for (std::size_t k = 0; k < d.acf.values.size(); ++k)
      acf << k << ',' << d.acf.values[k] << '\n';
    write_text(out.add("acf_" + label + ".csv"), acf.str());
    diag.push_back({{"name", d.variable},
                    {"ess", d.ess.value},
                    {"degenerate", d.ess.degenerate || d.acf.degenerate},
                    {"acf_lag1", d.acf.values.size() > 1 ? d.acf.values[1] : 1.0}});
  }

  if (opt.dump_precision) {
    // A_gamma at the last retained gamma^2 draw.
    const DiffOperator op = build_diff_operator(grid);
    const auto g = merged.gamma_sample(merged.size() - 1);
    const AdaptivePrecision a = assemble_precision(op, g);
    std::ostringstream os;
    a.matrix.write_coordinates(os);
    write_text(out.add("precision.coo"), os.str());
  }

  const auto peak_max = std::max_element(summary.prob_map.begin(), summary.prob_map.end());
  const auto [pr, pc] = grid.coords(std::size_t(peak_max - summary.prob_map.begin()));
  out.write_json("metrics.json",
                 {{"command", "fit"},
                  {"link", spec.link.name()},
                  {"adaptive", spec.adaptive},
                  {"miscoding", spec.miscoding},
                  {"rows", R},
                  {"cols", C},
                  {"peaks", std::count(in.y.begin(), in.y.end(), 1)},
                  {"samples", merged.size()},
                  {"dic",
                   {{"dic", summary.dic->dic},
                    {"dbar", summary.dic->dbar},
                    {"d_at_mean", summary.dic->d_at_mean},
                    {"pd", summary.dic->pd()}}},
                  {"max_prob", {{"value", *peak_max}, {"row", pr + 1}, {"col", pc + 1}}},
                  {"diagnostics", diag}});

  json config{{"input", input_json(opt.input)},
              {"spec", spec_json},
              {"chain", cfg_json},
              {"monitors", monitors},
              {"max_lag", opt.max_lag},
              {"dump_precision", opt.dump_precision}};
  const double total = seconds_since(t0);
  out.finish("fit", echo, config, cfg.seed,
             {{"peaks", git_blob_sha1(fs::path(opt.input.path))}}, total,
             {{"sampling_seconds", sample_seconds},
              {"ms_per_iteration",
               1e3 * sample_seconds / double(cfg.iterations * cfg.chains)},
              {"threads", cfg.threads}});
}

void cmd_baseline(const BaselineOptions& opt, const std::vector<std::string>& echo) {
  const auto t0 = Clock::now();
  KernelSpec kernel;
  if (opt.method == "ale") kernel = KernelSpec::gaussian_fwhm(opt.fwhm);
  else if (opt.method == "kda") kernel = KernelSpec::sphere(opt.radius);
  else throw DomainError("unknown baseline method '" + opt.method + "'");
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (opt.n_perm < 100) throw DomainError("nperm must be at least 100");

  const LoadedPeaks in = load_peaks(opt.input);
  const LatticeGrid& grid = in.grid;
  std::vector<std::uint8_t> mask;
  json inputs{{"peaks", git_blob_sha1(fs::path(opt.input.path))}};
  if (!opt.mask.empty()) {
    int r = 0, c = 0;
    mask = read_binary_grid(opt.mask, r, c);
    if (r != grid.rows() || c != grid.cols())
      throw DimensionError(opt.mask + ": mask does not match the peak grid");
    inputs["mask"] = git_blob_sha1(fs::path(opt.mask));
  }
  OutputDir out(opt.out_dir);

  const std::size_t n_peaks = std::size_t(std::count(in.y.begin(), in.y.end(), 1));
  const auto map = kernel_map(in.y, kernel, grid);
  Rng rng(opt.seed);
  const double threshold =
      mc_threshold(n_peaks, kernel, grid, opt.alpha, opt.n_perm, rng, mask);
  const auto sig = significant_voxels(map, threshold);

  const int R = grid.rows(), C = grid.cols();
  write_csv_grid(out.add("kernel_map.csv"), map, R, C);
  write_csv_grid(out.add("significant.csv"), sig, R, C);
  const double top = std::max(1e-300, *std::max_element(map.begin(), map.end()));
  write_pgm(out.add("kernel_map.pgm"), map, R, C, 0.0, top);
  std::vector<double> sigd(sig.begin(), sig.end());
  write_pgm(out.add("significant.pgm"), sigd, R, C);

  const double width = opt.method == "ale" ? opt.fwhm : opt.radius;
  out.write_json("metrics.json",
                 {{"command", "baseline"},
                  {"method", opt.method},
                  {"width", width},
                  {"alpha", opt.alpha},
                  {"nperm", opt.n_perm},
                  {"peaks", n_peaks},
                  {"threshold", threshold},
                  {"significant", std::count(sig.begin(), sig.end(), 1)}});
  json config{{"input", input_json(opt.input)}, {"method", opt.method},
              {"width", width},                 {"alpha", opt.alpha},
              {"nperm", opt.n_perm},            {"mask", opt.mask}};
  out.finish("baseline", echo, config, opt.seed, inputs, seconds_since(t0));
}

void cmd_evaluate(const EvaluateOptions& opt, const std::vector<std::string>& echo) {
  const auto t0 = Clock::now();
  if (opt.fit_dirs.empty()) throw DomainError("evaluate needs at least one fit directory");
  for (double t : opt.thresholds)
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("thresholds must lie in [0, 1]");

  std::optional<CsvGrid> truth;
  std::vector<std::uint8_t> mask;
  int mask_rows = 0, mask_cols = 0;
  json inputs = json::object();
  if (!opt.truth.empty()) {
    truth = read_csv_grid(opt.truth);
    inputs["truth"] = git_blob_sha1(fs::path(opt.truth));
  }
  if (!opt.mask.empty()) {
    mask = read_binary_grid(opt.mask, mask_rows, mask_cols);
    inputs["mask"] = git_blob_sha1(fs::path(opt.mask));
  }

  const auto check_grid = [&](const std::string& what, int r, int c) {
    if (truth && (truth->rows != r || truth->cols != c))
      throw DimensionError(what + ": grid does not match the truth map");
    if (!mask.empty() && (mask_rows != r || mask_cols != c))
      throw DimensionError(what + ": grid does not match the mask");
  };

  json fits = json::array();
  std::vector<double> mspes;
  // input hash -> (adaptive DIC, nonadaptive DIC)
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> pairs;
  std::vector<std::string> pair_order;
  for (const std::string& dir : opt.fit_dirs) {
    const json metrics = json::parse(read_text(fs::path(dir) / "metrics.json"));
    const json manifest = json::parse(read_text(fs::path(dir) / "manifest.json"));
    const std::string command = metrics.at("command");
    json entry{{"dir", dir}, {"command", command}};
    if (command == "fit") {
      const CsvGrid prob = read_csv_grid(fs::path(dir) / "prob_map.csv");
      check_grid(dir, prob.rows, prob.cols);
      entry["link"] = metrics.at("link");
      entry["adaptive"] = metrics.at("adaptive");
      entry["miscoding"] = metrics.at("miscoding");
      entry["dic"] = metrics.at("dic");
      if (truth) {
        const double e = mspe(prob.values, truth->values);
        entry["mspe"] = e;
        mspes.push_back(e);
      }
      if (!mask.empty()) {
        json sweep = json::array();
        std::vector<std::uint8_t> det(prob.values.size());
        for (double t : opt.thresholds) {
          for (std::size_t i = 0; i < det.size(); ++i) det[i] = prob.values[i] > t;
          json row = counts_json(confusion(det, mask));
          row["threshold"] = t;
          sweep.push_back(row);
        }
        entry["threshold_sweep"] = sweep;
      }
      const std::string key = manifest.at("inputs").at("peaks");
      if (!pairs.count(key)) pair_order.push_back(key);
      auto& p = pairs[key];
      const double d = metrics.at("dic").at("dic");
      (metrics.at("adaptive").get<bool>() ? p.first : p.second) = d;
    } else if (command == "baseline") {
      int r = 0, c = 0;
      const auto sig = read_binary_grid(fs::path(dir) / "significant.csv", r, c);
      check_grid(dir, r, c);
      entry["method"] = metrics.at("method");
      entry["alpha"] = metrics.at("alpha");
      entry["threshold"] = metrics.at("threshold");
      if (!mask.empty()) entry["detections"] = counts_json(confusion(sig, mask));
    } else {
      throw DomainError(dir + ": not a fit or baseline directory");
    }
    fits.push_back(entry);
  }

  json doc{{"command", "evaluate"}, {"fits", fits}};
  json table = json::array();
  std::size_t adaptive_wins = 0;
  for (const auto& key : pair_order) {
    const auto& [a, na] = pairs[key];
    if (!a || !na) continue;
    table.push_back({{"peaks", key},
                     {"adaptive", *a},
                     {"nonadaptive", *na},
                     {"preferred", *a < *na ? "adaptive" : "nonadaptive"}});
    adaptive_wins += *a < *na;
  }
  doc["dic_table"] = table;
  doc["adaptive_preferred"] = adaptive_wins;
  if (!mspes.empty()) {
    double mean = 0.0;
    for (double v : mspes) mean += v;
    doc["mspe_summary"] = {{"count", mspes.size()},
                           {"mean", mean / double(mspes.size())},
                           {"min", quantile(mspes, 0.0)},
                           {"q25", quantile(mspes, 0.25)},
                           {"median", quantile(mspes, 0.5)},
                           {"q75", quantile(mspes, 0.75)},
                           {"max", quantile(mspes, 1.0)}};
  }
  OutputDir out(opt.out_dir);
  out.write_json("metrics.json", doc);
  json config{{"fit_dirs", opt.fit_dirs}, {"truth", opt.truth},
              {"mask", opt.mask},         {"thresholds", opt.thresholds}};
  out.finish("evaluate", echo, config, 0, inputs, seconds_since(t0));
}

namespace {

void add_peak_input(CLI::App* app, PeakInput& in, std::vector<double>& slab) {
  app->add_option("peaks", in.path, "Binary CSV grid or x,y[,z] peak list")->required();
  app->add_option("--rows", in.rows, "Lattice rows (peak lists)");
  app->add_option("--cols", in.cols, "Lattice columns (peak lists)");
  app->add_option("--spacing", in.spacing, "Physical units per cell (e.g. mm)");
  app->add_option("--slab", slab, "Keep peaks with |z - CENTER| <= HALF_WIDTH")
      ->expected(2)
      ->type_name("CENTER HALF_WIDTH");
}

void resolve_slab(PeakInput& in, const std::vector<double>& slab) {
  if (slab.size() == 2) in.slab = Slab{slab[0], slab[1]};
}

// Command line with the output directory written as ".", so manifests of
// identical runs into different directories agree.
std::vector<std::string> echo_args(const std::vector<std::string>& args,
                                   const std::string& out_dir) {
  std::vector<std::string> echo;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if ((a == "--out" || a == "-o") && i + 1 < args.size()) {
      echo.push_back(a);
      echo.push_back(".");
      ++i;
    } else if (a.rfind("--out=", 0) == 0) {
      echo.push_back("--out=.");
    } else {
      echo.push_back(a == out_dir ? "." : a);
    }
  }
  return echo;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Spatially adaptive GMRF binary regression for peak maps", "adagmrf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ADAGMRF_VERSION);

  SimulateOptions sim;
  std::vector<std::string> discs;
  bool flat = false;
  auto* s = app.add_subcommand("simulate", "Generate truth maps and peak fields");
  s->add_option("kind", sim.kind, "bimodal | two-disc")
      ->required()
      ->check(CLI::IsMember({"bimodal", "two-disc"}));
  s->add_option("--grid", sim.rows, "Square lattice extent");
  s->add_option("--rows", sim.rows, "Lattice rows");
  s->add_option("--cols", sim.cols, "Lattice columns");
  s->add_option("--replicates", sim.replicates, "Number of peak fields");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--domain-lo", sim.domain.lo, "Bimodal coordinate window start");
  s->add_option("--domain-hi", sim.domain.hi, "Bimodal coordinate window end");
  s->add_option("--disc", discs, "Disc as ROW,COL,RADIUS (0-based cells); repeatable");
  s->add_option("--peak-prob", sim.discs.peak_prob, "Probability at disc centres");
  s->add_option("--background", sim.discs.background, "Background probability");
  s->add_flag("--flat", flat, "Flat-top discs instead of raised cosine");
  s->add_option("-o,--out", sim.out_dir, "Output directory")->required();

  FitOptions fit;
  fit.chain.threads = 0;
  std::vector<double> fit_slab;
  bool nonadaptive = false;
  auto* f = app.add_subcommand("fit", "Run the Gibbs sampler on a peak field");
  add_peak_input(f, fit.input, fit_slab);
  f->add_option("--link", fit.link, "probit | logit | student-t[:df] | laplace");
  f->add_option("--df", fit.df, "Student-t degrees of freedom");
  f->add_option("--r", fit.spec.miscoding, "Prior miscoding probability (0 disables)");
  f->add_option("--nu", fit.spec.nu, "Local-variance prior degrees of freedom");
  f->add_option("--rho", fit.spec.rho, "Global-scale half-t degrees of freedom");
  f->add_option("--scale", fit.spec.scale, "Global-scale half-t scale");
  f->add_option("--boundary-precision", fit.spec.boundary_precision,
                "Prior precision on boundary nodes (0: intrinsic prior)");
  f->add_flag("--nonadaptive", nonadaptive, "Freeze every gamma^2 at 1");
  f->add_option("--iters", fit.chain.iterations, "Gibbs sweeps per chain");
  f->add_option("--burnin", fit.chain.burn_in, "Discarded initial sweeps");
  f->add_option("--thin", fit.chain.thin, "Keep every thin-th sweep after burn-in");
  f->add_option("--chains", fit.chain.chains, "Independent chains");
  f->add_option("--threads", fit.chain.threads, "Worker threads (0: one per chain)");
  f->add_option("--seed", fit.chain.seed, "Random seed");
  f->add_option("--monitor", fit.monitor, "Extra monitored voxel (linear index)");
  f->add_option("--max-lag", fit.max_lag, "Largest autocorrelation lag");
  f->add_flag("--dump-precision", fit.dump_precision,
              "Write A_gamma (last draw) as i j value triplets");
  f->add_option("-o,--out", fit.out_dir, "Output directory")->required();

  BaselineOptions base;
  std::vector<double> base_slab;
  auto* b = app.add_subcommand("baseline", "Kernel map with Monte Carlo threshold");
  add_peak_input(b, base.input, base_slab);
  b->add_option("--method", base.method, "ale | kda")->check(CLI::IsMember({"ale", "kda"}));
  b->add_option("--fwhm", base.fwhm, "Gaussian FWHM (ale)");
  b->add_option("--radius", base.radius, "Sphere radius (kda)");
  b->add_option("--alpha", base.alpha, "Significance level");
  b->add_option("--nperm", base.n_perm, "Null permutations");
  b->add_option("--seed", base.seed, "Random seed");
  b->add_option("--mask", base.mask, "Binary grid restricting null peak locations");
  b->add_option("-o,--out", base.out_dir, "Output directory")->required();

  EvaluateOptions eval;
  auto* e = app.add_subcommand("evaluate", "MSPE, DIC table and detection counts");
  e->add_option("dirs", eval.fit_dirs, "Fit or baseline output directories")->required();
  e->add_option("--truth", eval.truth, "True probability grid");
  e->add_option("--mask", eval.mask, "Binary grid of true activation");
  e->add_option("--thresholds", eval.thresholds, "Probability thresholds to sweep");
  e->add_option("-o,--out", eval.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitConfig;
  }

  try {
    if (*s) {
      if (sim.cols == 0) sim.cols = sim.rows;
      sim.discs.profile = flat ? DiscProfile::flat : DiscProfile::raised_cosine;
      if (!discs.empty()) {
        sim.discs.discs.clear();
        for (const auto& d : discs) {
          std::vector<double> v;
          std::stringstream ss(d);
          std::string part;
          while (std::getline(ss, part, ',')) v.push_back(std::stod(part));
          if (v.size() != 3) throw DomainError("--disc expects ROW,COL,RADIUS");
          sim.discs.discs.push_back({v[0], v[1], v[2]});
        }
      }
      cmd_simulate(sim, echo_args(args, sim.out_dir));
    } else if (*f) {
      resolve_slab(fit.input, fit_slab);
      fit.spec.adaptive = !nonadaptive;
      if (f->count("--threads") == 0) fit.chain.threads = default_threads();
      cmd_fit(fit, echo_args(args, fit.out_dir));
    } else if (*b) {
      resolve_slab(base.input, base_slab);
      cmd_baseline(base, echo_args(args, base.out_dir));
    } else if (*e) {
      cmd_evaluate(eval, echo_args(args, eval.out_dir));
    }
  } catch (const ChainAborted& err) {
    std::cerr << "adagmrf: numerical failure: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const FactorizationError& err) {
    std::cerr << "adagmrf: numerical failure: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const RejectionLimitError& err) {
    std::cerr << "adagmrf: numerical failure: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& err) {
    std::cerr << "adagmrf: " << err.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace adagmrf
