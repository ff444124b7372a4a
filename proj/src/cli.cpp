#include "hrb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>

#include "CLI11.hpp"

#include "hrb/bounds.hpp"
#include "hrb/errors.hpp"
#include "hrb/io.hpp"
#include "hrb/manifold.hpp"
#include "hrb/parallel.hpp"
#include "hrb/phase.hpp"
#include "hrb/slope.hpp"

namespace hrb::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

template <typename T>
T get_required(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key))
    throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

}  // namespace

RunConfig run_config_from_json(const json& doc) {
  expect_keys(doc, "config",
              {"dataset", "train", "pca", "bounds", "output"});
  RunConfig cfg;

  const json& ds = doc.contains("dataset") ? doc.at("dataset") : json::object();
  expect_keys(ds, "config.dataset",
              {"n", "d", "c", "sigma_star_sq", "sigma_w_sq", "seed"});
  cfg.dataset.n = get_required<int>(ds, "config.dataset", "n");
  cfg.dataset.d = get_required<int>(ds, "config.dataset", "d");
  cfg.dataset.c = get_required<double>(ds, "config.dataset", "c");
  cfg.dataset.sigma_star_sq = get_or(ds, "sigma_star_sq", 1.0);
  cfg.dataset.sigma_w_sq = get_or(ds, "sigma_w_sq", 1.0);
  cfg.dataset.seed = get_or<std::uint64_t>(ds, "seed", 1);

  const json& tr = doc.contains("train") ? doc.at("train") : json::object();
  expect_keys(tr, "config.train",
              {"method", "alpha", "T", "N", "batch_size", "noise_disabled",
               "lambda_wd", "sweep_T"});
  const std::string method = get_or<std::string>(tr, "method", "gd");
  if (method == "gd") {
    cfg.train.method = GdMethod{};
    if (tr.contains("batch_size") || tr.contains("noise_disabled") ||
        tr.contains("lambda_wd"))
      throw ConfigError("config.train: gd accepts no method parameters");
  } else if (method == "sgd") {
    SgdMethod m;
    m.batch_size = get_or(tr, "batch_size", 8);
    m.noise_disabled = get_or(tr, "noise_disabled", false);
    cfg.train.method = m;
    if (tr.contains("lambda_wd"))
      throw ConfigError("config.train: lambda_wd belongs to weight_decay");
  } else if (method == "weight_decay") {
    WeightDecayMethod m;
    m.lambda_wd = get_or(tr, "lambda_wd", 0.01);
    cfg.train.method = m;
    if (tr.contains("batch_size") || tr.contains("noise_disabled"))
      throw ConfigError("config.train: batch options belong to sgd");
  } else {
    throw ConfigError("config.train: unknown method '" + method + "'");
  }
  cfg.train.alpha = get_or(tr, "alpha", 1.0);
  cfg.train.T = get_or(tr, "T", 50);
  cfg.train.N = get_or(tr, "N", 1);
  cfg.sweep_T = get_or(tr, "sweep_T", std::vector<int>{});

  const json& pc = doc.contains("pca") ? doc.at("pca") : json::object();
  expect_keys(pc, "config.pca", {"mode"});
  cfg.pca_mode = get_or<std::string>(pc, "mode", "analytic");
  if (cfg.pca_mode != "analytic" && cfg.pca_mode != "empirical" &&
      cfg.pca_mode != "both")
    throw ConfigError("config.pca: mode must be analytic, empirical, or both");

  const json& bd = doc.contains("bounds") ? doc.at("bounds") : json::object();
  expect_keys(bd, "config.bounds", {"enabled", "sweep"});
  cfg.bounds_enabled = get_or(bd, "enabled", false);
  if (bd.contains("sweep")) {
    const json& sw = bd.at("sweep");
    expect_keys(sw, "config.bounds.sweep", {"count", "seed", "kernels"});
    cfg.sweep_enabled = true;
    cfg.sweep_count = get_or(sw, "count", 100);
    cfg.sweep_seed = get_or<std::uint64_t>(sw, "seed", 20240501);
    cfg.sweep_kernels = get_or(sw, "kernels", true);
  }

  const json& out = doc.contains("output") ? doc.at("output") : json::object();
  expect_keys(out, "config.output", {"dir", "formats"});
  cfg.output_dir = get_or<std::string>(out, "dir", "");
  cfg.formats = get_or(out, "formats", std::vector<std::string>{"csv", "json"});
  const std::set<std::string> known = {"csv", "json", "svg", "hrb1"};
  for (const auto& f : cfg.formats)
    if (!known.count(f))
      throw ConfigError("config.output: unknown format '" + f + "'");
  return cfg;
}

json preset_json(const std::string& name) {
  if (name == "fig3") {
    return json::parse(R"({
      "dataset": {"n": 50, "d": 100, "c": 0.2,
                  "sigma_star_sq": 2.0, "sigma_w_sq": 0.1, "seed": 1},
      "train": {"method": "gd", "alpha": 1.0, "T": 50, "N": 500},
      "pca": {"mode": "both"},
      "output": {"formats": ["csv", "svg", "hrb1"]}
    })");
  }
  if (name == "fig4") {
    return json::parse(R"({
      "dataset": {"n": 50, "d": 100, "c": 0.5,
                  "sigma_star_sq": 2.0, "sigma_w_sq": 1.0, "seed": 2},
      "train": {"method": "gd", "alpha": 1.0, "T": 10, "N": 1,
                "sweep_T": [10, 100, 1000]},
      "pca": {"mode": "analytic"},
      "bounds": {"enabled": true},
      "output": {"formats": ["csv", "json"]}
    })");
  }
  if (name == "fig5") {
    return json::parse(R"({
      "dataset": {"n": 50, "d": 100, "c": 0.2,
                  "sigma_star_sq": 2.0, "sigma_w_sq": 0.1, "seed": 1},
      "train": {"method": "gd", "alpha": 1.0, "T": 50, "N": 20000},
      "pca": {"mode": "both"},
      "bounds": {"enabled": true},
      "output": {"formats": ["csv", "json", "svg"]}
    })");
  }
  if (name == "fig6") {
    return json::parse(R"({
      "dataset": {"n": 50, "d": 100, "c": 0.1,
                  "sigma_star_sq": 2.0, "sigma_w_sq": 1.0, "seed": 3},
      "train": {"method": "gd", "alpha": 1.0, "T": 5, "N": 5000,
                "sweep_T": [5, 50, 500, 5000]},
      "pca": {"mode": "both"},
      "output": {"formats": ["csv", "json"]}
    })");
  }
  if (name == "fig7")
    throw ConfigError("preset fig7 is the phase diagram: use the 'phase' subcommand");
  throw ConfigError("unknown preset '" + name +
                    "' (known: fig3, fig4, fig5, fig6)");
}

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  if (const char* env = std::getenv("HRB_OUT"); env && *env) return env;
  return "./hrb_out";
}

struct OutputTracker {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> files;  // name, path

  std::string path(const std::string& name) {
    files.emplace_back(name, (fs::path(dir) / name).string());
    return files.back().second;
  }
  json files_json() const {
    json out = json::object();
    for (const auto& [name, full] : files) out[name] = io::file_entry_json(full);
    return out;
  }
};

bool has_format(const RunConfig& cfg, const std::string& f) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), f) != cfg.formats.end();
}

Eigen::VectorXd descending_eigs(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("eigenvalue decomposition failed");
  return es.eigenvalues().reverse();
}

json train_json(const TrainConfig& train, const std::vector<int>& sweep_T) {
  json out;
  if (const auto* sgd = std::get_if<SgdMethod>(&train.method)) {
    out["method"] = "sgd";
    out["batch_size"] = sgd->batch_size;
    out["noise_disabled"] = sgd->noise_disabled;
  } else if (const auto* wd = std::get_if<WeightDecayMethod>(&train.method)) {
    out["method"] = "weight_decay";
    out["lambda_wd"] = wd->lambda_wd;
  } else {
    out["method"] = "gd";
  }
  out["alpha"] = train.alpha;
  out["T"] = train.T;
  out["N"] = train.N;
  if (!sweep_T.empty()) out["sweep_T"] = sweep_T;
  return out;
}

json dataset_json(const Dataset& ds) {
  return {{"n", ds.spec.n},
          {"d", ds.spec.d},
          {"c", ds.spec.c},
          {"sigma_star_sq", ds.spec.sigma_star_sq},
          {"sigma_w_sq", ds.spec.sigma_w_sq},
          {"seed", ds.spec.seed},
          {"id", ds.id()},
          {"lambda_max", ds.lambda[0]},
          {"lambda_min", ds.lambda[ds.spec.n - 1]},
          {"trace", ds.lambda.sum()}};
}

void write_manifest(OutputTracker& tracker, json body) {
  body["hrb_schema"] = 1;
  if (!body.contains("kind")) body["kind"] = "manifest";
  body["files"] = tracker.files_json();
  io::write_json((fs::path(tracker.dir) / "manifest.json").string(), body);
}

// Mean and standard error of a batch statistic.
std::pair<double, double> batch_stats(const std::vector<double>& values) {
  const int b = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= std::max(1, b);
  if (b < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (b - 1.0) / b)};
}

// ---------------------------------------------------------------------------
// run subcommand
// ---------------------------------------------------------------------------

constexpr std::size_t kTrajectoryExportLimit = std::size_t(1) << 22;

int do_run(const RunConfig& cfg, const std::string& out_flag, int threads) {
  OutputTracker tracker;
  tracker.dir = resolve_out_dir(out_flag, cfg.output_dir);

  const Dataset ds = synthesize_dataset(cfg.dataset);
  std::vector<std::string> warnings = cfg.train.validate(
      std::holds_alternative<WeightDecayMethod>(cfg.train.method)
          ? ds.lambda[0] +
                std::get<WeightDecayMethod>(cfg.train.method).lambda_wd
          : ds.lambda[0]);
  std::cout << "dataset " << ds.id() << " (n=" << ds.spec.n
            << ", d=" << ds.spec.d << ", c=" << io::format_double(ds.spec.c)
            << "): lambda_1=" << io::format_double(ds.lambda[0])
            << ", lambda_n=" << io::format_double(ds.lambda[ds.spec.n - 1])
            << "\n";

  if (has_format(cfg, "csv"))
    io::write_spectrum_csv(tracker.path("spectrum.csv"), ds.lambda);

  const bool want_empirical =
      cfg.pca_mode == "empirical" || cfg.pca_mode == "both";
  const bool want_analytic = cfg.pca_mode == "analytic" || cfg.pca_mode == "both";
  const SpectralProblem problem = spectral_problem(ds);
  const auto* sgd = std::get_if<SgdMethod>(&cfg.train.method);
  const auto* wd = std::get_if<WeightDecayMethod>(&cfg.train.method);

  auto analytic_at = [&](int T) {
    SpectralProblem op = problem;
    if (wd) op.lambda = weight_decay_spectrum(op.lambda, wd->lambda_wd);
    return sgd ? sgd_analytic_pca(op, cfg.train.alpha, T,
                                  cfg.dataset.sigma_w_sq, sgd->batch_size,
                                  sgd->noise_disabled)
               : analytic_pca(op, cfg.train.alpha, T, cfg.dataset.sigma_w_sq);
  };

  if (!cfg.sweep_T.empty()) {
    // Horizon sweep: one closed-form decomposition per T, plus the tables
    // that track how the pieces grow with the horizon.
    std::vector<std::vector<double>> bound_rows;
    std::vector<std::vector<double>> mean_rows;
    for (int T : cfg.sweep_T) {
      if (T < 1) throw ConfigError("config.train: sweep_T entries must be >= 1");
      const PcaDecomposition dec = analytic_at(T);
      std::cout << "T=" << T
                << ": lambda_P1_top=" << io::format_double(dec.lambda_P1[0])
                << " lambda_P2=" << io::format_double(dec.lambda_P2) << "\n";
      if (has_format(cfg, "csv"))
        io::write_eigenspectrum_csv(
            tracker.path("eigenspectrum_T" + std::to_string(T) + ".csv"), dec);
      if (cfg.bounds_enabled) {
        const Eigen::VectorXd lam =
            wd ? weight_decay_spectrum(ds.lambda, wd->lambda_wd) : ds.lambda;
        for (int i = 1; i <= ds.spec.n; ++i)
          bound_rows.push_back(
              {static_cast<double>(i), static_cast<double>(T),
               dec.lambda_sigma_w[i - 1],
               sigma_w_bound(i, cfg.train.alpha, T, cfg.dataset.sigma_w_sq,
                             lam[i - 1])});
      }
      if (want_empirical) {
        TrainConfig tc = cfg.train;
        tc.T = T;
        const SampledPca sp = sgd ? sgd_sampled_pca(ds, tc, 10, threads)
                                  : gd_sampled_pca(ds, tc, 10, threads);
        std::vector<double> p2_batches;
        for (const auto& m : sp.batch_mean) p2_batches.push_back(m.squaredNorm());
        const auto [p2_mean, p2_se] = batch_stats(p2_batches);
        mean_rows.push_back({static_cast<double>(T), dec.lambda_P2,
                             sp.mean_term.squaredNorm(), p2_se});
        (void)p2_mean;
      }
    }
    if (cfg.bounds_enabled && has_format(cfg, "csv"))
      io::write_csv(tracker.path("horizon_bounds.csv"),
                    {"index", "T", "lambda_sigma_w", "bound"}, bound_rows);
    if (!mean_rows.empty() && has_format(cfg, "csv"))
      io::write_csv(tracker.path("mean_correction.csv"),
                    {"T", "lambda_P2", "lambda_P2_empirical", "se"}, mean_rows);
  } else {
    PcaDecomposition dec;
    if (want_analytic || cfg.bounds_enabled) dec = analytic_at(cfg.train.T);
    if (want_analytic) {
      const RibbonDim rd = hyper_ribbon_dim(dec.lambda_P, 0.95);
      std::cout << "analytic eigenspectrum: top="
                << io::format_double(dec.lambda_P[0]) << " dims(0.95)=" << rd.dims
                << "\n";
      if (has_format(cfg, "csv"))
        io::write_eigenspectrum_csv(tracker.path("eigenspectrum.csv"), dec);
      if (has_format(cfg, "svg"))
        io::write_spectrum_svg(tracker.path("spectrum.svg"), dec);
    }

    if (want_empirical) {
      const SampledPca sp = sgd ? sgd_sampled_pca(ds, cfg.train, 10, threads)
                                : gd_sampled_pca(ds, cfg.train, 10, threads);
      const Eigen::VectorXd eigs = descending_eigs(sp.P);
      const int batches = static_cast<int>(sp.batch_P.size());
      Eigen::MatrixXd batch_eigs(ds.spec.n, batches);
      for (int b = 0; b < batches; ++b)
        batch_eigs.col(b) = descending_eigs(sp.batch_P[b]);
      double total = 0.0;
      for (int i = 0; i < ds.spec.n; ++i) total += std::max(eigs[i], 0.0);
      std::vector<std::vector<double>> rows;
      double acc = 0.0;
      for (int i = 0; i < ds.spec.n; ++i) {
        acc += std::max(eigs[i], 0.0);
        std::vector<double> row_vals(batches);
        for (int b = 0; b < batches; ++b) row_vals[b] = batch_eigs(i, b);
        const auto [m, se] = batch_stats(row_vals);
        (void)m;
        rows.push_back({static_cast<double>(i + 1), eigs[i], se,
                        total > 0.0 ? acc / total : 0.0});
      }
      if (has_format(cfg, "csv"))
        io::write_csv(tracker.path("empirical_eigenspectrum.csv"),
                      {"index", "lambda_P", "se", "explained_variance"}, rows);
      if (want_analytic) {
        const double rel =
            (dec.P - sp.P).norm() / std::max(dec.P.norm(), 1e-300);
        std::cout << "empirical vs closed form (N=" << cfg.train.N
                  << "): relative deviation " << io::format_double(rel) << "\n";
      }

      const std::size_t points = static_cast<std::size_t>(cfg.train.N) *
                                 cfg.train.T * ds.spec.n;
      const bool want_traj = has_format(cfg, "hrb1");
      if (want_traj && points <= kTrajectoryExportLimit) {
        const TrajectoryEnsemble ens =
            sgd ? sgd_ensemble(ds, cfg.train) : gd_ensemble(ds, cfg.train);
        for (const auto& w : ens.warnings) warnings.push_back(w);
        if (has_format(cfg, "hrb1"))
          io::write_ensemble_hrb1(tracker.path("trajectories.hrb1"), ens);
      } else if (has_format(cfg, "hrb1")) {
        warnings.push_back("trajectory export skipped: N*T*n exceeds the size cap");
      }
    }

    if (cfg.bounds_enabled) {
      const BoundReport report = verify_bounds(ds, cfg.train);
      for (const auto& w : report.warnings) warnings.push_back(w);
      std::cout << "bounds: " << report.checks.size() << " checks, "
                << report.violations.size() << " violations\n";
      if (has_format(cfg, "json"))
        io::write_json(tracker.path("bound_report.json"),
                       io::bound_report_json(report));
      if (has_format(cfg, "csv"))
        io::write_bound_report_csv(tracker.path("bound_report.csv"), report);
    }
  }

  if (cfg.sweep_enabled) {
    const DominanceSweep sweep = dominance_sweep(
        cfg.sweep_seed, cfg.sweep_count, cfg.sweep_kernels, threads);
    std::cout << "dominance sweep: " << sweep.total_checks << " checks over "
              << sweep.count << " configs, " << sweep.violations.size()
              << " violations\n";
    json doc = {{"hrb_schema", 1},
                {"kind", "dominance_sweep"},
                {"count", sweep.count},
                {"kernel_count", sweep.kernel_count},
                {"total_checks", sweep.total_checks},
                {"violations", sweep.violations}};
    io::write_json(tracker.path("dominance.json"), doc);
  }

  json manifest = {{"dataset", dataset_json(ds)},
                   {"train", train_json(cfg.train, cfg.sweep_T)},
                   {"pca_mode", cfg.pca_mode},
                   {"warnings", warnings}};
  write_manifest(tracker, manifest);
  std::cout << "outputs in " << tracker.dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Other subcommands
// ---------------------------------------------------------------------------

int do_gen(const DatasetSpec& spec, const std::string& out_flag) {
  OutputTracker tracker;
  tracker.dir = resolve_out_dir(out_flag, "");
  const Dataset ds = synthesize_dataset(spec);
  io::write_spectrum_csv(tracker.path("spectrum.csv"), ds.lambda);
  write_manifest(tracker, json{{"kind", "dataset"}, {"dataset", dataset_json(ds)}});
  std::cout << "dataset " << ds.id() << ": lambda_1="
            << io::format_double(ds.lambda[0]) << ", lambda_n="
            << io::format_double(ds.lambda[spec.n - 1]) << ", trace="
            << io::format_double(ds.lambda.sum()) << "\n"
            << "outputs in " << tracker.dir << "\n";
  return 0;
}

int do_spectrum(const std::string& input, double fit_floor, bool center,
                const std::string& out_flag) {
  const Eigen::MatrixXd m = io::read_csv_matrix(input);
  SlopeEstimate est;
  if (m.cols() == 1) {
    est = fit_spectrum(m.col(0), fit_floor);
  } else {
    Eigen::MatrixXd features = m;
    if (center) features.rowwise() -= features.colwise().mean();
    est = estimate_slope(features, fit_floor);
  }
  std::cout << "c_hat=" << io::format_double(est.c_hat)
            << " r_squared=" << io::format_double(est.r_squared)
            << " indices=[" << est.index_range.first << ","
            << est.index_range.second << "]"
            << (est.flat_spectrum ? " (flat spectrum)" : "") << "\n";
  OutputTracker tracker;
  tracker.dir = resolve_out_dir(out_flag, "");
  io::write_json(tracker.path("slope.json"), io::slope_json(est));
  std::cout << "outputs in " << tracker.dir << "\n";
  return 0;
}

int do_phase(PhaseGridSpec spec, std::vector<int> levels, bool coarse,
             const std::string& out_flag, int threads) {
  if (coarse) {
    std::vector<int> t2;
    for (std::size_t i = 0; i < spec.T_values.size(); i += 2)
      t2.push_back(spec.T_values[i]);
    spec.T_values = t2;
    std::vector<double> c2;
    for (std::size_t i = 0; i < spec.c_values.size(); i += 2)
      c2.push_back(spec.c_values[i]);
    spec.c_values = c2;
  }
  OutputTracker tracker;
  tracker.dir = resolve_out_dir(out_flag, "");
  const PhaseGrid grid = phase_sweep(spec, threads);
  io::write_grid_csv(tracker.path("grid.csv"), grid);

  std::vector<std::vector<ContourSet>> per_ratio;
  for (int ir = 0; ir < static_cast<int>(spec.ratio_values.size()); ++ir) {
    per_ratio.push_back(extract_contours(grid, ir, levels));
    io::write_phase_svg(tracker.path("phase_r" + std::to_string(ir) + ".svg"),
                        grid, ir, per_ratio.back());
  }
  io::write_json(tracker.path("contours.json"),
                 io::contours_json(grid, per_ratio));

  for (int ir = 0; ir < static_cast<int>(spec.ratio_values.size()); ++ir) {
    int lo = grid.dim_at(0, 0, ir), hi = lo;
    for (std::size_t it = 0; it < spec.T_values.size(); ++it)
      for (std::size_t ic = 0; ic < spec.c_values.size(); ++ic) {
        const int d = grid.dim_at(static_cast<int>(it), static_cast<int>(ic), ir);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    std::cout << "ratio " << io::format_double(spec.ratio_values[ir])
              << ": dims in [" << lo << ", " << hi << "]\n";
  }

  write_manifest(tracker,
                 json{{"kind", "phase"},
                      {"base",
                       {{"n", spec.base.n},
                        {"d", spec.base.d},
                        {"alpha", spec.base.alpha},
                        {"sigma_w_sq", spec.base.sigma_w_sq},
                        {"threshold", spec.base.threshold},
                        {"seed", spec.base.seed}}},
                      {"T_values", spec.T_values},
                      {"c_values", spec.c_values},
                      {"ratio_values", spec.ratio_values},
                      {"levels", levels}});
  std::cout << "outputs in " << tracker.dir << "\n";
  return 0;
}

int do_bounds_sweep(int count, std::uint64_t seed, bool kernels,
                    const std::string& out_flag, int threads) {
  OutputTracker tracker;
  tracker.dir = resolve_out_dir(out_flag, "");
  const DominanceSweep sweep = dominance_sweep(seed, count, kernels, threads);
  std::cout << "dominance sweep: " << sweep.total_checks << " checks over "
            << sweep.count << " configs";
  if (kernels) std::cout << " (" << sweep.kernel_count << " kernel ensembles)";
  std::cout << ", " << sweep.violations.size() << " violations\n";
  for (const auto& v : sweep.violations) std::cout << "  " << v << "\n";
  json doc = {{"hrb_schema", 1},
              {"kind", "dominance_sweep"},
              {"seed", seed},
              {"count", sweep.count},
              {"kernel_count", sweep.kernel_count},
              {"total_checks", sweep.total_checks},
              {"violations", sweep.violations}};
  io::write_json(tracker.path("dominance.json"), doc);
  write_manifest(tracker, json{{"kind", "dominance_sweep"}});
  std::cout << "outputs in " << tracker.dir << "\n";
  return 0;
}

}  // namespace

int run_main(int argc, const char* const* argv) {
  CLI::App app{
      "Closed-form PCA spectra, bound checks, and phase diagrams for linear "
      "training manifolds"};
  app.set_version_flag("--version", "hyperribbon 1.0.0");
  app.require_subcommand(1);

  std::string out_dir;
  int threads = 1;
  app.add_option("--out", out_dir, "Output directory (default: $HRB_OUT or ./hrb_out)");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)");

  // gen
  auto* gen = app.add_subcommand("gen", "Synthesize a dataset and report its spectrum");
  DatasetSpec gen_spec;
  gen->add_option("--n", gen_spec.n, "Samples")->required();
  gen->add_option("--d", gen_spec.d, "Input dimension")->required();
  gen->add_option("--c", gen_spec.c, "Spectrum decay rate")->required();
  gen->add_option("--sigma-star-sq", gen_spec.sigma_star_sq, "Teacher weight variance");
  gen->add_option("--sigma-w-sq", gen_spec.sigma_w_sq, "Initialization variance");
  gen->add_option("--seed", gen_spec.seed, "Master seed");

  // run
  auto* run = app.add_subcommand("run", "Run a configured analysis pipeline");
  std::string config_path, preset_name;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--preset", preset_name, "Named preset (fig3..fig6)");
  run->add_option("--seed", seed_override, "Override the dataset seed")
      ->each([&](const std::string&) { seed_given = true; });

  // phase
  auto* phase = app.add_subcommand("phase", "Dimensionality phase diagram");
  PhaseGridSpec phase_spec = PhaseGridSpec::defaults();
  std::vector<int> levels = {3, 10};
  bool coarse = false;
  phase->add_option("--threshold", phase_spec.base.threshold,
                    "Explained-variance threshold");
  phase->add_option("--seed", phase_spec.base.seed, "Master seed");
  phase->add_option("--n", phase_spec.base.n, "Spectrum size");
  phase->add_option("--alpha", phase_spec.base.alpha, "Step size");
  phase->add_option("--sigma-w-sq", phase_spec.base.sigma_w_sq,
                    "Initialization variance");
  phase->add_option("--ratios", phase_spec.ratio_values,
                    "Signal-to-initialization ratios");
  phase->add_option("--levels", levels, "Contour levels");
  phase->add_flag("--coarse", coarse, "Halve both grid axes");

  // spectrum
  auto* spectrum = app.add_subcommand(
      "spectrum", "Fit the exponential decay rate of a measured spectrum");
  std::string spectrum_input;
  double fit_floor = 1e-12;
  bool center = false;
  spectrum->add_option("input", spectrum_input,
                       "CSV: one eigenvalue column, or a feature matrix")
      ->required();
  spectrum->add_option("--fit-floor", fit_floor,
                       "Relative floor below which eigenvalues are ignored");
  spectrum->add_flag("--center", center, "Subtract column means first");

  // bounds-sweep
  auto* bsweep = app.add_subcommand(
      "bounds-sweep", "Check every bound family over random configurations");
  int sweep_count = 100;
  std::uint64_t sweep_seed = 20240501;
  bool no_kernels = false;
  bsweep->add_option("--count", sweep_count, "Number of configurations");
  bsweep->add_option("--seed", sweep_seed, "Sweep seed");
  bsweep->add_flag("--no-kernels", no_kernels, "Skip kernel-ensemble configs");

  // Let --out/--threads appear after the subcommand as well.
  for (CLI::App* sc : {gen, run, phase, spectrum, bsweep}) sc->fallthrough();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      throw ConfigError(e.what());
    }

    threads = resolve_threads(threads);
    if (gen->parsed()) return do_gen(gen_spec, out_dir);
    if (run->parsed()) {
      if (config_path.empty() == preset_name.empty())
        throw ConfigError("run: give exactly one of --config or --preset");
      const json doc = config_path.empty() ? preset_json(preset_name)
                                           : io::read_json(config_path);
      RunConfig cfg = run_config_from_json(doc);
      if (seed_given) cfg.dataset.seed = seed_override;
      return do_run(cfg, out_dir, threads);
    }
    if (phase->parsed()) return do_phase(phase_spec, levels, coarse, out_dir, threads);
    if (spectrum->parsed())
      return do_spectrum(spectrum_input, fit_floor, center, out_dir);
    if (bsweep->parsed())
      return do_bounds_sweep(sweep_count, sweep_seed, !no_kernels, out_dir, threads);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hrb::cli
