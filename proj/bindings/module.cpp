#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <variant>

#include "hrb/bounds.hpp"
#include "hrb/dataset.hpp"
#include "hrb/dynamics.hpp"
#include "hrb/errors.hpp"
#include "hrb/manifold.hpp"
#include "hrb/phase.hpp"
#include "hrb/slope.hpp"

namespace py = pybind11;
using namespace hrb;

namespace {

TrainMethod make_method(const std::string& method, int batch_size,
                        bool noise_disabled, double lambda_wd) {
  if (method == "gd") return GdMethod{};
  if (method == "sgd") return SgdMethod{batch_size, noise_disabled};
  if (method == "weight_decay") return WeightDecayMethod{lambda_wd};
  throw ConfigError("unknown method '" + method + "'");
}

TrainConfig make_config(double alpha, int T, int N, const std::string& method,
                        int batch_size, bool noise_disabled, double lambda_wd) {
  TrainConfig cfg;
  cfg.alpha = alpha;
  cfg.T = T;
  cfg.N = N;
  cfg.method = make_method(method, batch_size, noise_disabled, lambda_wd);
  return cfg;
}

py::dict pca_dict(const PcaDecomposition& dec) {
  py::dict out;
  out["lambda_P"] = dec.lambda_P;
  out["lambda_P1"] = dec.lambda_P1;
  out["lambda_sigma_w"] = dec.lambda_sigma_w;
  out["lambda_y"] = dec.lambda_y;
  out["lambda_P2"] = dec.lambda_P2;
  out["explained_variance"] = dec.explained_variance;
  out["P"] = dec.P;
  out["degenerate"] = dec.degenerate;
  return out;
}

py::dict slope_dict(const SlopeEstimate& est) {
  py::dict out;
  out["c_hat"] = est.c_hat;
  out["r_squared"] = est.r_squared;
  out["flat_spectrum"] = est.flat_spectrum;
  out["index_range"] = py::make_tuple(est.index_range.first, est.index_range.second);
  out["eigenvalues"] = est.eigenvalues;
  return out;
}

PcaDecomposition analytic_for(const Dataset& ds, double alpha, int T,
                              const std::string& method, int batch_size,
                              bool noise_disabled, double lambda_wd,
                              bool want_basis) {
  SpectralProblem problem = spectral_problem(ds);
  if (method == "weight_decay")
    problem.lambda = weight_decay_spectrum(problem.lambda, lambda_wd);
  if (method == "sgd")
    return sgd_analytic_pca(problem, alpha, T, ds.spec.sigma_w_sq, batch_size,
                            noise_disabled, want_basis);
  if (method == "gd" || method == "weight_decay")
    return analytic_pca(problem, alpha, T, ds.spec.sigma_w_sq, want_basis);
  throw ConfigError("unknown method '" + method + "'");
}

}  // namespace

PYBIND11_MODULE(_hyperribbon, m) {
  m.doc() =
      "Closed-form PCA spectra of linear training manifolds: residual "
      "covariances, spectral bounds, and dimensionality phase diagrams.";
  m.attr("__version__") = "1.0.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n", [](const Dataset& d) { return d.spec.n; })
      .def_property_readonly("d", [](const Dataset& d) { return d.spec.d; })
      .def_property_readonly("c", [](const Dataset& d) { return d.spec.c; })
      .def_property_readonly("sigma_star_sq",
                             [](const Dataset& d) { return d.spec.sigma_star_sq; })
      .def_property_readonly("sigma_w_sq",
                             [](const Dataset& d) { return d.spec.sigma_w_sq; })
      .def_property_readonly("seed", [](const Dataset& d) { return d.spec.seed; })
      .def_property_readonly("inputs", [](const Dataset& d) { return d.inputs; })
      .def_property_readonly("targets", [](const Dataset& d) { return d.targets; })
      .def_property_readonly("true_weights",
                             [](const Dataset& d) { return d.true_weights; })
      .def_property_readonly("basis", [](const Dataset& d) { return d.basis; })
      .def_property_readonly("eigenvalues",
                             [](const Dataset& d) { return d.lambda; })
      .def_property_readonly("targets_rot",
                             [](const Dataset& d) { return d.targets_rot; })
      .def_property_readonly("id", &Dataset::id)
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset " + d.id() + " n=" + std::to_string(d.spec.n) +
               " d=" + std::to_string(d.spec.d) + ">";
      });

  m.def(
      "make_dataset",
      [](int n, int d, double c, double sigma_star_sq, double sigma_w_sq,
         std::uint64_t seed) {
        DatasetSpec spec;
        spec.n = n;
        spec.d = d;
        spec.c = c;
        spec.sigma_star_sq = sigma_star_sq;
        spec.sigma_w_sq = sigma_w_sq;
        spec.seed = seed;
        return synthesize_dataset(spec);
      },
      py::arg("n"), py::arg("d"), py::arg("c"), py::arg("sigma_star_sq") = 1.0,
      py::arg("sigma_w_sq") = 1.0, py::arg("seed") = 1,
      "Synthesize inputs with an exponentially decaying correlation spectrum "
      "and targets from a random teacher.");

  m.def(
      "analytic_cov",
      [](const Dataset& ds, double alpha, int T, const std::string& method,
         int batch_size, bool noise_disabled, double lambda_wd, bool want_basis) {
        return pca_dict(analytic_for(ds, alpha, T, method, batch_size,
                                     noise_disabled, lambda_wd, want_basis));
      },
      py::arg("dataset"), py::arg("alpha"), py::arg("T"),
      py::arg("method") = "gd", py::arg("batch_size") = 8,
      py::arg("noise_disabled") = false, py::arg("lambda_wd") = 0.01,
      py::arg("want_basis") = false,
      "Closed-form trajectory covariance and its eigendecomposition.");

  m.def(
      "spectral_cov",
      [](const Eigen::VectorXd& lambda, const Eigen::VectorXd& targets_rot,
         double alpha, int T, double sigma_w_sq, bool want_basis) {
        SpectralProblem problem;
        problem.lambda = lambda;
        problem.targets = targets_rot;  // identity basis
        problem.targets_rot = targets_rot;
        return pca_dict(analytic_pca(problem, alpha, T, sigma_w_sq, want_basis));
      },
      py::arg("eigenvalues"), py::arg("targets_rot"), py::arg("alpha"),
      py::arg("T"), py::arg("sigma_w_sq"), py::arg("want_basis") = false,
      "Closed-form covariance directly from a spectrum and rotated targets.");

  m.def(
      "empirical_cov",
      [](const Dataset& ds, double alpha, int T, int N,
         const std::string& method, int batch_size, bool noise_disabled,
         double lambda_wd, int num_batches, int threads) {
        const TrainConfig cfg = make_config(alpha, T, N, method, batch_size,
                                            noise_disabled, lambda_wd);
        const SampledPca sp = method == "sgd"
                                  ? sgd_sampled_pca(ds, cfg, num_batches, threads)
                                  : gd_sampled_pca(ds, cfg, num_batches, threads);
        py::dict out;
        out["P"] = sp.P;
        out["batch_P"] = sp.batch_P;
        out["mean_term"] = sp.mean_term;
        out["batch_mean"] = sp.batch_mean;
        out["batch_sizes"] = sp.batch_sizes;
        out["N"] = sp.N;
        return out;
      },
      py::arg("dataset"), py::arg("alpha"), py::arg("T"), py::arg("N"),
      py::arg("method") = "gd", py::arg("batch_size") = 8,
      py::arg("noise_disabled") = false, py::arg("lambda_wd") = 0.01,
      py::arg("num_batches") = 10, py::arg("threads") = 1,
      "Monte Carlo trajectory covariance over N seeded initializations, with "
      "per-batch copies for standard errors.");

  m.def(
      "trajectories",
      [](const Dataset& ds, double alpha, int T, int N,
         const std::string& method, int batch_size, bool noise_disabled,
         double lambda_wd) {
        const TrainConfig cfg = make_config(alpha, T, N, method, batch_size,
                                            noise_disabled, lambda_wd);
        if (static_cast<long long>(N) * T * ds.spec.n > (1LL << 24))
          throw ConfigError("trajectories: requested ensemble is too large");
        const TrajectoryEnsemble ens =
            method == "sgd" ? sgd_ensemble(ds, cfg) : gd_ensemble(ds, cfg);
        py::array_t<double> out({static_cast<py::ssize_t>(N),
                                 static_cast<py::ssize_t>(T),
                                 static_cast<py::ssize_t>(ds.spec.n)});
        std::copy(ens.data.begin(), ens.data.end(), out.mutable_data());
        return out;
      },
      py::arg("dataset"), py::arg("alpha"), py::arg("T"), py::arg("N"),
      py::arg("method") = "gd", py::arg("batch_size") = 8,
      py::arg("noise_disabled") = false, py::arg("lambda_wd") = 0.01,
      "Residual trajectories as an (N, T, n) array.");

  m.def(
      "verify_bounds",
      [](const Dataset& ds, double alpha, int T, const std::string& method,
         int batch_size, bool noise_disabled, double lambda_wd) {
        TrainConfig cfg = make_config(alpha, T, ds.spec.n, method, batch_size,
                                      noise_disabled, lambda_wd);
        const BoundReport rep = verify_bounds(ds, cfg);
        py::dict out;
        out["all_satisfied"] = rep.all_satisfied();
        out["num_checks"] = rep.checks.size();
        out["violations"] = rep.violations;
        out["warnings"] = rep.warnings;
        out["rho"] = rep.rho;
        out["k_star"] = rep.k_star;
        out["y_norm_sq"] = rep.y_norm_sq;
        py::list checks;
        for (const auto& c : rep.checks)
          checks.append(py::make_tuple(c.family, c.index, c.numeric, c.bound,
                                       c.satisfied));
        out["checks"] = checks;
        return out;
      },
      py::arg("dataset"), py::arg("alpha"), py::arg("T"),
      py::arg("method") = "gd", py::arg("batch_size") = 8,
      py::arg("noise_disabled") = false, py::arg("lambda_wd") = 0.01,
      "Evaluate every applicable spectral bound family for one configuration.");

  m.def(
      "dominance_sweep",
      [](std::uint64_t seed, int count, bool kernels, int threads) {
        const DominanceSweep sweep = dominance_sweep(seed, count, kernels, threads);
        py::dict out;
        out["count"] = sweep.count;
        out["kernel_count"] = sweep.kernel_count;
        out["total_checks"] = sweep.total_checks;
        out["violations"] = sweep.violations;
        return out;
      },
      py::arg("seed") = 20240501, py::arg("count") = 100,
      py::arg("kernels") = true, py::arg("threads") = 1,
      "Random-configuration stress test of all bound families.");

  m.def(
      "fit_spectrum",
      [](const Eigen::VectorXd& eigenvalues, double fit_floor) {
        return slope_dict(fit_spectrum(eigenvalues, fit_floor));
      },
      py::arg("eigenvalues"), py::arg("fit_floor") = 1e-12,
      "Least-squares exponential decay rate of a measured spectrum.");

  m.def(
      "estimate_slope",
      [](const Eigen::MatrixXd& features, double fit_floor) {
        return slope_dict(estimate_slope(features, fit_floor));
      },
      py::arg("features"), py::arg("fit_floor") = 1e-12,
      "Decay rate of the correlation spectrum of raw features (rows = samples).");

  m.def(
      "hyper_ribbon_dim",
      [](const Eigen::VectorXd& eigenvalues, double threshold) {
        return hyper_ribbon_dim(eigenvalues, threshold).dims;
      },
      py::arg("eigenvalues"), py::arg("threshold") = 0.95,
      "Number of leading eigenvalues needed to reach the explained-variance "
      "threshold.");

  m.def("solve_dlyap", &solve_dlyap, py::arg("q"), py::arg("Q"),
        "Solve the diagonal discrete Lyapunov equation.");

  m.def(
      "phase_sweep",
      [](const std::vector<int>& T_values, const std::vector<double>& c_values,
         const std::vector<double>& ratio_values, int n, double alpha,
         double sigma_w_sq, double threshold, std::uint64_t seed, int threads) {
        PhaseGridSpec spec;
        spec.T_values = T_values;
        spec.c_values = c_values;
        spec.ratio_values = ratio_values;
        spec.base.n = n;
        spec.base.alpha = alpha;
        spec.base.sigma_w_sq = sigma_w_sq;
        spec.base.threshold = threshold;
        spec.base.seed = seed;
        const PhaseGrid grid = phase_sweep(spec, threads);
        py::array_t<int> out({static_cast<py::ssize_t>(T_values.size()),
                              static_cast<py::ssize_t>(c_values.size()),
                              static_cast<py::ssize_t>(ratio_values.size())});
        std::copy(grid.dims.begin(), grid.dims.end(), out.mutable_data());
        return out;
      },
      py::arg("T_values"), py::arg("c_values"), py::arg("ratio_values"),
      py::arg("n") = 50, py::arg("alpha") = 1.0, py::arg("sigma_w_sq") = 1.0,
      py::arg("threshold") = 0.95, py::arg("seed") = 1, py::arg("threads") = 1,
      "Hyper-ribbon dimension over a (T, c, ratio) grid.");
}
