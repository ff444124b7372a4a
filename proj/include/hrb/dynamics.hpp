#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hrb/dataset.hpp"

namespace hrb {

struct GdMethod {};

struct SgdMethod {
  int batch_size = 1;
  bool noise_disabled = false;  // exact GD equivalence switch
};

struct WeightDecayMethod {
  double lambda_wd = 0.0;  // ridge strength; shifts every eigenvalue
};

using TrainMethod = std::variant<GdMethod, SgdMethod, WeightDecayMethod>;

struct TrainConfig {
  double alpha = 1.0;  // step size
  int T = 1;           // stored points per trajectory (T - 1 updates)
  int N = 1;           // trajectories
  TrainMethod method = GdMethod{};

  /// Validates against the largest eigenvalue the dynamics will run under.
  /// Throws ConfigError when unstable; returns warnings (e.g. step size
  /// exactly at the stability edge).
  std::vector<std::string> validate(double lambda_max) const;
};

/// Residual trajectories, trajectory-major then step then component.
struct TrajectoryEnsemble {
  int n = 0, T = 0, N = 0;
  std::string dataset_ref;
  TrainConfig config;
  std::vector<std::string> warnings;
  std::vector<double> data;

  Eigen::Map<const Eigen::VectorXd> residual(int trajectory, int step) const;
  Eigen::Map<Eigen::VectorXd> residual(int trajectory, int step);
};

/// Runs r_{t+1} = (I - alpha K) r_t from r_0 = X w_0 - y for N seeded
/// initializations. The update is diagonal in the eigenbasis of K; exported
/// residuals are rotated back to sample coordinates. Accepts GdMethod or
/// WeightDecayMethod (shifted spectrum); rejects SgdMethod.
TrajectoryEnsemble gd_ensemble(const Dataset& dataset, const TrainConfig& config);

/// Same, with explicit initial weights (index -> w_0).
TrajectoryEnsemble gd_ensemble(const Dataset& dataset, const TrainConfig& config,
                               const std::function<Eigen::VectorXd(int)>& initial_weights);

/// Minibatch dynamics: the GD update plus mean-zero gradient noise with
/// residual-space covariance (alpha^2 / batch) K^2, sampled per
/// (trajectory, step) from its own stream. noise_disabled reproduces
/// gd_ensemble bitwise.
TrajectoryEnsemble sgd_ensemble(const Dataset& dataset, const TrainConfig& config);

/// Spectrum of the ridge-shifted operator K + lambda_wd I.
Eigen::VectorXd weight_decay_spectrum(const Eigen::VectorXd& lambda, double lambda_wd);

/// Spectral view of the dataset under weight decay: shifted eigenvalues,
/// same basis and targets.
SpectralProblem weight_decay_problem(const Dataset& dataset, double lambda_wd);

struct LinearKernel {};
struct RbfKernel {
  double bandwidth = 1.0;  // k(x, x') = exp(-||x - x'||^2 / (bandwidth * d))
};
struct PrecomputedKernel {
  Eigen::MatrixXd matrix;
};

struct KernelSpec {
  std::variant<LinearKernel, RbfKernel, PrecomputedKernel> kind = LinearKernel{};
  bool normalize = false;  // rescale so lambda_1 = 1
};

/// Normalized Gram operator with its exact-by-construction eigendecomposition.
struct Gram {
  Eigen::MatrixXd matrix;  // K, n x n, sample-averaged (kernel / n)
  Eigen::VectorXd lambda;  // descending, clamped nonnegative
  Eigen::MatrixXd basis;
  std::vector<std::string> warnings;

  SpectralProblem problem(const Eigen::VectorXd& targets) const;
};

/// Builds K from inputs (rows = samples): linear X X^T / n, RBF entries
/// k(x_i, x_j) / n, or a precomputed square matrix (validated symmetric to
/// 1e-8, symmetrized, negative roundoff eigenvalues clamped at
/// -1e-10 lambda_1).
Gram build_gram(const Eigen::MatrixXd& inputs, const KernelSpec& spec);

/// Kernel-space dynamics: r_0 = -y + sigma_w * noise with noise covariance K
/// (drawn in the Gram eigenbasis), then the diagonal contraction. sigma_w_sq
/// may be zero: every trajectory then starts at exactly -y.
TrajectoryEnsemble kernel_gd_ensemble(const Gram& gram, const Eigen::VectorXd& targets,
                                      const TrainConfig& config, double sigma_w_sq,
                                      std::uint64_t seed);

}  // namespace hrb
