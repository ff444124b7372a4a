#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace hrb {

/// Parameters of a synthetic regression task with a prescribed geometric
/// input spectrum lambda_i = exp(-(i-1) c).
struct DatasetSpec {
  int n = 0;                    // samples
  int d = 0;                    // features, must exceed n
  double c = 0.0;               // spectral decay slope, must exceed 1/n
  double sigma_star_sq = 1.0;   // target scale: E||y||^2 = sigma_star_sq * tr K
  double sigma_w_sq = 1.0;      // initialization scale: Cov(X w0) = sigma_w_sq * K
  std::uint64_t seed = 0;

  /// Throws ConfigError if any field is out of range.
  void validate() const;
};

/// A synthesized task. The correlation operator K = X X^T / n has the exact
/// eigendecomposition (basis, lambda) by construction.
struct Dataset {
  DatasetSpec spec;
  Eigen::MatrixXd inputs;       // X, n x d
  Eigen::VectorXd targets;      // y = X w_star
  Eigen::VectorXd true_weights; // w_star
  Eigen::MatrixXd basis;        // V: columns are eigenvectors of K
  Eigen::VectorXd lambda;       // eigenvalues of K, descending
  Eigen::VectorXd targets_rot;  // V^T y

  /// Stable content identifier derived from the spec.
  std::string id() const;
};

/// Spectral view of a task: everything the analytic machinery needs.
/// An empty basis means the identity (coordinates are already spectral).
struct SpectralProblem {
  Eigen::VectorXd lambda;       // descending, nonnegative
  Eigen::MatrixXd basis;        // V, n x n orthonormal; may be empty
  Eigen::VectorXd targets;      // y in sample coordinates
  Eigen::VectorXd targets_rot;  // V^T y

  int n() const { return static_cast<int>(lambda.size()); }
  bool identity_basis() const { return basis.size() == 0; }
  /// V * x, or x itself under the identity basis.
  Eigen::VectorXd from_rot(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd from_rot(const Eigen::MatrixXd& m) const;  // V m V^T
};

/// Draws the dataset: X = U diag(sqrt(n lambda)) W^T with Haar factors U, W
/// and y = X w_star. Weight draws use per-coordinate variance sigma^2 / n so
/// the induced residual-space covariances are sigma_w_sq K and
/// sigma_star_sq-scaled exactly (E||y||^2 = sigma_star_sq tr K).
Dataset synthesize_dataset(const DatasetSpec& spec);

/// Initialization for one trajectory, w0 ~ N(0, (sigma_w_sq / n) I_d),
/// deterministic in (spec.seed, trajectory_index).
Eigen::VectorXd sample_initial_weights(const DatasetSpec& spec,
                                       std::int64_t trajectory_index);

/// Fresh target draw y = X w with w ~ N(0, (sigma_star_sq / n) I_d) at fixed
/// inputs. draw_index 0 reproduces the dataset's own targets.
Eigen::VectorXd resample_targets(const Dataset& dataset, std::int64_t draw_index);

SpectralProblem spectral_problem(const Dataset& dataset);

/// Spectral-only synthesis: identity basis, lambda_i = exp(-(i-1) c),
/// targets_rot_i ~ N(0, sigma_star_sq * lambda_i). Used by parameter sweeps
/// that never materialize inputs.
SpectralProblem synthesize_spectral(int n, double c, double sigma_star_sq,
                                    std::uint64_t seed, std::uint64_t draw_index = 0);

}  // namespace hrb
