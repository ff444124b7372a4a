#pragma once

#include <Eigen/Core>
#include <vector>

#include "hrb/dataset.hpp"
#include "hrb/dynamics.hpp"

namespace hrb {

/// Sum of the geometric series 1 + q + ... + q^{T-1} for q in [0, 1],
/// exact by direct accumulation for small T and stable (expm1 / log1p)
/// beyond; q = 1 gives the coalescent limit T.
double geometric_sum(double q, int T);

/// Time-averaging operator K_T = (1/T) sum_t (I - alpha K)^t, diagonal in
/// the eigenbasis of K. Entries lie in (0, 1], decrease with T, and equal 1
/// at T = 1.
struct KtOperator {
  Eigen::VectorXd diag;
};
KtOperator kt_operator(const Eigen::VectorXd& lambda, double alpha, int T);

/// Principal components of the training-trajectory distribution.
///
/// Eigenvalue-array convention: lambda_sigma_w and lambda_y refer to the
/// T-scaled initialization and target parts (the 1/T average is applied only
/// when assembling P); lambda_P1 and lambda_P are spectra of the assembled
/// operators. lambda_P2 is the single nonzero eigenvalue of the rank-one
/// mean correction.
struct PcaDecomposition {
  Eigen::VectorXd lambda_P;
  Eigen::VectorXd lambda_P1;
  Eigen::VectorXd lambda_sigma_w;
  Eigen::VectorXd lambda_y;
  double lambda_P2 = 0.0;
  Eigen::VectorXd explained_variance;  // cumulative fractions of tr P
  Eigen::MatrixXd P;                   // assembled covariance, sample coordinates
  Eigen::MatrixXd basis;               // eigenvectors of P when requested
  bool degenerate = false;
};

/// Population covariance of contraction dynamics started from
/// r_0 ~ N(-y, sigma_w_sq K), evaluated in closed form in the eigenbasis.
/// Spectra that feed ratio bounds (lambda_y, lambda_P1) are computed as
/// squared singular values of explicit factors so the deep tail keeps
/// absolute accuracy near epsilon^2 * lambda_1.
PcaDecomposition analytic_pca(const SpectralProblem& problem, double alpha, int T,
                              double sigma_w_sq, bool want_basis = false);

/// Minibatch variant: adds the stationary noise diagonal
/// (alpha / batch) lambda_i / (2 - alpha lambda_i) minus its finite-T
/// correction. lambda_P1 is the spectrum of the noise-corrected P1.
/// noise_disabled reproduces analytic_pca bitwise.
PcaDecomposition sgd_analytic_pca(const SpectralProblem& problem, double alpha, int T,
                                  double sigma_w_sq, int batch_size,
                                  bool noise_disabled = false, bool want_basis = false);

/// Average over M normalized kernels: P(M, T) = (1/M) sum_m P1^(m)
/// minus the rank-one correction built from the averaged K_T operators.
PcaDecomposition multi_kernel_pca(const std::vector<Gram>& grams,
                                  const Eigen::VectorXd& targets, double alpha, int T,
                                  double sigma_w_sq, bool want_basis = false);

/// Two-pass sample covariance over all stored points of an ensemble.
PcaDecomposition empirical_pca(const TrajectoryEnsemble& ensemble,
                               bool want_basis = false);

/// Sample covariance of a seeded ensemble computed without materializing
/// trajectories, with per-batch covariances for Monte-Carlo error bars.
/// Batches partition the trajectory range deterministically.
struct SampledPca {
  Eigen::MatrixXd P;                    // covariance over all N trajectories
  std::vector<Eigen::MatrixXd> batch_P; // one covariance per batch
  Eigen::VectorXd mean_term;            // time-averaged mean residual
  std::vector<Eigen::VectorXd> batch_mean;  // the same, per batch
  std::vector<int> batch_sizes;
  int N = 0;
};

/// Exact per-trajectory time averaging for noise-free dynamics: the time
/// Gram matrix folds the T steps into an n x n Hadamard product, so cost is
/// O(N n^2) independent of T.
SampledPca gd_sampled_pca(const Dataset& dataset, const TrainConfig& config,
                          int num_batches = 10, int threads = 1);

/// Minibatch dynamics by stream regeneration (two passes, nothing stored).
SampledPca sgd_sampled_pca(const Dataset& dataset, const TrainConfig& config,
                           int num_batches = 10, int threads = 1);

/// Solves K_d P K_d^T - P + Q = 0 for diagonal contraction K_d = diag(q):
/// P_ij = Q_ij / (1 - q_i q_j). Throws NumericError("non-contractive") when
/// any |q_i| >= 1.
Eigen::MatrixXd solve_dlyap(const Eigen::VectorXd& q, const Eigen::MatrixXd& Q);

/// Cayley map to the continuous-time companion: Ktilde = (Kd + I)^{-1}(Kd - I)
/// (diagonal entries (q_i - 1)/(q_i + 1)) and B B^T = 2 (Kd + I)^{-1} Q
/// (Kd + I)^{-1}. The discrete solution P then satisfies
/// Ktilde P + P Ktilde + B B^T = 0.
struct ContinuousLyapunov {
  Eigen::VectorXd k_tilde;
  Eigen::MatrixXd bbt;
};
ContinuousLyapunov continuous_transform(const Eigen::VectorXd& q,
                                        const Eigen::MatrixXd& Q);

/// Smallest k whose leading eigenvalues reach the threshold fraction of the
/// total. All-zero spectra flag degenerate and return 0.
struct RibbonDim {
  int dims = 0;
  bool degenerate = false;
};
RibbonDim hyper_ribbon_dim(const Eigen::VectorXd& eigenvalues, double threshold);

}  // namespace hrb
