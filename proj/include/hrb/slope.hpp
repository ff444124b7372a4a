#pragma once

#include <Eigen/Core>
#include <utility>

namespace hrb {

/// Least-squares fit of ln lambda_i against (i - 1).
struct SlopeEstimate {
  double c_hat = 0.0;         // negated fitted slope
  double r_squared = 0.0;     // NaN when the kept spectrum is flat
  bool flat_spectrum = false; // fit degenerate: slope forced to 0
  std::pair<int, int> index_range{0, 0};  // 1-based inclusive eigen-indices used
  Eigen::VectorXd eigenvalues;            // full spectrum fitted, descending
};

/// Eigenvalues of F F^T / n for a feature matrix F (n x d), descending,
/// zero-padded to length n. Computed from singular values of F / sqrt(n) so
/// small eigenvalues keep high relative accuracy.
Eigen::VectorXd correlation_spectrum(const Eigen::MatrixXd& features);

/// Fits the decay slope of a descending spectrum over the entries above
/// fit_floor * lambda_1. Throws NumericError("insufficient spectrum") when
/// fewer than 3 entries qualify; an all-equal kept spectrum yields c_hat = 0
/// with flat_spectrum set and r_squared = NaN.
SlopeEstimate fit_spectrum(const Eigen::VectorXd& eigenvalues, double fit_floor = 1e-12);

/// Spectrum + fit for raw features (n >= 3 samples). Identical samples are a
/// degenerate point cloud: c_hat = 0 with flat_spectrum set, no error.
SlopeEstimate estimate_slope(const Eigen::MatrixXd& features, double fit_floor = 1e-12);

}  // namespace hrb
