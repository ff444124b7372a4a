#include "hrb/slope.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hrb/errors.hpp"

namespace hrb {

Eigen::VectorXd correlation_spectrum(const Eigen::MatrixXd& features) {
  const int n = static_cast<int>(features.rows());
  if (n < 1) throw ConfigError("correlation spectrum: empty feature matrix");
  const Eigen::MatrixXd scaled = features / std::sqrt(static_cast<double>(n));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < sv.size() && i < n; ++i) lambda[i] = sv[i] * sv[i];
  return lambda;
}

SlopeEstimate fit_spectrum(const Eigen::VectorXd& eigenvalues, double fit_floor) {
  if (!(fit_floor > 0.0) || !(fit_floor < 1.0))
    throw ConfigError("fit_spectrum: fit floor must lie in (0, 1)");
  Eigen::VectorXd eigs = eigenvalues;
  std::sort(eigs.data(), eigs.data() + eigs.size(), std::greater<double>());

  SlopeEstimate est;
  est.eigenvalues = eigs;
  const double top = eigs.size() > 0 ? eigs[0] : 0.0;
  if (!(top > 0.0)) {
    // Zero spectrum: no decay structure at all.
    est.flat_spectrum = true;
    est.r_squared = std::numeric_limits<double>::quiet_NaN();
    est.index_range = {0, 0};
    return est;
  }

  int kept = 0;
  while (kept < eigs.size() && eigs[kept] > fit_floor * top) ++kept;
  if (kept < 3) throw NumericError("insufficient spectrum");
  est.index_range = {1, kept};

  // Least squares of y = ln lambda_i on x = i - 1 over the kept prefix.
  double xbar = 0.0, ybar = 0.0;
  for (int i = 0; i < kept; ++i) {
    xbar += i;
    ybar += std::log(eigs[i]);
  }
  xbar /= kept;
  ybar /= kept;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < kept; ++i) {
    const double dx = i - xbar;
    const double dy = std::log(eigs[i]) - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  const double flat_tol = 1e-12 * std::max(1.0, std::abs(ybar));
  if (std::sqrt(syy / kept) <= flat_tol) {
    est.flat_spectrum = true;
    est.c_hat = 0.0;
    est.r_squared = std::numeric_limits<double>::quiet_NaN();
    return est;
  }

  const double slope = sxy / sxx;
  est.c_hat = -slope;
  double ss_res = 0.0;
  for (int i = 0; i < kept; ++i) {
    const double fit = ybar + slope * (i - xbar);
    const double r = std::log(eigs[i]) - fit;
    ss_res += r * r;
  }
  est.r_squared = 1.0 - ss_res / syy;
  return est;
}

SlopeEstimate estimate_slope(const Eigen::MatrixXd& features, double fit_floor) {
  if (features.rows() < 3)
    throw ConfigError("estimate_slope: need at least 3 samples");
  if (features.cols() < 1)
    throw ConfigError("estimate_slope: need at least 1 feature");

  // All samples identical: a point cloud with no spread in any direction.
  const Eigen::RowVectorXd first = features.row(0);
  const double spread = (features.rowwise() - first).cwiseAbs().maxCoeff();
  if (spread == 0.0) {
    SlopeEstimate est;
    est.eigenvalues = correlation_spectrum(features);
    est.flat_spectrum = true;
    est.c_hat = 0.0;
    est.r_squared = std::numeric_limits<double>::quiet_NaN();
    est.index_range = {0, 0};
    return est;
  }
  return fit_spectrum(correlation_spectrum(features), fit_floor);
}

}  // namespace hrb
