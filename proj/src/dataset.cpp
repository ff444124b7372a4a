#include "hrb/dataset.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "hrb/errors.hpp"
#include "hrb/rng.hpp"

namespace hrb {

namespace {

/// Thin Haar orthonormal factor from a Gaussian draw, with the usual
/// sign fix (R diagonal positive) so the factor is unique.
Eigen::MatrixXd haar_factor(int rows, int cols, rng::Stream stream) {
  Eigen::MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = stream.next_normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (int j = 0; j < cols; ++j)
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::VectorXd geometric_spectrum(int n, double c) {
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = std::exp(-c * i);
  return lambda;
}

}  // namespace

void DatasetSpec::validate() const {
  if (n < 1) throw ConfigError("dataset: n must be at least 1");
  if (d <= n) throw ConfigError("dataset: need more features than samples (d > n)");
  if (!(c * n > 1.0))
    throw ConfigError("dataset: decay slope too shallow (require c > 1/n)");
  if (!(sigma_star_sq > 0.0) || !(sigma_w_sq > 0.0))
    throw ConfigError("dataset: variances must be positive");
}

std::string Dataset::id() const {
  std::uint64_t h = rng::mix64(spec.seed + 0x517cc1b727220a95ULL);
  auto fold = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h = rng::mix64(h ^ bits);
  };
  h = rng::mix64(h ^ static_cast<std::uint64_t>(spec.n));
  h = rng::mix64(h ^ static_cast<std::uint64_t>(spec.d));
  fold(spec.c);
  fold(spec.sigma_star_sq);
  fold(spec.sigma_w_sq);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ds-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Eigen::VectorXd SpectralProblem::from_rot(const Eigen::VectorXd& x) const {
  return identity_basis() ? x : Eigen::VectorXd(basis * x);
}

Eigen::MatrixXd SpectralProblem::from_rot(const Eigen::MatrixXd& m) const {
  return identity_basis() ? m : Eigen::MatrixXd(basis * m * basis.transpose());
}

Dataset synthesize_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.spec = spec;
  ds.lambda = geometric_spectrum(spec.n, spec.c);
  ds.basis = haar_factor(spec.n, spec.n,
                         rng::Stream(spec.seed, rng::Purpose::kLeftFactor));
  const Eigen::MatrixXd w =
      haar_factor(spec.d, spec.n, rng::Stream(spec.seed, rng::Purpose::kRightFactor));
  const Eigen::VectorXd scale =
      (static_cast<double>(spec.n) * ds.lambda.array()).sqrt().matrix();
  ds.inputs = ds.basis * scale.asDiagonal() * w.transpose();

  rng::Stream wstar(spec.seed, rng::Purpose::kTrueWeights, 0);
  ds.true_weights =
      std::sqrt(spec.sigma_star_sq / spec.n) * wstar.normal_vector(spec.d);
  ds.targets = ds.inputs * ds.true_weights;
  ds.targets_rot = ds.basis.transpose() * ds.targets;
  return ds;
}

Eigen::VectorXd sample_initial_weights(const DatasetSpec& spec,
                                       std::int64_t trajectory_index) {
  spec.validate();
  if (trajectory_index < 0)
    throw ConfigError("sample_initial_weights: trajectory index must be nonnegative");
  rng::Stream stream(spec.seed, rng::Purpose::kInitialWeights,
                     static_cast<std::uint64_t>(trajectory_index));
  return std::sqrt(spec.sigma_w_sq / spec.n) * stream.normal_vector(spec.d);
}

Eigen::VectorXd resample_targets(const Dataset& dataset, std::int64_t draw_index) {
  if (draw_index < 0)
    throw ConfigError("resample_targets: draw index must be nonnegative");
  rng::Stream stream(dataset.spec.seed, rng::Purpose::kTrueWeights,
                     static_cast<std::uint64_t>(draw_index));
  const Eigen::VectorXd w = std::sqrt(dataset.spec.sigma_star_sq / dataset.spec.n) *
                            stream.normal_vector(dataset.spec.d);
  return dataset.inputs * w;
}

SpectralProblem spectral_problem(const Dataset& dataset) {
  SpectralProblem p;
  p.lambda = dataset.lambda;
  p.basis = dataset.basis;
  p.targets = dataset.targets;
  p.targets_rot = dataset.targets_rot;
  return p;
}

SpectralProblem synthesize_spectral(int n, double c, double sigma_star_sq,
                                    std::uint64_t seed, std::uint64_t draw_index) {
  if (n < 1) throw ConfigError("spectral problem: n must be at least 1");
  if (!(c * n > 1.0))
    throw ConfigError("spectral problem: decay slope too shallow (require c > 1/n)");
  if (!(sigma_star_sq > 0.0))
    throw ConfigError("spectral problem: variance must be positive");
  SpectralProblem p;
  p.lambda = geometric_spectrum(n, c);
  rng::Stream stream(seed, rng::Purpose::kCellTargets, draw_index);
  const Eigen::VectorXd g = stream.normal_vector(n);
  p.targets_rot =
      (std::sqrt(sigma_star_sq) * p.lambda.array().sqrt() * g.array()).matrix();
  p.targets = p.targets_rot;
  return p;
}

}  // namespace hrb
