#include "hrb/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "hrb/errors.hpp"
#include "hrb/rng.hpp"

namespace hrb {

namespace {

constexpr double kEdgeTol = 1e-12;

void check_common(const TrainConfig& c) {
  if (!(c.alpha > 0.0)) throw ConfigError("train: step size must be positive");
  if (c.T < 1) throw ConfigError("train: need at least one stored point (T >= 1)");
  if (c.N < 1) throw ConfigError("train: need at least one trajectory (N >= 1)");
}

/// Contraction factors 1 - alpha * lambda for the operative spectrum.
Eigen::VectorXd contraction(const Eigen::VectorXd& lambda, double alpha) {
  return (1.0 - alpha * lambda.array()).matrix();
}

TrajectoryEnsemble make_ensemble(int n, const TrainConfig& config,
                                 std::string dataset_ref,
                                 std::vector<std::string> warnings) {
  TrajectoryEnsemble e;
  e.n = n;
  e.T = config.T;
  e.N = config.N;
  e.config = config;
  e.dataset_ref = std::move(dataset_ref);
  e.warnings = std::move(warnings);
  e.data.assign(static_cast<std::size_t>(n) * config.T * config.N, 0.0);
  return e;
}

/// Evolves rho_{t+1} = q o rho_t (+ optional per-step noise), storing each
/// point rotated back through `basis` (nullptr = identity).
void evolve_trajectory(TrajectoryEnsemble& out, int trajectory,
                       const Eigen::MatrixXd* basis, const Eigen::VectorXd& q,
                       Eigen::VectorXd rho,
                       const std::function<void(int, Eigen::VectorXd&)>& add_noise) {
  for (int t = 0; t < out.T; ++t) {
    if (t > 0) {
      rho.array() *= q.array();
      if (add_noise) add_noise(t, rho);
    }
    auto slot = out.residual(trajectory, t);
    if (basis)
      slot = *basis * rho;
    else
      slot = rho;
  }
}

}  // namespace

std::vector<std::string> TrainConfig::validate(double lambda_max) const {
  check_common(*this);
  std::vector<std::string> warnings;
  const double margin = alpha * lambda_max - 1.0;
  if (margin > kEdgeTol)
    throw ConfigError("train: step size exceeds stability limit (alpha * lambda_1 > 1)");
  if (std::abs(margin) <= kEdgeTol)
    warnings.push_back("step size at the stability edge (alpha * lambda_1 = 1)");
  if (const auto* sgd = std::get_if<SgdMethod>(&method)) {
    if (sgd->batch_size < 1)
      throw ConfigError("train: minibatch size must be at least 1");
  }
  if (const auto* wd = std::get_if<WeightDecayMethod>(&method)) {
    if (!(wd->lambda_wd >= 0.0))
      throw ConfigError("train: weight decay strength must be nonnegative");
  }
  return warnings;
}

Eigen::Map<const Eigen::VectorXd> TrajectoryEnsemble::residual(int trajectory,
                                                               int step) const {
  const std::size_t offset =
      (static_cast<std::size_t>(trajectory) * T + step) * n;
  return {data.data() + offset, n};
}

Eigen::Map<Eigen::VectorXd> TrajectoryEnsemble::residual(int trajectory, int step) {
  const std::size_t offset =
      (static_cast<std::size_t>(trajectory) * T + step) * n;
  return {data.data() + offset, n};
}

TrajectoryEnsemble gd_ensemble(const Dataset& dataset, const TrainConfig& config) {
  return gd_ensemble(dataset, config, [&dataset](int i) {
    return sample_initial_weights(dataset.spec, i);
  });
}

TrajectoryEnsemble gd_ensemble(const Dataset& dataset, const TrainConfig& config,
                               const std::function<Eigen::VectorXd(int)>& initial_weights) {
  if (std::holds_alternative<SgdMethod>(config.method))
    throw ConfigError("gd_ensemble: minibatch method requires sgd_ensemble");
  const double shift =
      std::holds_alternative<WeightDecayMethod>(config.method)
          ? std::get<WeightDecayMethod>(config.method).lambda_wd
          : 0.0;
  const Eigen::VectorXd lambda =
      shift > 0.0 ? weight_decay_spectrum(dataset.lambda, shift) : dataset.lambda;
  auto warnings = config.validate(lambda[0]);
  auto out = make_ensemble(dataset.spec.n, config, dataset.id(), std::move(warnings));

  const Eigen::VectorXd q = contraction(lambda, config.alpha);
  for (int i = 0; i < config.N; ++i) {
    const Eigen::VectorXd w0 = initial_weights(i);
    if (w0.size() != dataset.spec.d)
      throw ConfigError("gd_ensemble: initial weights have wrong dimension");
    const Eigen::VectorXd rho0 =
        dataset.basis.transpose() * (dataset.inputs * w0) - dataset.targets_rot;
    evolve_trajectory(out, i, &dataset.basis, q, rho0, nullptr);
  }
  return out;
}

TrajectoryEnsemble sgd_ensemble(const Dataset& dataset, const TrainConfig& config) {
  const auto* sgd = std::get_if<SgdMethod>(&config.method);
  if (!sgd) throw ConfigError("sgd_ensemble: config must use the minibatch method");
  auto warnings = config.validate(dataset.lambda[0]);
  auto out = make_ensemble(dataset.spec.n, config, dataset.id(), std::move(warnings));

  const Eigen::VectorXd q = contraction(dataset.lambda, config.alpha);
  const double scale = config.alpha / std::sqrt(static_cast<double>(sgd->batch_size));
  const std::uint64_t seed = dataset.spec.seed;
  for (int i = 0; i < config.N; ++i) {
    const Eigen::VectorXd w0 = sample_initial_weights(dataset.spec, i);
    const Eigen::VectorXd rho0 =
        dataset.basis.transpose() * (dataset.inputs * w0) - dataset.targets_rot;
    std::function<void(int, Eigen::VectorXd&)> add_noise;
    if (!sgd->noise_disabled) {
      add_noise = [&, i](int t, Eigen::VectorXd& rho) {
        rng::Stream stream(seed, rng::Purpose::kMinibatchNoise,
                           static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(t));
        const Eigen::VectorXd g = stream.normal_vector(rho.size());
        rho.array() += scale * dataset.lambda.array() * g.array();
      };
    }
    evolve_trajectory(out, i, &dataset.basis, q, rho0, add_noise);
  }
  return out;
}

Eigen::VectorXd weight_decay_spectrum(const Eigen::VectorXd& lambda, double lambda_wd) {
  if (!(lambda_wd >= 0.0))
    throw ConfigError("weight decay: strength must be nonnegative");
  return (lambda.array() + lambda_wd).matrix();
}

SpectralProblem weight_decay_problem(const Dataset& dataset, double lambda_wd) {
  SpectralProblem p = spectral_problem(dataset);
  p.lambda = weight_decay_spectrum(p.lambda, lambda_wd);
  return p;
}

SpectralProblem Gram::problem(const Eigen::VectorXd& targets) const {
  if (targets.size() != matrix.rows())
    throw ConfigError("gram: target vector does not match operator size");
  SpectralProblem p;
  p.lambda = lambda;
  p.basis = basis;
  p.targets = targets;
  p.targets_rot = basis.transpose() * targets;
  return p;
}

Gram build_gram(const Eigen::MatrixXd& inputs, const KernelSpec& spec) {
  Gram gram;
  Eigen::MatrixXd m;
  if (std::holds_alternative<LinearKernel>(spec.kind)) {
    if (inputs.rows() < 1) throw ConfigError("gram: empty input matrix");
    m = inputs * inputs.transpose() / static_cast<double>(inputs.rows());
  } else if (const auto* rbf = std::get_if<RbfKernel>(&spec.kind)) {
    if (inputs.rows() < 1) throw ConfigError("gram: empty input matrix");
    if (!(rbf->bandwidth > 0.0))
      throw ConfigError("gram: RBF bandwidth must be positive");
    const int n = static_cast<int>(inputs.rows());
    const double denom =
        rbf->bandwidth * static_cast<double>(inputs.cols());
    const Eigen::VectorXd sq = inputs.rowwise().squaredNorm();
    m.resize(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = 1.0 / n;
      for (int j = i + 1; j < n; ++j) {
        const double dist = sq[i] + sq[j] - 2.0 * inputs.row(i).dot(inputs.row(j));
        const double k = std::exp(-std::max(dist, 0.0) / denom);
        m(i, j) = k / n;
        m(j, i) = k / n;
      }
    }
  } else {
    const auto& pre = std::get<PrecomputedKernel>(spec.kind);
    m = pre.matrix;
    if (m.rows() != m.cols()) throw ConfigError("gram: kernel matrix must be square");
    if (m.rows() < 1) throw ConfigError("gram: empty kernel matrix");
    if (inputs.size() != 0 && inputs.rows() != m.rows())
      throw ConfigError("gram: kernel matrix does not match input count");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * scale)
      throw ConfigError("gram: kernel matrix asymmetric beyond tolerance");
    m = ((m + m.transpose()) / 2.0).eval();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericError("gram: eigendecomposition failed");
  const int n = static_cast<int>(m.rows());
  gram.lambda.resize(n);
  gram.basis.resize(n, n);
  for (int i = 0; i < n; ++i) {
    gram.lambda[i] = solver.eigenvalues()[n - 1 - i];
    gram.basis.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  const double top = gram.lambda[0];
  if (!(top > 0.0)) throw NumericError("gram: kernel matrix has no positive spectrum");
  for (int i = 0; i < n; ++i) {
    if (gram.lambda[i] < -1e-10 * top)
      throw NumericError("gram: kernel matrix indefinite beyond tolerance");
    if (gram.lambda[i] < 0.0) gram.lambda[i] = 0.0;
  }
  gram.matrix = std::move(m);
  if (spec.normalize) {
    gram.matrix /= top;
    gram.lambda /= top;
  } else if (std::abs(top - 1.0) > 1e-8) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "gram not normalized (lambda_1 = %.6g); bounds assume lambda_1 = 1",
                  top);
    gram.warnings.emplace_back(buf);
  }
  return gram;
}

TrajectoryEnsemble kernel_gd_ensemble(const Gram& gram, const Eigen::VectorXd& targets,
                                      const TrainConfig& config, double sigma_w_sq,
                                      std::uint64_t seed) {
  if (!std::holds_alternative<GdMethod>(config.method))
    throw ConfigError("kernel_gd_ensemble: only plain contraction dynamics supported");
  if (!(sigma_w_sq >= 0.0))
    throw ConfigError("kernel_gd_ensemble: sigma_w_sq must be nonnegative");
  const SpectralProblem problem = gram.problem(targets);
  auto warnings = config.validate(problem.lambda[0]);
  auto out = make_ensemble(problem.n(), config, "gram", std::move(warnings));

  const Eigen::VectorXd q = contraction(problem.lambda, config.alpha);
  const Eigen::VectorXd sqrt_lambda = problem.lambda.array().sqrt().matrix();
  const double sigma_w = std::sqrt(sigma_w_sq);
  for (int i = 0; i < config.N; ++i) {
    rng::Stream stream(seed, rng::Purpose::kInitialWeights,
                       static_cast<std::uint64_t>(i));
    const Eigen::VectorXd g = stream.normal_vector(problem.n());
    const Eigen::VectorXd rho0 =
        (-problem.targets_rot.array() + sigma_w * sqrt_lambda.array() * g.array())
            .matrix();
    evolve_trajectory(out, i, &gram.basis, q, rho0, nullptr);
  }
  return out;
}

}  // namespace hrb
