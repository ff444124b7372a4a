#include "hrb/manifold.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>

#include "hrb/errors.hpp"
#include "hrb/parallel.hpp"
#include "hrb/rng.hpp"

namespace hrb {

namespace {

// Direct accumulation below this horizon: cheap, and exact where the
// assembly relies on algebraic cancellation (T = 1 collapses to sigma_w^2 K).
constexpr int kDirectSumMax = 64;

/// sum_{t<T} (q_i q_j)^t written in terms of x = alpha lambda:
/// u = 1 - q_i q_j = x_i + x_j - x_i x_j has no cancellation.
double pair_geometric_sum(double xi, double xj, int T) {
  if (T <= kDirectSumMax) {
    const double qq = (1.0 - xi) * (1.0 - xj);
    double acc = 1.0, term = 1.0;
    for (int t = 1; t < T; ++t) {
      term *= qq;
      acc += term;
    }
    return acc;
  }
  const double u = xi + xj - xi * xj;
  if (u < 1e-12) return static_cast<double>(T);  // coalescent limit
  const double log_qq = std::log1p(-xi) + std::log1p(-xj);
  return -std::expm1(static_cast<double>(T) * log_qq) / u;
}

/// alpha * lambda clamped into [0, 1]; rejects spectra beyond the stability
/// limit.
Eigen::VectorXd step_products(const Eigen::VectorXd& lambda, double alpha) {
  if (lambda.size() < 1) throw ConfigError("pca: empty spectrum");
  if (!(alpha > 0.0)) throw ConfigError("pca: step size must be positive");
  Eigen::VectorXd x = alpha * lambda;
  if (x.maxCoeff() > 1.0 + 1e-12)
    throw ConfigError("pca: step size exceeds stability limit (alpha * lambda_1 > 1)");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::min(1.0, std::max(0.0, x[i]));
  return x;
}

Eigen::VectorXd kappa_of(const Eigen::VectorXd& x, int T) {
  Eigen::VectorXd kappa(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    kappa[i] = pair_geometric_sum(x[i], 0.0, T) / static_cast<double>(T);
  return kappa;
}

/// Factor A with columns y_rot o q^t; A A^T equals the T-scaled target part.
/// Columns beyond relative norm 1e-22 are dropped (Gram change < 1e-40).
Eigen::MatrixXd target_part_factor(const Eigen::VectorXd& y_rot,
                                   const Eigen::VectorXd& x, int T) {
  const double xmin = x.minCoeff();
  const double log_qmax = std::log1p(-xmin);
  // Cap in the double domain: -50 / log_qmax can overflow any integer type
  // when x_min is subnormal (log_qmax ~ -x_min).
  double cap = static_cast<double>(T);
  if (log_qmax < 0.0) cap = std::min(cap, -50.0 / log_qmax + 2.0);
  const long long width = static_cast<long long>(std::max(1.0, cap));
  const Eigen::Index n = y_rot.size();
  Eigen::MatrixXd a(n, width);
  a.col(0) = y_rot;
  const Eigen::ArrayXd q = 1.0 - x.array();
  for (long long t = 1; t < width; ++t)
    a.col(t) = (a.col(t - 1).array() * q).matrix();
  return a;
}

/// Eigenvalues of F F^T via singular values, descending, padded to n.
/// Squaring keeps tail noise near epsilon^2 * lambda_1 instead of
/// epsilon * lambda_1.
Eigen::VectorXd psd_eigenvalues_from_factor(const Eigen::MatrixXd& f, Eigen::Index n) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(f);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < sv.size() && i < n; ++i) lambda[i] = sv[i] * sv[i];
  return lambda;
}

/// Dense eigendecomposition of the assembled covariance: clamps roundoff
/// negatives, fills explained variance, rotates back to sample coordinates.
void finalize_dense(PcaDecomposition& dec, const Eigen::MatrixXd& p_rot,
                    const SpectralProblem* problem, bool want_basis) {
  const Eigen::Index n = p_rot.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      p_rot, want_basis ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("pca: eigendecomposition failed");

  dec.lambda_P.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dec.lambda_P[i] = solver.eigenvalues()[n - 1 - i];
  const double top = std::max(dec.lambda_P[0], 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dec.lambda_P[i] < -1e-10 * top)
      throw NumericError("pca: covariance indefinite beyond tolerance");
    if (dec.lambda_P[i] < 0.0) dec.lambda_P[i] = 0.0;
  }

  dec.explained_variance.resize(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += dec.lambda_P[i];
    dec.explained_variance[i] = acc;
  }
  if (acc > 0.0) {
    dec.explained_variance /= acc;
  } else {
    dec.explained_variance.setZero();
    dec.degenerate = true;
  }

  dec.P = problem ? problem->from_rot(p_rot) : p_rot;
  if (want_basis) {
    Eigen::MatrixXd vecs(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      vecs.col(i) = solver.eigenvectors().col(n - 1 - i);
    dec.basis = (problem && !problem->identity_basis())
                    ? Eigen::MatrixXd(problem->basis * vecs)
                    : vecs;
  }
}

/// Shared closed-form assembly. extra_diag_T (may be empty) is added to the
/// T-scaled initialization diagonal; the minibatch variant feeds
/// T * (noise - finite-horizon correction) through it.
PcaDecomposition closed_form_pca(const SpectralProblem& problem, double alpha, int T,
                                 double sigma_w_sq, const Eigen::VectorXd& extra_diag_T,
                                 bool want_basis) {
  if (T < 1) throw ConfigError("pca: need T >= 1");
  if (!(sigma_w_sq >= 0.0)) throw ConfigError("pca: sigma_w_sq must be nonnegative");
  const Eigen::Index n = problem.lambda.size();
  if (problem.targets_rot.size() != n)
    throw ConfigError("pca: targets do not match spectrum size");
  const Eigen::VectorXd x = step_products(problem.lambda, alpha);

  PcaDecomposition dec;
  Eigen::VectorXd lamsw(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lamsw[i] = sigma_w_sq * problem.lambda[i] * pair_geometric_sum(x[i], x[i], T);
  Eigen::VectorXd lamsw_eff = lamsw;
  if (extra_diag_T.size() > 0) {
    if (extra_diag_T.size() != n) throw ConfigError("pca: bad noise diagonal size");
    lamsw_eff += extra_diag_T;
  }

  const Eigen::VectorXd& yr = problem.targets_rot;
  Eigen::MatrixXd tp1(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double s = pair_geometric_sum(x[i], x[j], T);
      tp1(i, j) = yr[i] * yr[j] * s;
      tp1(j, i) = tp1(i, j);
    }
  }
  tp1.diagonal() += lamsw_eff;

  const Eigen::VectorXd kappa = kappa_of(x, T);
  const Eigen::VectorXd p2vec = (kappa.array() * yr.array()).matrix();
  const Eigen::MatrixXd p_rot =
      tp1 / static_cast<double>(T) - p2vec * p2vec.transpose();

  dec.lambda_P2 = p2vec.squaredNorm();
  dec.lambda_sigma_w = lamsw;
  std::sort(dec.lambda_sigma_w.data(), dec.lambda_sigma_w.data() + n,
            std::greater<double>());

  const Eigen::MatrixXd target_factor = target_part_factor(yr, x, T);
  dec.lambda_y = psd_eigenvalues_from_factor(target_factor, n);

  Eigen::MatrixXd p1_factor(n, n + target_factor.cols());
  p1_factor.setZero();
  p1_factor.diagonal() = lamsw_eff.array().max(0.0).sqrt().matrix();
  p1_factor.rightCols(target_factor.cols()) = target_factor;
  dec.lambda_P1 = psd_eigenvalues_from_factor(p1_factor, n) / static_cast<double>(T);

  finalize_dense(dec, p_rot, &problem, want_basis);
  return dec;
}

}  // namespace

double geometric_sum(double q, int T) {
  if (T < 1) throw ConfigError("geometric_sum: need T >= 1");
  if (!(q >= 0.0) || q > 1.0)
    throw ConfigError("geometric_sum: ratio must lie in [0, 1]");
  if (q == 1.0) return static_cast<double>(T);  // coalescent limit
  return pair_geometric_sum(1.0 - q, 0.0, T);
}

KtOperator kt_operator(const Eigen::VectorXd& lambda, double alpha, int T) {
  if (T < 1) throw ConfigError("kt_operator: need T >= 1");
  const Eigen::VectorXd x = step_products(lambda, alpha);
  return {kappa_of(x, T)};
}

PcaDecomposition analytic_pca(const SpectralProblem& problem, double alpha, int T,
                              double sigma_w_sq, bool want_basis) {
  return closed_form_pca(problem, alpha, T, sigma_w_sq, Eigen::VectorXd(), want_basis);
}

PcaDecomposition sgd_analytic_pca(const SpectralProblem& problem, double alpha, int T,
                                  double sigma_w_sq, int batch_size,
                                  bool noise_disabled, bool want_basis) {
  if (batch_size < 1) throw ConfigError("pca: minibatch size must be at least 1");
  if (noise_disabled)
    return closed_form_pca(problem, alpha, T, sigma_w_sq, Eigen::VectorXd(),
                           want_basis);
  const Eigen::Index n = problem.lambda.size();
  const Eigen::VectorXd x = step_products(problem.lambda, alpha);
  Eigen::VectorXd extra(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Stationary noise floor (alpha / B) lambda / (2 - alpha lambda) and its
    // finite-horizon correction through the same geometric sum.
    const double pxi =
        (alpha / batch_size) * problem.lambda[i] / (2.0 - x[i]);
    const double corr =
        pxi * pair_geometric_sum(x[i], x[i], T) / static_cast<double>(T);
    extra[i] = static_cast<double>(T) * (pxi - corr);
  }
  return closed_form_pca(problem, alpha, T, sigma_w_sq, extra, want_basis);
}

PcaDecomposition multi_kernel_pca(const std::vector<Gram>& grams,
                                  const Eigen::VectorXd& targets, double alpha, int T,
                                  double sigma_w_sq, bool want_basis) {
  if (grams.empty()) throw ConfigError("multi_kernel_pca: need at least one kernel");
  if (T < 1) throw ConfigError("multi_kernel_pca: need T >= 1");
  if (!(sigma_w_sq >= 0.0))
    throw ConfigError("multi_kernel_pca: sigma_w_sq must be nonnegative");
  const Eigen::Index n = targets.size();
  const double m_count = static_cast<double>(grams.size());
  for (const Gram& g : grams) {
    if (g.matrix.rows() != n)
      throw ConfigError("multi_kernel_pca: kernel size does not match targets");
    if (std::abs(g.lambda[0] - 1.0) > 1e-8)
      throw ConfigError("multi_kernel_pca: kernels must be normalized (lambda_1 = 1)");
  }

  Eigen::MatrixXd sum_tp1 = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd p2vec = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::MatrixXd> p1_factors, y_factors, sw_factors;
  for (const Gram& g : grams) {
    const SpectralProblem pr = g.problem(targets);
    const Eigen::VectorXd x = step_products(pr.lambda, alpha);
    const Eigen::VectorXd& yr = pr.targets_rot;

    Eigen::VectorXd lamsw(n);
    for (Eigen::Index i = 0; i < n; ++i)
      lamsw[i] = sigma_w_sq * pr.lambda[i] * pair_geometric_sum(x[i], x[i], T);
    Eigen::MatrixXd tp1(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) {
        const double s = pair_geometric_sum(x[i], x[j], T);
        tp1(i, j) = yr[i] * yr[j] * s;
        tp1(j, i) = tp1(i, j);
      }
    tp1.diagonal() += lamsw;
    sum_tp1 += g.basis * tp1 * g.basis.transpose();

    const Eigen::VectorXd kappa = kappa_of(x, T);
    p2vec += g.basis * (kappa.array() * yr.array()).matrix();

    const Eigen::MatrixXd ay = target_part_factor(yr, x, T);
    y_factors.push_back(g.basis * ay);
    Eigen::MatrixXd p1f(n, n + ay.cols());
    p1f.setZero();
    p1f.diagonal() = lamsw.array().sqrt().matrix();
    p1f.rightCols(ay.cols()) = ay;
    p1_factors.push_back(g.basis * p1f);
    const Eigen::VectorXd sw_diag = lamsw.array().sqrt().matrix();
    sw_factors.push_back(g.basis * sw_diag.asDiagonal());
  }
  p2vec /= m_count;

  auto stack = [n](const std::vector<Eigen::MatrixXd>& blocks, double scale) {
    Eigen::Index cols = 0;
    for (const auto& b : blocks) cols += b.cols();
    Eigen::MatrixXd f(n, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
      f.middleCols(at, b.cols()) = scale * b;
      at += b.cols();
    }
    return f;
  };
  const double inv_sqrt_m = 1.0 / std::sqrt(m_count);

  PcaDecomposition dec;
  dec.lambda_P2 = p2vec.squaredNorm();
  dec.lambda_y = psd_eigenvalues_from_factor(stack(y_factors, inv_sqrt_m), n);
  dec.lambda_sigma_w = psd_eigenvalues_from_factor(stack(sw_factors, inv_sqrt_m), n);
  dec.lambda_P1 =
      psd_eigenvalues_from_factor(stack(p1_factors, inv_sqrt_m), n) /
      static_cast<double>(T);

  const Eigen::MatrixXd p = sum_tp1 / (m_count * T) - p2vec * p2vec.transpose();
  finalize_dense(dec, p, nullptr, want_basis);
  return dec;
}

PcaDecomposition empirical_pca(const TrajectoryEnsemble& ensemble, bool want_basis) {
  const int n = ensemble.n;
  if (n < 1) throw ConfigError("empirical_pca: empty ensemble");
  const long long points =
      static_cast<long long>(ensemble.N) * ensemble.T;
  PcaDecomposition dec;
  if (points < 2) {
    // A single stored point has no spread: the covariance is identically 0.
    dec.degenerate = true;
    dec.lambda_P = Eigen::VectorXd::Zero(n);
    dec.explained_variance = Eigen::VectorXd::Zero(n);
    dec.P = Eigen::MatrixXd::Zero(n, n);
    if (want_basis) dec.basis = Eigen::MatrixXd::Identity(n, n);
    return dec;
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < ensemble.N; ++i)
    for (int t = 0; t < ensemble.T; ++t) mean += ensemble.residual(i, t);
  mean /= static_cast<double>(points);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd dev(n);
  for (int i = 0; i < ensemble.N; ++i)
    for (int t = 0; t < ensemble.T; ++t) {
      dev = ensemble.residual(i, t) - mean;
      cov.selfadjointView<Eigen::Lower>().rankUpdate(dev, 1.0);
    }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(points);

  finalize_dense(dec, cov, nullptr, want_basis);
  return dec;
}

namespace {

std::vector<int> batch_partition(int N, int num_batches) {
  if (num_batches < 1) throw ConfigError("sampled pca: need at least one batch");
  const int batches = std::min(num_batches, N);
  std::vector<int> sizes(batches, N / batches);
  for (int b = 0; b < N % batches; ++b) ++sizes[b];
  return sizes;
}

}  // namespace

SampledPca gd_sampled_pca(const Dataset& dataset, const TrainConfig& config,
                          int num_batches, int threads) {
  if (std::holds_alternative<SgdMethod>(config.method))
    throw ConfigError("gd_sampled_pca: minibatch method requires sgd_sampled_pca");
  const double shift =
      std::holds_alternative<WeightDecayMethod>(config.method)
          ? std::get<WeightDecayMethod>(config.method).lambda_wd
          : 0.0;
  const Eigen::VectorXd lambda =
      shift > 0.0 ? weight_decay_spectrum(dataset.lambda, shift) : dataset.lambda;
  config.validate(lambda[0]);

  const int n = dataset.spec.n;
  const int T = config.T;
  const Eigen::VectorXd x = step_products(lambda, config.alpha);
  // Time Gram: G_ij = sum_t (q_i q_j)^t folds the whole trajectory average
  // into one Hadamard product with the initial second moment.
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g(i, j) = pair_geometric_sum(x[i], x[j], T);
      g(j, i) = g(i, j);
    }
  const Eigen::VectorXd kappa = kappa_of(x, T);

  const auto sizes = batch_partition(config.N, num_batches);
  const int batches = static_cast<int>(sizes.size());
  std::vector<Eigen::MatrixXd> moment(batches);
  std::vector<Eigen::VectorXd> first(batches);
  std::vector<int> starts(batches, 0);
  for (int b = 1; b < batches; ++b) starts[b] = starts[b - 1] + sizes[b - 1];

  parallel_for(batches, threads, [&](int b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (int i = starts[b]; i < starts[b] + sizes[b]; ++i) {
      const Eigen::VectorXd w0 = sample_initial_weights(dataset.spec, i);
      const Eigen::VectorXd rho0 =
          dataset.basis.transpose() * (dataset.inputs * w0) - dataset.targets_rot;
      s += rho0;
      m.selfadjointView<Eigen::Lower>().rankUpdate(rho0, 1.0);
    }
    moment[b] = m.selfadjointView<Eigen::Lower>();
    first[b] = s;
  });

  auto assemble = [&](const Eigen::MatrixXd& m, const Eigen::VectorXd& s,
                      int count) {
    const Eigen::VectorXd centered =
        (kappa.array() * (s / count).array()).matrix();
    Eigen::MatrixXd p_rot =
        (g.array() * m.array()).matrix() / (static_cast<double>(count) * T) -
        centered * centered.transpose();
    return Eigen::MatrixXd(dataset.basis * p_rot * dataset.basis.transpose());
  };

  auto mean_term_of = [&](const Eigen::VectorXd& s, int count) {
    return Eigen::VectorXd(dataset.basis *
                           (kappa.array() * (s / count).array()).matrix());
  };

  SampledPca out;
  out.N = config.N;
  out.batch_sizes = sizes;
  Eigen::MatrixXd m_total = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd s_total = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < batches; ++b) {
    out.batch_P.push_back(assemble(moment[b], first[b], sizes[b]));
    out.batch_mean.push_back(mean_term_of(first[b], sizes[b]));
    m_total += moment[b];
    s_total += first[b];
  }
  out.P = assemble(m_total, s_total, config.N);
  out.mean_term = mean_term_of(s_total, config.N);
  return out;
}

SampledPca sgd_sampled_pca(const Dataset& dataset, const TrainConfig& config,
                           int num_batches, int threads) {
  const auto* sgd = std::get_if<SgdMethod>(&config.method);
  if (!sgd) throw ConfigError("sgd_sampled_pca: config must use the minibatch method");
  config.validate(dataset.lambda[0]);

  const int n = dataset.spec.n;
  const int T = config.T;
  const Eigen::VectorXd x = step_products(dataset.lambda, config.alpha);
  const Eigen::VectorXd q = (1.0 - x.array()).matrix();
  const double scale =
      config.alpha / std::sqrt(static_cast<double>(sgd->batch_size));
  const std::uint64_t seed = dataset.spec.seed;
  const bool noisy = !sgd->noise_disabled;

  const auto sizes = batch_partition(config.N, num_batches);
  const int batches = static_cast<int>(sizes.size());
  std::vector<int> starts(batches, 0);
  for (int b = 1; b < batches; ++b) starts[b] = starts[b - 1] + sizes[b - 1];

  // foreach_point replays trajectory i's stream deterministically, so the
  // two passes see identical residuals without storing any.
  auto foreach_point = [&](int i, const std::function<void(const Eigen::VectorXd&)>& sink) {
    const Eigen::VectorXd w0 = sample_initial_weights(dataset.spec, i);
    Eigen::VectorXd rho =
        dataset.basis.transpose() * (dataset.inputs * w0) - dataset.targets_rot;
    sink(rho);
    for (int t = 1; t < T; ++t) {
      rho.array() *= q.array();
      if (noisy) {
        rng::Stream stream(seed, rng::Purpose::kMinibatchNoise,
                           static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(t));
        const Eigen::VectorXd gvec = stream.normal_vector(n);
        rho.array() += scale * dataset.lambda.array() * gvec.array();
      }
      sink(rho);
    }
  };

  std::vector<Eigen::VectorXd> batch_mean(batches);
  std::vector<Eigen::MatrixXd> batch_cov(batches);
  parallel_for(batches, threads, [&](int b) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (int i = starts[b]; i < starts[b] + sizes[b]; ++i)
      foreach_point(i, [&](const Eigen::VectorXd& rho) { mean += rho; });
    mean /= static_cast<double>(sizes[b]) * T;

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int i = starts[b]; i < starts[b] + sizes[b]; ++i)
      foreach_point(i, [&](const Eigen::VectorXd& rho) {
        const Eigen::VectorXd dev = rho - mean;
        acc.selfadjointView<Eigen::Lower>().rankUpdate(dev, 1.0);
      });
    batch_mean[b] = mean;
    batch_cov[b] = acc.selfadjointView<Eigen::Lower>();
  });

  const double total_points = static_cast<double>(config.N) * T;
  Eigen::VectorXd global_mean = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < batches; ++b)
    global_mean += batch_mean[b] * (static_cast<double>(sizes[b]) * T);
  global_mean /= total_points;

  SampledPca out;
  out.N = config.N;
  out.batch_sizes = sizes;
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < batches; ++b) {
    const double points = static_cast<double>(sizes[b]) * T;
    out.batch_P.push_back(dataset.basis * (batch_cov[b] / points) *
                          dataset.basis.transpose());
    out.batch_mean.push_back(dataset.basis * batch_mean[b]);
    const Eigen::VectorXd offset = batch_mean[b] - global_mean;
    total += batch_cov[b] + points * offset * offset.transpose();
  }
  out.P = dataset.basis * (total / total_points) * dataset.basis.transpose();
  out.mean_term = dataset.basis * global_mean;
  return out;
}

Eigen::MatrixXd solve_dlyap(const Eigen::VectorXd& q, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = q.size();
  if (Q.rows() != n || Q.cols() != n)
    throw ConfigError("solve_dlyap: size mismatch");
  if (q.cwiseAbs().maxCoeff() >= 1.0) throw NumericError("non-contractive");
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = Q(i, j) / (1.0 - q[i] * q[j]);
  return p;
}

ContinuousLyapunov continuous_transform(const Eigen::VectorXd& q,
                                        const Eigen::MatrixXd& Q) {
  const Eigen::Index n = q.size();
  if (Q.rows() != n || Q.cols() != n)
    throw ConfigError("continuous_transform: size mismatch");
  if (q.cwiseAbs().maxCoeff() >= 1.0) throw NumericError("non-contractive");
  ContinuousLyapunov out;
  out.k_tilde.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.k_tilde[i] = (q[i] - 1.0) / (q[i] + 1.0);
  out.bbt.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.bbt(i, j) = 2.0 * Q(i, j) / ((1.0 + q[i]) * (1.0 + q[j]));
  return out;
}

RibbonDim hyper_ribbon_dim(const Eigen::VectorXd& eigenvalues, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw ConfigError("hyper_ribbon_dim: threshold must lie in (0, 1]");
  Eigen::VectorXd eigs = eigenvalues;
  std::sort(eigs.data(), eigs.data() + eigs.size(), std::greater<double>());
  double total = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) total += std::max(eigs[i], 0.0);
  if (!(total > 0.0)) return {0, true};
  const double goal = threshold * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    acc += std::max(eigs[i], 0.0);
    if (acc >= goal) return {static_cast<int>(i) + 1, false};
  }
  return {static_cast<int>(eigs.size()), false};
}

}  // namespace hrb
