#include "hrb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hrb/errors.hpp"
#include "hrb/manifold.hpp"
#include "hrb/parallel.hpp"
#include "hrb/rng.hpp"
#include "hrb/slope.hpp"

namespace hrb {

namespace {

constexpr double kRelSlack = 1e-9;
constexpr double kPiSq = 9.869604401089358;  // pi^2

void require_index(int index, int limit, const char* what) {
  if (index < 1 || index > limit)
    throw ConfigError(std::string(what) + ": index out of range");
}

double additive_floor(double extra, double alpha, double sigma_w_sq,
                      double y_norm_sq) {
  if (!(y_norm_sq > 0.0)) throw ConfigError("bounds: targets have zero norm");
  return (sigma_w_sq / alpha + extra) / y_norm_sq;
}

std::string describe(const BoundCheck& c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s[%d]: numeric=%.12g bound=%.12g",
                c.family.c_str(), c.index, c.numeric, c.bound);
  return buf;
}

void add_upper(BoundReport& rep, std::string family, int index, double numeric,
               double bound, double tol_abs = 0.0) {
  BoundCheck c;
  c.family = std::move(family);
  c.index = index;
  c.numeric = numeric;
  c.bound = bound;
  c.slack = bound - numeric;
  const double allowance = std::max(std::abs(bound) * kRelSlack, tol_abs);
  c.satisfied = numeric <= bound + allowance;
  if (!c.satisfied) rep.violations.push_back(describe(c));
  rep.checks.push_back(std::move(c));
}

void add_lower(BoundReport& rep, std::string family, int index, double numeric,
               double floor_value, double tol_abs = 0.0) {
  BoundCheck c;
  c.family = std::move(family);
  c.index = index;
  c.numeric = numeric;
  c.bound = floor_value;
  c.slack = numeric - floor_value;
  const double allowance = std::max(std::abs(floor_value) * kRelSlack, tol_abs);
  c.satisfied = numeric >= floor_value - allowance;
  if (!c.satisfied) rep.violations.push_back(describe(c));
  rep.checks.push_back(std::move(c));
}

}  // namespace

double sigma_w_bound(int index, double alpha, int T, double sigma_w_sq,
                     double lambda_i) {
  if (index < 1) throw ConfigError("sigma_w_bound: index must be positive");
  if (T < 1) throw ConfigError("sigma_w_bound: need T >= 1");
  if (!(alpha > 0.0)) throw ConfigError("sigma_w_bound: step size must be positive");
  if (!(lambda_i >= 0.0) || alpha * lambda_i > 1.0 + 1e-12)
    throw ConfigError("sigma_w_bound: alpha * lambda must lie in [0, 1]");
  const double x = std::min(1.0, alpha * lambda_i);
  return (sigma_w_sq / alpha) * std::min(1.0, 2.0 * T * x) / (2.0 - x);
}

double rho_of_spectrum(double lambda_max, double lambda_min) {
  if (!(lambda_max > 0.0) || !(lambda_min > 0.0))
    throw NumericError("bound undefined: spectrum must be positive");
  if (!(lambda_max > lambda_min))
    throw NumericError("bound undefined: flat spectrum");
  const double arg = 8.0 * lambda_max / lambda_min - 4.0;
  return std::exp(kPiSq / (2.0 * std::log(arg)));
}

Lemma1Bound lemma1_ratio_bound(double rho, int index) {
  if (!(rho > 1.0)) throw ConfigError("lemma1_ratio_bound: need rho > 1");
  if (index < 1) throw ConfigError("lemma1_ratio_bound: index must be positive");
  const int exponent = 2 * ((index - 1) / 2);
  const double r = std::pow(rho, -exponent);
  Lemma1Bound b;
  b.loose = 4.0 * r;
  const double denom = 1.0 + r * r;
  b.tight = 4.0 * r / (denom * denom);
  return b;
}

Lemma2Interval lemma2_interval(const SpectralProblem& problem, double alpha, int T,
                               double sigma_star_sq) {
  if (T < 1) throw ConfigError("lemma2_interval: need T >= 1");
  const Eigen::Index n = problem.lambda.size();
  if (n < 1) throw ConfigError("lemma2_interval: empty spectrum");
  const double x_min = alpha * problem.lambda[n - 1];
  if (!(alpha > 0.0) || alpha * problem.lambda[0] > 1.0 + 1e-12)
    throw ConfigError("lemma2_interval: step size out of range");
  const double q_n = 1.0 - std::min(1.0, std::max(0.0, x_min));
  Lemma2Interval out;
  out.lower = problem.targets_rot.squaredNorm();
  out.upper = geometric_sum(q_n * q_n, T) * out.lower;
  out.center = sigma_star_sq * problem.lambda.sum();
  return out;
}

double k_star_split(double c, double alpha, int T, int n) {
  const double horizon = 2.0 * T * alpha;
  if (!(horizon > 1.0))
    throw ConfigError("k_star_split: outside regime (2 T alpha <= 1)");
  const double half_n = n / 2.0;
  if (!(c > 0.0)) return half_n;
  return std::min(std::log(horizon) / (2.0 * c), half_n);
}

HeadTailBound lemma3_bound(int index, const Eigen::VectorXd& lambda, double c,
                           double alpha, int T, double sigma_w_sq,
                           double y_norm_sq) {
  const int n = static_cast<int>(lambda.size());
  require_index(index, n, "lemma3_bound");
  if (!(2.0 * T * alpha > 1.0)) return {1.0, 0.0, true};
  const double rho = rho_of_spectrum(lambda[0], lambda[n - 1]);
  const double k_star = k_star_split(c, alpha, T, n);
  const double floor_term = additive_floor(0.0, alpha, sigma_w_sq, y_norm_sq);
  HeadTailBound out;
  out.k_star = k_star;
  if (index <= 2.0 * k_star) {
    out.value = std::min(1.0, 4.0 * std::pow(rho, -(index - 1.0)) + floor_term);
  } else {
    const double raw = std::ceil(index - k_star + 1.0);
    const int j = std::clamp(static_cast<int>(raw), 1, n);
    out.value = 4.0 * std::pow(rho, -(k_star - 1.0)) +
                floor_term * std::min(1.0, 2.0 * alpha * T * lambda[j - 1]);
  }
  return out;
}

HeadTailBound sgd_head_bound(int index, const Eigen::VectorXd& lambda, double c,
                             double alpha, int T, double sigma_w_sq,
                             double y_norm_sq, int batch_size) {
  const int n = static_cast<int>(lambda.size());
  require_index(index, n, "sgd_head_bound");
  if (batch_size < 1) throw ConfigError("sgd_head_bound: batch size must be positive");
  if (!(2.0 * T * alpha > 1.0)) return {1.0, 0.0, true};
  const double k_star = k_star_split(c, alpha, T, n);
  if (index > 2.0 * k_star) throw ConfigError("head bound only covers i <= 2 k_star");
  const double rho = rho_of_spectrum(lambda[0], lambda[n - 1]);
  const double floor_term =
      additive_floor(alpha / batch_size, alpha, sigma_w_sq, y_norm_sq);
  return {std::min(1.0, 4.0 * std::pow(rho, -(index - 1.0)) + floor_term), k_star,
          false};
}

HeadTailBound weight_decay_head_bound(int index, const Eigen::VectorXd& lambda,
                                      double lambda_wd, double alpha, int T,
                                      double sigma_w_sq, double y_norm_sq) {
  const int n = static_cast<int>(lambda.size());
  require_index(index, n, "weight_decay_head_bound");
  if (!(lambda_wd >= 0.0))
    throw ConfigError("weight_decay_head_bound: shift must be nonnegative");
  if (!(2.0 * T * alpha > 1.0)) return {1.0, 0.0, true};
  const Eigen::VectorXd shifted = weight_decay_spectrum(lambda, lambda_wd);
  // The shifted spectrum is no longer geometric; its effective slope comes
  // from the same fit the kernel caps use.
  const double c_shifted = fit_spectrum(shifted).c_hat;
  const double k_star = k_star_split(c_shifted, alpha, T, n);
  if (index > 2.0 * k_star) throw ConfigError("head bound only covers i <= 2 k_star");
  const double rho = rho_of_spectrum(shifted[0], shifted[n - 1]);
  const double floor_term = additive_floor(lambda_wd, alpha, sigma_w_sq, y_norm_sq);
  return {std::min(1.0, 4.0 * std::pow(rho, -(index - 1.0)) + floor_term), k_star,
          false};
}

HeadTailBound kernel_ensemble_bound(int index, const std::vector<Gram>& grams,
                                    double alpha, int T, double sigma_w_sq,
                                    double y_norm_sq, double fit_floor) {
  if (grams.empty())
    throw ConfigError("kernel_ensemble_bound: need at least one kernel");
  const int m_count = static_cast<int>(grams.size());
  const int n = static_cast<int>(grams.front().lambda.size());
  require_index(index, n * m_count, "kernel_ensemble_bound");
  for (const Gram& g : grams) {
    if (g.lambda.size() != n)
      throw ConfigError("kernel_ensemble_bound: kernel sizes differ");
    if (std::abs(g.lambda[0] - 1.0) > 1e-8)
      throw ConfigError("kernel_ensemble_bound: kernels must be normalized");
  }
  if (!(y_norm_sq > 0.0)) throw ConfigError("bounds: targets have zero norm");
  if (!(2.0 * T * alpha > 1.0)) return {1.0, 0.0, true};

  std::vector<double> rho(m_count);
  double k_star = std::numeric_limits<double>::infinity();
  for (int m = 0; m < m_count; ++m) {
    const Eigen::VectorXd& lam = grams[m].lambda;
    // Rank-deficient Grams: the decay base uses the smallest positive
    // eigenvalue (clamped zeros carry no scale information).
    double lam_min = 0.0;
    for (int i = n - 1; i >= 0; --i)
      if (lam[i] > 0.0) {
        lam_min = lam[i];
        break;
      }
    rho[m] = rho_of_spectrum(lam[0], lam_min);
    const double c_m = fit_spectrum(lam, fit_floor).c_hat;
    if (c_m > 0.0)
      k_star = std::min(k_star, std::log(2.0 * T * alpha) / (2.0 * c_m));
  }
  if (!std::isfinite(k_star))
    throw NumericError("bound undefined: no kernel spectrum decays");

  const int fi = (index - 1) / m_count;
  HeadTailBound out;
  out.k_star = k_star;
  if (fi + 1 <= 2.0 * k_star) {
    double sum = 0.0;
    for (int m = 0; m < m_count; ++m) sum += std::pow(rho[m], -fi);
    out.value = std::min(1.0, 4.0 * sum / m_count +
                                  additive_floor(0.0, alpha, sigma_w_sq, y_norm_sq));
  } else {
    double head = 0.0;
    const int j = std::clamp(static_cast<int>(std::ceil(fi - k_star + 2.0)), 1, n);
    double lam_avg = 0.0;
    for (int m = 0; m < m_count; ++m) {
      head += 4.0 * std::pow(rho[m], -(k_star - 1.0));
      lam_avg += grams[m].lambda[j - 1];
    }
    head /= m_count;
    lam_avg /= m_count;
    out.value = head + (sigma_w_sq / (alpha * y_norm_sq)) *
                           std::min(1.0, 2.0 * alpha * T * lam_avg);
  }
  return out;
}

std::vector<BoundCheck> evaluate_dominance(const std::string& family,
                                           const Eigen::VectorXd& numeric,
                                           const Eigen::VectorXd& bounds) {
  if (numeric.size() != bounds.size())
    throw ConfigError("evaluate_dominance: size mismatch");
  BoundReport scratch;
  for (Eigen::Index i = 0; i < numeric.size(); ++i)
    add_upper(scratch, family, static_cast<int>(i) + 1, numeric[i], bounds[i]);
  return scratch.checks;
}

BoundReport verify_bounds(const BoundInputs& inputs) {
  const SpectralProblem& base = inputs.problem;
  const int n = base.n();
  if (n < 1) throw ConfigError("verify_bounds: empty problem");

  BoundReport rep;
  rep.config.n = n;
  rep.config.c = inputs.c;
  rep.config.alpha = inputs.alpha;
  rep.config.T = inputs.T;
  rep.config.sigma_w_sq = inputs.sigma_w_sq;
  rep.config.sigma_star_sq = inputs.sigma_star_sq;

  const auto* sgd = std::get_if<SgdMethod>(&inputs.method);
  const auto* wd = std::get_if<WeightDecayMethod>(&inputs.method);
  rep.config.method = sgd ? "sgd" : (wd ? "weight_decay" : "gd");
  if (sgd) rep.config.batch_size = sgd->batch_size;
  if (wd) rep.config.lambda_wd = wd->lambda_wd;

  // Operative spectrum: ridge shifts every eigenvalue.
  SpectralProblem op = base;
  if (wd) op.lambda = weight_decay_spectrum(op.lambda, wd->lambda_wd);

  PcaDecomposition dec =
      sgd ? sgd_analytic_pca(op, inputs.alpha, inputs.T, inputs.sigma_w_sq,
                             sgd->batch_size, sgd->noise_disabled)
          : analytic_pca(op, inputs.alpha, inputs.T, inputs.sigma_w_sq);

  rep.y_norm_sq = op.targets_rot.squaredNorm();
  rep.rho = rho_of_spectrum(op.lambda[0], op.lambda[n - 1]);
  const bool in_regime = 2.0 * inputs.T * inputs.alpha > 1.0;
  if (!in_regime)
    rep.warnings.push_back(
        "outside contraction-horizon regime (2 T alpha <= 1): ratio caps degrade to 1");

  double c_for_split = inputs.c;
  if (wd) c_for_split = fit_spectrum(op.lambda).c_hat;
  rep.k_star = in_regime
                   ? k_star_split(c_for_split, inputs.alpha, inputs.T, n)
                   : std::numeric_limits<double>::quiet_NaN();

  // Initialization part: exact closed form against its cap.
  for (int i = 1; i <= n; ++i)
    add_upper(rep, "eq9", i, dec.lambda_sigma_w[i - 1],
              sigma_w_bound(i, inputs.alpha, inputs.T, inputs.sigma_w_sq,
                            op.lambda[i - 1]));

  // Target-part decay caps.
  if (dec.lambda_y[0] > 0.0) {
    for (int j = 1; j <= n; ++j) {
      const Lemma1Bound b = lemma1_ratio_bound(rep.rho, j);
      const double ratio = dec.lambda_y[j - 1] / dec.lambda_y[0];
      add_upper(rep, "lemma1_tight", j, ratio, b.tight);
      add_upper(rep, "lemma1_loose", j, ratio, b.loose);
    }
  } else {
    rep.warnings.push_back("target part degenerate: decay caps skipped");
  }

  // Leading target eigenvalue interval.
  rep.lemma2 = lemma2_interval(op, inputs.alpha, inputs.T, inputs.sigma_star_sq);
  add_lower(rep, "lemma2_lower", 1, dec.lambda_y[0], rep.lemma2.lower);
  add_upper(rep, "lemma2_upper", 1, dec.lambda_y[0], rep.lemma2.upper);

  // Eigenvalue sandwich around the mean-corrected spectrum.
  const double weyl_tol = 1e-9 * dec.lambda_P1[0];
  for (int i = 1; i <= n; ++i) {
    add_upper(rep, "weyl_upper", i, dec.lambda_P[i - 1], dec.lambda_P1[i - 1],
              weyl_tol);
    const double drop = dec.lambda_P1[i - 1] - dec.lambda_P2;
    const double floor_value =
        i < n ? std::max(dec.lambda_P1[i], drop) : std::max(0.0, drop);
    add_lower(rep, "weyl_lower", i, dec.lambda_P[i - 1], floor_value, weyl_tol);
  }

  // Mean-correction magnitude.
  const double lam_min = op.lambda[n - 1];
  const double eq8_bound =
      lam_min > 0.0
          ? rep.y_norm_sq / std::pow(inputs.alpha * inputs.T * lam_min, 2)
          : std::numeric_limits<double>::infinity();
  add_upper(rep, "eq8", 0, dec.lambda_P2, eq8_bound);

  const double p1_top = dec.lambda_P1[0];
  if (!sgd && !wd) {
    for (int i = 1; i <= n; ++i) {
      const HeadTailBound b =
          lemma3_bound(i, op.lambda, inputs.c, inputs.alpha, inputs.T,
                       inputs.sigma_w_sq, rep.y_norm_sq);
      add_upper(rep, "lemma3", i, dec.lambda_P1[i - 1] / p1_top, b.value);
    }
  }
  if (sgd && in_regime) {
    const int head = static_cast<int>(std::floor(2.0 * rep.k_star));
    for (int i = 1; i <= std::min(head, n); ++i) {
      const HeadTailBound b =
          sgd_head_bound(i, op.lambda, inputs.c, inputs.alpha, inputs.T,
                         inputs.sigma_w_sq, rep.y_norm_sq, sgd->batch_size);
      add_upper(rep, "sgd_head", i, dec.lambda_P1[i - 1] / p1_top, b.value);
    }
  }
  if (wd && in_regime) {
    const int head = static_cast<int>(std::floor(2.0 * rep.k_star));
    for (int i = 1; i <= std::min(head, n); ++i) {
      const HeadTailBound b = weight_decay_head_bound(
          i, base.lambda, wd->lambda_wd, inputs.alpha, inputs.T,
          inputs.sigma_w_sq, rep.y_norm_sq);
      add_upper(rep, "wd_head", i, dec.lambda_P1[i - 1] / p1_top, b.value);
    }
  }
  return rep;
}

BoundReport verify_bounds(const Dataset& dataset, const TrainConfig& config) {
  BoundInputs in;
  in.problem = spectral_problem(dataset);
  in.c = dataset.spec.c;
  in.alpha = config.alpha;
  in.T = config.T;
  in.sigma_w_sq = dataset.spec.sigma_w_sq;
  in.sigma_star_sq = dataset.spec.sigma_star_sq;
  in.method = config.method;
  return verify_bounds(in);
}

namespace {

struct SweepDraw {
  int n = 0;
  double c = 0.0;
  int T = 2;
  double alpha = 1.0;
  double sigma_w_sq = 1.0;
  int batch_size = 1;
  double lambda_wd = 1e-2;
};

SweepDraw draw_config(rng::Stream& stream) {
  SweepDraw d;
  d.n = 10 + static_cast<int>(stream.next_unit() * 71.0);
  d.n = std::clamp(d.n, 10, 80);
  const double c_min = std::max(0.05, 1.02 / d.n);
  d.c = c_min + stream.next_unit() * (1.0 - c_min);
  const double log_t = std::log(2.0) +
                       stream.next_unit() * (std::log(1e4) - std::log(2.0));
  d.T = std::clamp(static_cast<int>(std::lround(std::exp(log_t))), 2, 10000);
  d.alpha = std::exp(stream.next_unit() * std::log(1e-3));
  d.sigma_w_sq = std::exp((2.0 * stream.next_unit() - 1.0) * std::log(100.0));
  const double b = stream.next_unit();
  d.batch_size = b < 1.0 / 3 ? 1 : (b < 2.0 / 3 ? 8 : 64);
  d.lambda_wd = std::exp(std::log(1e-3) + stream.next_unit() * std::log(100.0));
  return d;
}

}  // namespace

DominanceSweep dominance_sweep(std::uint64_t seed, int count, bool include_kernels,
                               int threads, bool keep_reports) {
  if (count < 1) throw ConfigError("dominance_sweep: need at least one config");
  DominanceSweep out;
  out.count = count;

  struct Cell {
    std::vector<std::string> violations;
    std::vector<BoundReport> reports;
    long long checks = 0;
    int kernels = 0;
  };
  std::vector<Cell> cells(count);

  parallel_for(count, threads, [&](int k) {
    Cell& cell = cells[k];
    rng::Stream stream(seed, rng::Purpose::kSweepConfig,
                       static_cast<std::uint64_t>(k));
    const SweepDraw d = draw_config(stream);
    const std::uint64_t cfg_seed =
        rng::derive_key(seed, rng::Purpose::kSweepConfig, 1000003ULL + k);

    BoundInputs in;
    in.problem = synthesize_spectral(d.n, d.c, 1.0, cfg_seed, 0);
    in.c = d.c;
    in.alpha = d.alpha;
    in.T = d.T;
    in.sigma_w_sq = d.sigma_w_sq;
    in.sigma_star_sq = 1.0;

    auto absorb = [&](BoundReport rep) {
      cell.checks += static_cast<long long>(rep.checks.size());
      for (const auto& v : rep.violations)
        cell.violations.push_back("config " + std::to_string(k) + " " +
                                  rep.config.method + ": " + v);
      if (keep_reports) cell.reports.push_back(std::move(rep));
    };
    in.method = GdMethod{};
    absorb(verify_bounds(in));
    in.method = SgdMethod{d.batch_size, false};
    absorb(verify_bounds(in));
    in.method = WeightDecayMethod{d.lambda_wd};
    absorb(verify_bounds(in));

    if (include_kernels) {
      DatasetSpec spec;
      spec.n = d.n;
      spec.d = d.n + 21;
      spec.c = d.c;
      spec.sigma_star_sq = 1.0;
      spec.sigma_w_sq = d.sigma_w_sq;
      spec.seed = cfg_seed;
      const Dataset ds = synthesize_dataset(spec);
      const double base = std::exp((2.0 * stream.next_unit() - 1.0) * 0.5);
      std::vector<Gram> grams;
      for (double mult : {0.5, 1.0, 2.0}) {
        KernelSpec ks;
        ks.kind = RbfKernel{base * mult};
        ks.normalize = true;
        grams.push_back(build_gram(ds.inputs, ks));
      }
      const PcaDecomposition multi =
          multi_kernel_pca(grams, ds.targets, d.alpha, d.T, d.sigma_w_sq);
      const double y2 = ds.targets.squaredNorm();
      BoundReport krep;
      const double top = multi.lambda_P1[0];
      for (int i = 1; i <= d.n; ++i) {
        const HeadTailBound b = kernel_ensemble_bound(i, grams, d.alpha, d.T,
                                                      d.sigma_w_sq, y2);
        add_upper(krep, "eq12", i, multi.lambda_P1[i - 1] / top, b.value);
      }
      cell.checks += static_cast<long long>(krep.checks.size());
      cell.kernels = 1;
      for (const auto& v : krep.violations)
        cell.violations.push_back("config " + std::to_string(k) + " kernel: " + v);
      if (keep_reports) cell.reports.push_back(std::move(krep));
    }
  });

  for (auto& cell : cells) {
    out.total_checks += cell.checks;
    out.kernel_count += cell.kernels;
    for (auto& v : cell.violations) out.violations.push_back(std::move(v));
    for (auto& r : cell.reports) out.reports.push_back(std::move(r));
  }
  return out;
}

}  // namespace hrb
