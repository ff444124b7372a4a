#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "hrb/dataset.hpp"
#include "hrb/dynamics.hpp"

namespace hrb {

/// Closed-form cap on the i-th initialization eigenvalue:
/// (sigma_w_sq / alpha) * min(1, 2 T alpha lambda_i) / (2 - alpha lambda_i).
double sigma_w_bound(int index, double alpha, int T, double sigma_w_sq,
                     double lambda_i);

/// Decay base rho = exp(pi^2 / (2 ln(8 lambda_max / lambda_min - 4))).
/// Requires lambda_max > lambda_min > 0; throws NumericError("bound
/// undefined") on a flat or nonpositive spectrum.
double rho_of_spectrum(double lambda_max, double lambda_min);

/// Target-part ratio cap at 1-based index j, via the even exponent
/// 2 * floor((j - 1) / 2) (an even index inherits the cap of its
/// predecessor). tight = 4 r / (1 + r^2)^2 with r = rho^{-e}; loose = 4 r.
struct Lemma1Bound {
  double tight = 0.0;
  double loose = 0.0;
};
Lemma1Bound lemma1_ratio_bound(double rho, int index);

/// Range of the leading target eigenvalue: ||y||^2 <= lambda_1^y <=
/// lambda_tilde_n ||y||^2 where lambda_tilde_n sums the slowest squared
/// contraction factors. center is the concentration point sigma_star_sq tr K.
struct Lemma2Interval {
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
};
Lemma2Interval lemma2_interval(const SpectralProblem& problem, double alpha, int T,
                               double sigma_star_sq);

/// Split index min(ln(2 T alpha) / (2 c), n / 2). Requires 2 T alpha > 1.
double k_star_split(double c, double alpha, int T, int n);

/// A head/tail ratio cap. outside_regime marks 2 T alpha <= 1, where the
/// statement degrades to the trivial cap 1.
struct HeadTailBound {
  double value = 1.0;
  double k_star = 0.0;
  bool outside_regime = false;
};

/// Full-spectrum cap on lambda_i^{P1} / lambda_1^{P1} for plain contraction
/// dynamics. Head (i <= 2 k*): min(1, 4 rho^{-(i-1)} + sigma_w_sq /
/// (alpha ||y||^2)). Tail: 4 rho^{-(k*-1)} plus the spectral term at index
/// ceil(i - k* + 1) clamped into [1, n].
HeadTailBound lemma3_bound(int index, const Eigen::VectorXd& lambda, double c,
                           double alpha, int T, double sigma_w_sq, double y_norm_sq);

/// Minibatch head cap: the noise floor alpha / batch joins the
/// initialization term. Only defined for i <= 2 k*; larger indices throw
/// ConfigError("head bound only").
HeadTailBound sgd_head_bound(int index, const Eigen::VectorXd& lambda, double c,
                             double alpha, int T, double sigma_w_sq,
                             double y_norm_sq, int batch_size);

/// Ridge head cap under the shifted spectrum lambda + lambda_wd: rho comes
/// from the shifted edge eigenvalues, the additive term is
/// (sigma_w_sq / alpha + lambda_wd) / ||y||^2, and k* uses the fitted slope
/// of the shifted spectrum. Head only, like sgd_head_bound.
HeadTailBound weight_decay_head_bound(int index, const Eigen::VectorXd& lambda,
                                      double lambda_wd, double alpha, int T,
                                      double sigma_w_sq, double y_norm_sq);

/// Cap for the kernel-averaged spectrum with per-kernel decay bases and
/// floor((i - 1) / M) indexing; k* = min_m ln(2 T alpha) / (2 c_m) with
/// slopes fitted from each Gram spectrum.
HeadTailBound kernel_ensemble_bound(int index, const std::vector<Gram>& grams,
                                    double alpha, int T, double sigma_w_sq,
                                    double y_norm_sq, double fit_floor = 1e-12);

struct BoundCheck {
  std::string family;
  int index = 0;       // 1-based eigen-index; 0 for scalar checks
  double numeric = 0.0;
  double bound = 0.0;  // for lower-type checks, the floor
  double slack = 0.0;  // signed margin, negative = violated beyond tolerance
  bool satisfied = true;
};

struct BoundConfigSummary {
  int n = 0;
  double c = 0.0;
  double alpha = 1.0;
  int T = 1;
  double sigma_w_sq = 1.0;
  double sigma_star_sq = 1.0;
  std::string method = "gd";
  int batch_size = 0;
  double lambda_wd = 0.0;
};

struct BoundReport {
  BoundConfigSummary config;
  double rho = 0.0;
  double k_star = 0.0;
  double y_norm_sq = 0.0;
  Lemma2Interval lemma2;
  std::vector<BoundCheck> checks;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool all_satisfied() const { return violations.empty(); }
};

struct BoundInputs {
  SpectralProblem problem;   // unshifted spectrum; ridge shift applied internally
  double c = 0.0;            // decay slope of problem.lambda
  double alpha = 1.0;
  int T = 1;
  double sigma_w_sq = 1.0;
  double sigma_star_sq = 1.0;
  TrainMethod method = GdMethod{};
};

/// Evaluates every applicable bound family against the analytic spectra and
/// records per-index outcomes. Dominance uses relative slack 1e-9; the
/// eigenvalue sandwich uses absolute slack 1e-9 * lambda_1^{P1}.
BoundReport verify_bounds(const BoundInputs& inputs);
BoundReport verify_bounds(const Dataset& dataset, const TrainConfig& config);

/// Raw dominance evaluation (numeric_i <= bound_i within relative slack).
/// Exists so corrupted fixtures can exercise the violation path directly.
std::vector<BoundCheck> evaluate_dominance(const std::string& family,
                                           const Eigen::VectorXd& numeric,
                                           const Eigen::VectorXd& bounds);

/// Randomized dominance audit across the documented parameter ranges.
struct DominanceSweep {
  int count = 0;
  int kernel_count = 0;
  long long total_checks = 0;
  std::vector<std::string> violations;
  std::vector<BoundReport> reports;  // kept only when requested
};
DominanceSweep dominance_sweep(std::uint64_t seed, int count, bool include_kernels,
                               int threads = 1, bool keep_reports = false);

}  // namespace hrb
