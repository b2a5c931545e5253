#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "noisereg/datagen.hpp"
#include "noisereg/estimators.hpp"

namespace noisereg {

enum class RiskKind { analytic, monte_carlo };

/// An extended-real test error: a finite value >= sigma2 or +infinity.
struct RiskValue {
  double value = 0.0;
  RiskKind kind = RiskKind::analytic;
  double std_error = 0.0;
  long trials = 0;

  bool is_infinite() const { return std::isinf(value); }

  static RiskValue analytic(double v) { return {v, RiskKind::analytic, 0.0, 0}; }
  static RiskValue infinite() {
    return {std::numeric_limits<double>::infinity(), RiskKind::analytic, 0.0, 0};
  }
  static RiskValue monte_carlo(double v, double se, long trials) {
    return {v, RiskKind::monte_carlo, se, trials};
  }
};

/// One point of a bias-variance decomposition over a fixed test sample.
struct BiasVarPoint {
  Eigen::Index index = 0;
  double bias2 = 0.0;
  double variance = 0.0;
  double noise_floor = 0.0; // sigma2
};

/// Exact conditional test error of an estimate under the model, computed
/// from standard-normal test moments:
///   sigma2 + |beta0_included - true_block|^2 + |beta0_omitted|^2
///          + |noise_block|^2 + intercept^2.
RiskValue conditional_risk(const CoefEstimate& est, const ModelConfig& cfg);
double conditional_risk_value(const CoefEstimate& est, const ModelConfig& cfg);

/// Closed-form unconditional risk along sequence I; +infinity at the three
/// singular indices around n0.
RiskValue analytic_risk_seq1(Eigen::Index d, const ModelConfig& cfg);

/// Closed-form unconditional risk along sequence II where available;
/// nullopt in the expectation-form regimes (delegate to mc_risk).
/// Indices in {d0-1, d0, d0+1} report +infinity.
std::optional<RiskValue> analytic_risk_seq2(Eigen::Index n, const ModelConfig& cfg);

/// Monte Carlo unconditional risk: the mean conditional risk over fresh
/// seeded trials, with its standard error.
RiskValue mc_risk(Sequence sequence, Eigen::Index index, const ModelConfig& cfg,
                  long trials);

/// Monte Carlo estimates of the two components of the sequence-I risk for
/// d > max(n0, d0): the part due to the true-predictor coefficients and the
/// part due to the noise-predictor coefficients.
std::pair<RiskValue, RiskValue> risk_decomposition_seq1(Eigen::Index d,
                                                        const ModelConfig& cfg,
                                                        long trials);

/// The common two-sided limit of the test error: sigma2 + |beta0|^2.
double asymptote(const ModelConfig& cfg);

/// Bias-variance decomposition over a fixed seeded test sample: bias2 is the
/// squared deviation of the across-trial mean prediction from the true mean,
/// variance the across-trial predictive variance, both averaged over points.
BiasVarPoint bias_variance(Sequence sequence, Eigen::Index index,
                           const ModelConfig& cfg, long trials, long test_points);

/// Generalized condition number: ratio of the largest to the smallest
/// nonzero singular value (relative truncation rule as the solvers).
double condition_number(const Eigen::MatrixXd& design);

/// Build the design for one trial of a sequence (shared by the Monte Carlo
/// routines and the sweep drivers).
DesignState trial_design(Sequence sequence, Eigen::Index index,
                         const ModelConfig& cfg, long trial);

} // namespace noisereg
