#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noisereg/datagen.hpp"
#include "noisereg/risk.hpp"

namespace noisereg {

/// Configuration of one sweep over d (sequence I) or n (sequence II).
struct SweepConfig {
  ModelConfig model;
  Sequence sequence = Sequence::I;
  std::vector<Eigen::Index> grid;
  long trials = 100;
  long test_points = 0;       // > 0 enables the bias-variance columns
  // Ratio targets for the rate traces.  The ridge-approximation rates are
  // two-sided only along proportional sequences: d0 = delta*d (sequence I)
  // and n0 = nu*n (sequence II).  Zero keeps the model's fixed d0/n0, where
  // the distances decay even faster than the stated bounds.
  double delta = 0.0;
  double nu = 0.0;
  double trace_lambda = 0.1;  // ridge parameter lambda in the double-shrinkage trace
  Eigen::Index max_true_terms = 60;
  Eigen::Index max_noise_terms = 9;

  void validate() const;
};

struct CurvePoint {
  Eigen::Index index = 0;
  double train_rmse = 0.0;
  double test_risk_mean = 0.0;
  double test_risk_se = 0.0;
  double test_rmse_mean = 0.0;
  double analytic_risk = std::numeric_limits<double>::quiet_NaN();
  double analytic_rmse = std::numeric_limits<double>::quiet_NaN();
  double bias2 = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();
  double cond_mean = std::numeric_limits<double>::quiet_NaN();
};

/// A full sweep: aggregate points plus the per-trial conditional risks
/// (the light curves of the figures).
struct ErrorCurve {
  Sequence sequence = Sequence::I;
  std::vector<CurvePoint> points;
  std::vector<std::vector<double>> trial_risks; // [grid point][trial]
  long trials = 0;
  std::uint64_t seed = 0;
};

struct CoefSummary {
  Eigen::Index index = 0;   // d or n
  std::string term;         // "intercept", "x<j>", or "z<k>"
  double true_value = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
};

struct LambdaSearchResult {
  std::vector<double> lambda_grid;
  std::vector<double> mean_risk;   // NaN where not admissible in every trial
  std::vector<long> counts;        // trials admitting each lambda
  double lambda_opt = 0.0;         // argmin of the mean risk, golden-refined
  double mean_trial_opt = 0.0;     // mean of per-trial optimal lambdas
  double admissible_min = 0.0;     // most negative admissible grid lambda
  long trials = 0;
};

struct HeatmapResult {
  std::vector<Eigen::Index> n0_grid;
  std::vector<Eigen::Index> noise_grid; // n - n0
  Eigen::MatrixXd mean_lambda_raw;      // n0_grid.size() x noise_grid.size()
  Eigen::MatrixXd mean_lambda_norm;     // raw / n
  Eigen::MatrixXd formula_raw;          // d0 sigma2 / |beta0|^2 - (n - n0)
  long trials = 0;
};

struct ShrinkagePoint {
  Eigen::Index index = 0;
  // Sequence I
  double true_block_norm = std::numeric_limits<double>::quiet_NaN();
  double noise_block_norm = std::numeric_limits<double>::quiet_NaN();
  double ridge_distance = std::numeric_limits<double>::quiet_NaN();
  // Sequence II
  double coef_norm = std::numeric_limits<double>::quiet_NaN();
  double double_shrunk_distance = std::numeric_limits<double>::quiet_NaN();
};

/// Sweep along sequence I: per grid point, train RMSE, conditional risks per
/// trial, Monte Carlo mean risk, the Theorem-1 analytic curve, optional
/// bias-variance columns, and the mean condition number.
ErrorCurve run_seq1_sweep(const SweepConfig& cfg);

/// Sweep along sequence II (Theorem-2 closed forms where they exist).
ErrorCurve run_seq2_sweep(const SweepConfig& cfg);

/// Boxplot-style summaries of the estimated coefficients at chosen indices.
std::vector<CoefSummary> coef_distribution(const SweepConfig& cfg,
                                           const std::vector<Eigen::Index>& indices);

/// Default signed-lambda grid bracketing the double-shrinkage optimum.
std::vector<double> make_lambda_grid(const ModelConfig& model, Eigen::Index n,
                                     int points = 201);

/// Grid search for the risk-minimizing ridge parameter on sequence-II
/// augmented data at sample size n.
LambdaSearchResult lambda_search(const SweepConfig& cfg, Eigen::Index n,
                                 const std::vector<double>& lambda_grid);

/// Mean per-trial optimal ridge parameter as a function of n0 and n - n0.
HeatmapResult ridge_heatmap(const ModelConfig& model,
                            const std::vector<Eigen::Index>& n0_grid,
                            const std::vector<Eigen::Index>& noise_grid,
                            long trials);

/// Coefficient norms and ridge-approximation distances along a sweep.
std::vector<ShrinkagePoint> shrinkage_trace(const SweepConfig& cfg);

/// Mean generalized condition number of the design along a sweep.
std::vector<std::pair<Eigen::Index, double>> condition_sweep(const SweepConfig& cfg);

/// Checks the double-descent certificate on a curve: the risk at the
/// interpolation index exceeds both the first grid point and the asymptote,
/// and a strictly lower interior minimum exists beyond interpolation.
bool double_descent_certificate(const ErrorCurve& curve, Eigen::Index interp_index,
                                double asymptote_value, std::string* why = nullptr);

} // namespace noisereg
