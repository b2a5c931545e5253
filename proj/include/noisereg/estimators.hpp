#pragma once

#include <limits>

#include <Eigen/Dense>

#include "noisereg/datagen.hpp"

namespace noisereg {

enum class FitMethod { ols, min_norm, ridge, partitioned_min_norm };

/// A fitted coefficient vector.  `coef` holds the slope coefficients only;
/// a fitted intercept, when present, is kept separately so the block
/// structure of the slopes is preserved.
struct CoefEstimate {
  Eigen::VectorXd coef;
  Eigen::Index true_block_len = 0; // first min(d, d0) entries
  double intercept = 0.0;
  bool has_intercept = false;
  FitMethod method = FitMethod::min_norm;
  bool rank_deficient = false;
  double smallest_kept_singular_value = std::numeric_limits<double>::quiet_NaN();

  auto true_block() const { return coef.head(true_block_len); }
  auto noise_block() const { return coef.tail(coef.size() - true_block_len); }
};

/// Relative singular-value truncation threshold used by every SVD-based
/// solve in this module: max(n, d) * machine epsilon.
double rank_rtol(Eigen::Index rows, Eigen::Index cols);

/// Ordinary least squares via SVD.  Requires d <= n.  Throws
/// singular_design_error when the Gram condition number exceeds 1/rtol.
CoefEstimate ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

/// Minimum-norm least squares via truncated SVD; defined for any shape.
/// Sets rank_deficient when singular values were truncated.
CoefEstimate min_norm_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

/// Ridge with a signed penalty: (X'X + lambda I)^{-1} X'y.  Throws
/// indefinite_ridge_error when the penalized Gram is not positive definite;
/// the error carries the smallest admissible lambda.
CoefEstimate ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                   double lambda);

/// Minimum-norm solve through the partitioned-inverse form for a stacked
/// design [X; W] with responses (y; 0).  Requires rows(X)+rows(W) < cols.
CoefEstimate partitioned_min_norm(const Eigen::MatrixXd& X_block,
                                  const Eigen::MatrixXd& W_block,
                                  const Eigen::VectorXd& response);

/// Regime dispatch for sequence I: OLS while the parameter count is below
/// n0, minimum-norm OLS from the interpolation point on.
CoefEstimate seq1_estimate(const DesignState& state);

/// Regime dispatch for sequence II: minimum-norm OLS (partitioned form when
/// noise rows are present) while n < d0, OLS on the stacked design after.
CoefEstimate seq2_estimate(const DesignState& state);

/// Root mean squared residual of an estimate on its training data.
double train_rmse(const DesignState& state, const CoefEstimate& est);

} // namespace noisereg
