#include "noisereg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "noisereg/errors.hpp"

namespace noisereg {

double rank_rtol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

namespace {

struct SvdSolve {
  Eigen::VectorXd coef;
  Eigen::Index rank = 0;
  bool truncated = false;
  double smallest_kept = std::numeric_limits<double>::quiet_NaN();
  double sigma_max = 0.0;
  double sigma_min = 0.0; // smallest computed singular value, kept or not
};

// Truncated-SVD least squares: the minimum-norm solution with singular
// values below rtol * sigma_max treated as zero.
SvdSolve svd_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  SvdSolve out;
  if (A.cols() == 0) {
    out.coef = Eigen::VectorXd();
    return out;
  }
  if (b.size() != A.rows())
    throw numerical_error("least squares: response length does not match design rows");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  out.sigma_min = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  const double cutoff = rank_rtol(A.rows(), A.cols()) * out.sigma_max;

  Eigen::VectorXd uty = svd.matrixU().transpose() * b;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      uty(i) /= sv(i);
      ++rank;
    } else {
      uty(i) = 0.0;
    }
  }
  out.rank = rank;
  out.truncated = rank < std::min(A.rows(), A.cols());
  if (rank > 0) out.smallest_kept = sv(rank - 1);
  out.coef = svd.matrixV() * uty;
  return out;
}

// Prepend a ones column when the working model has an intercept.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& design) {
  Eigen::MatrixXd full(design.rows(), design.cols() + 1);
  full.col(0).setOnes();
  full.rightCols(design.cols()) = design;
  return full;
}

CoefEstimate from_solve(SvdSolve&& s, FitMethod method, bool has_intercept) {
  CoefEstimate est;
  est.method = method;
  est.rank_deficient = s.truncated;
  est.smallest_kept_singular_value = s.smallest_kept;
  est.has_intercept = has_intercept;
  if (has_intercept) {
    est.intercept = s.coef(0);
    est.coef = s.coef.tail(s.coef.size() - 1);
  } else {
    est.coef = std::move(s.coef);
  }
  est.true_block_len = est.coef.size();
  return est;
}

// SVD fit used by the sequence dispatchers: never throws on a singular
// design; truncation is recorded in the flag instead.
CoefEstimate dispatch_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                          FitMethod method, bool has_intercept) {
  const Eigen::MatrixXd& work = has_intercept ? with_intercept(design) : design;
  return from_solve(svd_least_squares(work, response), method, has_intercept);
}

} // namespace

CoefEstimate ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  if (design.cols() > design.rows())
    throw numerical_error("ols: requires at least as many rows as columns");
  SvdSolve s = svd_least_squares(design, response);
  if (design.cols() > 0) {
    const double rtol = rank_rtol(design.rows(), design.cols());
    const double gram_cond =
        s.sigma_min > 0.0 ? (s.sigma_max / s.sigma_min) * (s.sigma_max / s.sigma_min)
                          : std::numeric_limits<double>::infinity();
    if (gram_cond > 1.0 / rtol)
      throw singular_design_error(
          "ols: Gram matrix numerically singular (smallest singular value " +
              std::to_string(s.sigma_min) + ")",
          s.sigma_min);
  }
  return from_solve(std::move(s), FitMethod::ols, false);
}

CoefEstimate min_norm_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  return from_solve(svd_least_squares(design, response), FitMethod::min_norm, false);
}

CoefEstimate ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                   double lambda) {
  const Eigen::Index d = design.cols();
  CoefEstimate est;
  est.method = FitMethod::ridge;
  if (d == 0) {
    est.coef = Eigen::VectorXd();
    return est;
  }
  if (response.size() != design.rows())
    throw numerical_error("ridge: response length does not match design rows");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double gamma1_sq = sv(0) * sv(0);
  const double eps_pd = 1e-10 * gamma1_sq;
  // Smallest eigenvalue of the Gram matrix: the null space contributes
  // exact zeros whenever d exceeds the row count.
  const double min_eig =
      d > design.rows() ? 0.0 : sv(sv.size() - 1) * sv(sv.size() - 1);
  if (min_eig + lambda <= eps_pd)
    throw indefinite_ridge_error(
        "ridge: penalized Gram not positive definite; lambda must exceed " +
            std::to_string(eps_pd - min_eig),
        eps_pd - min_eig);

  // The solution lives in the row space: V diag(s/(s^2+lambda)) U'y.
  Eigen::VectorXd uty = svd.matrixU().transpose() * response;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    uty(i) *= sv(i) / (sv(i) * sv(i) + lambda);
  est.coef = svd.matrixV() * uty;
  est.true_block_len = est.coef.size();
  est.smallest_kept_singular_value = sv(sv.size() - 1);
  return est;
}

CoefEstimate partitioned_min_norm(const Eigen::MatrixXd& X_block,
                                  const Eigen::MatrixXd& W_block,
                                  const Eigen::VectorXd& response) {
  const Eigen::Index d0 = X_block.cols();
  const Eigen::Index n0 = X_block.rows();
  const Eigen::Index m = W_block.rows();
  if (W_block.cols() != 0 && W_block.cols() != d0)
    throw numerical_error("partitioned_min_norm: block widths differ");
  if (n0 + m >= d0 && m > 0)
    throw numerical_error("partitioned_min_norm: requires n < d0");
  if (response.size() != n0)
    throw numerical_error("partitioned_min_norm: response must have n0 entries");

  CoefEstimate est;
  est.method = FitMethod::partitioned_min_norm;
  est.true_block_len = d0;

  if (m == 0) {
    // Degenerate partition: plain minimum-norm OLS on X.
    const Eigen::MatrixXd xxt = X_block * X_block.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xxt);
    const Eigen::VectorXd a = ldlt.solve(response);
    if ((xxt * a - response).norm() > 1e-8 * std::max(1.0, response.norm()))
      throw singular_partition_error("partitioned_min_norm: singular X Gram");
    est.coef = X_block.transpose() * a;
    return est;
  }

  const Eigen::MatrixXd wwt = W_block * W_block.transpose();
  Eigen::LDLT<Eigen::MatrixXd> wwt_ldlt(wwt);
  const Eigen::MatrixXd wxt = W_block * X_block.transpose(); // m x n0
  const Eigen::MatrixXd wwt_inv_wxt = wwt_ldlt.solve(wxt);
  if ((wwt * wwt_inv_wxt - wxt).norm() > 1e-8 * std::max(1.0, wxt.norm()))
    throw singular_partition_error("partitioned_min_norm: singular W Gram");

  // Schur complement of WW' in the stacked row Gram.
  const Eigen::MatrixXd schur =
      X_block * X_block.transpose() - wxt.transpose() * wwt_inv_wxt;
  Eigen::LDLT<Eigen::MatrixXd> schur_ldlt(schur);
  const Eigen::VectorXd a11_y = schur_ldlt.solve(response);
  if ((schur * a11_y - response).norm() > 1e-8 * std::max(1.0, response.norm()))
    throw singular_partition_error("partitioned_min_norm: singular Schur complement");

  const Eigen::VectorXd a21_y = -wwt_inv_wxt * a11_y;
  est.coef = X_block.transpose() * a11_y + W_block.transpose() * a21_y;
  return est;
}

CoefEstimate seq1_estimate(const DesignState& state) {
  if (state.sequence != Sequence::I)
    throw numerical_error("seq1_estimate: state is not a sequence-I design");
  const Eigen::Index params = state.design.cols() + (state.has_intercept ? 1 : 0);
  CoefEstimate est;
  if (params == 0) {
    est.method = FitMethod::min_norm; // null model
    est.coef = Eigen::VectorXd();
  } else if (params < state.design.rows()) {
    est = dispatch_fit(state.design, state.response, FitMethod::ols, state.has_intercept);
  } else {
    est = dispatch_fit(state.design, state.response, FitMethod::min_norm, state.has_intercept);
  }
  est.true_block_len = state.design.cols() - state.noise_cols;
  return est;
}

CoefEstimate seq2_estimate(const DesignState& state) {
  if (state.sequence != Sequence::II)
    throw numerical_error("seq2_estimate: state is not a sequence-II design");
  const Eigen::Index d0 = state.design.cols();
  const Eigen::Index n = state.design.rows();
  CoefEstimate est;
  if (n < d0) {
    // The partitioned form assumes zero noise responses and no intercept.
    const bool zero_tail =
        state.noise_rows == 0 ||
        state.response.tail(state.noise_rows).cwiseAbs().maxCoeff() == 0.0;
    if (state.noise_rows > 0 && !state.has_intercept && zero_tail) {
      const Eigen::Index n0 = n - state.noise_rows;
      est = partitioned_min_norm(state.design.topRows(n0),
                                 state.design.bottomRows(state.noise_rows),
                                 state.response.head(n0));
    } else {
      est = dispatch_fit(state.design, state.response, FitMethod::min_norm,
                         state.has_intercept);
    }
  } else {
    est = dispatch_fit(state.design, state.response, FitMethod::ols, state.has_intercept);
  }
  est.true_block_len = d0;
  return est;
}

double train_rmse(const DesignState& state, const CoefEstimate& est) {
  Eigen::VectorXd fitted = state.design * est.coef;
  if (est.has_intercept) fitted.array() += est.intercept;
  const Eigen::Index n = state.response.size();
  return (state.response - fitted).norm() / std::sqrt(static_cast<double>(n));
}

} // namespace noisereg
