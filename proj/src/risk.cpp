#include "noisereg/risk.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "noisereg/errors.hpp"
#include "noisereg/numerics.hpp"

namespace noisereg {

double conditional_risk_value(const CoefEstimate& est, const ModelConfig& cfg) {
  const Eigen::Index p = est.true_block_len;
  if (p > cfg.d0)
    throw numerical_error("conditional_risk: true block longer than beta0");
  if (est.coef.size() < p)
    throw numerical_error("conditional_risk: estimate shorter than its true block");
  double risk = cfg.sigma2;
  risk += (cfg.beta0.head(p) - est.true_block()).squaredNorm();
  risk += cfg.beta0.tail(cfg.d0 - p).squaredNorm(); // omitted coefficients
  risk += est.noise_block().squaredNorm();
  risk += est.intercept * est.intercept; // true intercept is zero
  return risk;
}

RiskValue conditional_risk(const CoefEstimate& est, const ModelConfig& cfg) {
  return RiskValue::analytic(conditional_risk_value(est, cfg));
}

double asymptote(const ModelConfig& cfg) { return cfg.sigma2 + cfg.beta0_norm2(); }

RiskValue analytic_risk_seq1(Eigen::Index d, const ModelConfig& cfg) {
  if (d < 0) throw config_error("analytic_risk_seq1: d must be >= 0");
  const Eigen::Index n0 = cfg.n0;
  // Norm of the omitted coefficients (zero once all of beta0 is included).
  const double omitted2 =
      d >= cfg.d0 ? 0.0 : cfg.beta0.tail(cfg.d0 - d).squaredNorm();
  const double included2 = cfg.beta0_norm2() - omitted2;
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n0);

  if (d <= n0 - 2)
    return RiskValue::analytic((omitted2 + cfg.sigma2) * (1.0 + dd / (nn - 1.0 - dd)));
  if (d >= n0 + 2)
    return RiskValue::analytic((omitted2 + cfg.sigma2) * (1.0 + nn / (dd - 1.0 - nn)) +
                               included2 * (1.0 - nn / dd));
  return RiskValue::infinite(); // d in {n0-1, n0, n0+1}
}

std::optional<RiskValue> analytic_risk_seq2(Eigen::Index n, const ModelConfig& cfg) {
  if (n < 0) throw config_error("analytic_risk_seq2: n must be >= 0");
  const Eigen::Index d0 = cfg.d0;
  const double dd0 = static_cast<double>(d0);
  const double nn = static_cast<double>(n);

  if (n == 0) return RiskValue::analytic(asymptote(cfg)); // null model

  // The min-norm branch is singular at {d0-1, d0} and the OLS branch at
  // {d0, d0+1}; the union is reported as infinite in either regime.
  if (n >= d0 - 1 && n <= d0 + 1) return RiskValue::infinite();

  if (n <= cfg.n0) {
    // No noise rows: the design is the first n rows of X.
    if (n <= d0 - 2)
      return RiskValue::analytic(cfg.beta0_norm2() * (1.0 - nn / dd0) +
                                 cfg.sigma2 * (1.0 + nn / (dd0 - 1.0 - nn)));
    // n >= d0 + 2: classical OLS risk.
    return RiskValue::analytic(cfg.sigma2 * (1.0 + dd0 / (nn - dd0 - 1.0)));
  }
  return std::nullopt; // expectation-form regime: Monte Carlo only
}

DesignState trial_design(Sequence sequence, Eigen::Index index,
                         const ModelConfig& cfg, long trial) {
  RngStream base_rng = base_stream(cfg, trial);
  const BaseData base = gen_base_data(cfg, base_rng);
  if (sequence == Sequence::I) {
    RngStream noise = seq1_noise_stream(cfg, trial);
    return seq1_design(base, cfg, index, noise);
  }
  RngStream noise = seq2_noise_stream(cfg, trial);
  RngStream resp = seq2_response_stream(cfg, trial);
  return seq2_design(base, cfg, index, noise, &resp);
}

RiskValue mc_risk(Sequence sequence, Eigen::Index index, const ModelConfig& cfg,
                  long trials) {
  if (trials < 2) throw config_error("mc_risk: trials must be >= 2");
  std::vector<double> risks(static_cast<std::size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    const DesignState state = trial_design(sequence, index, cfg, t);
    const CoefEstimate est =
        sequence == Sequence::I ? seq1_estimate(state) : seq2_estimate(state);
    risks[static_cast<std::size_t>(t)] = conditional_risk_value(est, cfg);
  }
  return RiskValue::monte_carlo(mean(risks), standard_error(risks), trials);
}

std::pair<RiskValue, RiskValue> risk_decomposition_seq1(Eigen::Index d,
                                                        const ModelConfig& cfg,
                                                        long trials) {
  if (d <= std::max(cfg.n0, cfg.d0))
    throw config_error("risk_decomposition_seq1: requires d > max(n0, d0)");
  if (trials < 2) throw config_error("risk_decomposition_seq1: trials must be >= 2");

  std::vector<double> term1(static_cast<std::size_t>(trials));
  std::vector<double> term2(static_cast<std::size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    RngStream base_rng = base_stream(cfg, t);
    const BaseData base = gen_base_data(cfg, base_rng);
    RngStream noise = seq1_noise_stream(cfg, t);
    const Eigen::MatrixXd Z = noise.normal_matrix_colwise(cfg.n0, d - cfg.d0);

    // S = XX' + ZZ' (n0 x n0); the error noise e is integrated analytically.
    const Eigen::MatrixXd S =
        base.X * base.X.transpose() + Z * Z.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const Eigen::MatrixXd SinvX = ldlt.solve(base.X);       // n0 x d0
    const Eigen::MatrixXd SinvZ = ldlt.solve(Z);            // n0 x (d-d0)
    const Eigen::VectorXd proj = SinvX * cfg.beta0;         // S^{-1} X beta0

    const double bias1 =
        (base.X.transpose() * proj - cfg.beta0).squaredNorm();
    const double var1 = cfg.sigma2 * SinvX.squaredNorm();   // tr(XX'S^{-2})
    term1[static_cast<std::size_t>(t)] = cfg.sigma2 + bias1 + var1;

    const double bias2 = (Z.transpose() * proj).squaredNorm();
    const double var2 = cfg.sigma2 * SinvZ.squaredNorm();   // tr(ZZ'S^{-2})
    term2[static_cast<std::size_t>(t)] = bias2 + var2;
  }
  return {RiskValue::monte_carlo(mean(term1), standard_error(term1), trials),
          RiskValue::monte_carlo(mean(term2), standard_error(term2), trials)};
}

BiasVarPoint bias_variance(Sequence sequence, Eigen::Index index,
                           const ModelConfig& cfg, long trials, long test_points) {
  if (trials < 2) throw config_error("bias_variance: trials must be >= 2");
  if (test_points < 1) throw config_error("bias_variance: test_points must be >= 1");

  const Eigen::Index dim =
      sequence == Sequence::I ? std::max(index, cfg.d0) : cfg.d0;
  const Eigen::Index used = sequence == Sequence::I ? index : cfg.d0;

  // Fixed test sample, one stream per point so the coordinates are nested
  // across indices.
  Eigen::MatrixXd T(test_points, used);
  Eigen::VectorXd true_mean(test_points);
  for (long j = 0; j < test_points; ++j) {
    RngStream rng = test_point_stream(cfg, j);
    const Eigen::VectorXd coords = rng.normal_vector(dim);
    true_mean(j) = coords.head(cfg.d0).dot(cfg.beta0);
    T.row(j) = coords.head(used).transpose();
  }

  // Welford accumulation of per-point prediction mean and variance.
  Eigen::VectorXd mean_pred = Eigen::VectorXd::Zero(test_points);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(test_points);
  for (long t = 0; t < trials; ++t) {
    const DesignState state = trial_design(sequence, index, cfg, t);
    const CoefEstimate est =
        sequence == Sequence::I ? seq1_estimate(state) : seq2_estimate(state);
    Eigen::VectorXd pred = T * est.coef;
    if (est.has_intercept) pred.array() += est.intercept;
    const Eigen::VectorXd delta = pred - mean_pred;
    mean_pred += delta / static_cast<double>(t + 1);
    m2.array() += delta.array() * (pred - mean_pred).array();
  }

  BiasVarPoint out;
  out.index = index;
  out.noise_floor = cfg.sigma2;
  out.bias2 = (mean_pred - true_mean).squaredNorm() / static_cast<double>(test_points);
  out.variance = m2.sum() / static_cast<double>(trials - 1) /
                 static_cast<double>(test_points);
  return out;
}

double condition_number(const Eigen::MatrixXd& design) {
  if (design.size() == 0)
    throw numerical_error("condition_number: empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax == 0.0)
    throw numerical_error("condition_number: undefined for the zero matrix");
  const double cutoff = rank_rtol(design.rows(), design.cols()) * smax;
  double smin = smax;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) smin = sv(i);
  return smax / smin;
}

} // namespace noisereg
