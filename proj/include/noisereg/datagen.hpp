#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "noisereg/rng.hpp"

namespace noisereg {

enum class SnrMode { weak, strong };
enum class NoiseResponse { zero, gaussian };
enum class Sequence { I, II };
enum class Regime { underdetermined, square, overdetermined };

/// The data-generating model: y = X beta0 + e with X an n0 x d0 standard
/// normal matrix and e ~ N(0, sigma2 I).
struct ModelConfig {
  Eigen::Index d0 = 25;
  Eigen::Index n0 = 50;
  double sigma2 = 0.25;
  SnrMode snr_mode = SnrMode::weak;
  Eigen::VectorXd beta0;
  std::uint64_t master_seed = 20250809;
  bool intercept = false;
  NoiseResponse noise_response = NoiseResponse::zero;

  /// Throws config_error when any invariant fails.
  void validate() const;

  double beta0_norm2() const { return beta0.squaredNorm(); }
};

/// One realization of the true model.
struct BaseData {
  Eigen::MatrixXd X; // n0 x d0
  Eigen::VectorXd e; // n0
  Eigen::VectorXd y; // n0, equals X*beta0 + e
};

/// One point along sequence I or II: the assembled working training set.
struct DesignState {
  Sequence sequence = Sequence::I;
  Eigen::Index index = 0;        // d for sequence I, n for sequence II
  Eigen::MatrixXd design;        // n0 x d (I) or n x d0 (II); no intercept column
  Eigen::VectorXd response;
  Regime regime = Regime::overdetermined;
  Eigen::Index noise_cols = 0;   // sequence I only
  Eigen::Index noise_rows = 0;   // sequence II only
  bool has_intercept = false;    // fitters prepend a ones column when set
};

// Stream constructors.  Trial streams are addressed by (master_seed, trial,
// purpose) so Monte Carlo trials can run in any order.
RngStream beta_stream(const ModelConfig& cfg);
RngStream base_stream(const ModelConfig& cfg, long trial);
RngStream seq1_noise_stream(const ModelConfig& cfg, long trial);
RngStream seq2_noise_stream(const ModelConfig& cfg, long trial);
RngStream seq2_response_stream(const ModelConfig& cfg, long trial);
RngStream test_point_stream(const ModelConfig& cfg, long point);

/// Draw the regression coefficients: iid N(0,1), normalized to unit length in
/// weak SNR mode.
Eigen::VectorXd make_coefficients(Eigen::Index d0, SnrMode mode, RngStream& rng);

/// Build a ModelConfig with beta0 drawn from the master seed.
ModelConfig make_model_config(Eigen::Index d0, Eigen::Index n0, double sigma2,
                              SnrMode mode, std::uint64_t master_seed,
                              bool intercept = false,
                              NoiseResponse noise_response = NoiseResponse::zero);

/// Draw one training-set realization from the model.
BaseData gen_base_data(const ModelConfig& cfg, RngStream& rng);

/// Sequence I: first d columns of X for d <= d0, then [X, Z] with fresh
/// standard-normal noise columns.  Noise columns are nested across d for a
/// given stream.
DesignState seq1_design(const BaseData& base, const ModelConfig& cfg,
                        Eigen::Index d, RngStream& noise_rng);

/// Sequence II: first n rows of (X, y) for n <= n0, then noise observation
/// rows appended with zero (or optional Gaussian) responses.  Noise rows are
/// nested across n for a given stream.
DesignState seq2_design(const BaseData& base, const ModelConfig& cfg,
                        Eigen::Index n, RngStream& noise_rng,
                        RngStream* response_rng = nullptr);

/// Regime of an n-row design with p unknowns (intercept included).
Regime classify_regime(Eigen::Index rows, Eigen::Index params);

} // namespace noisereg
