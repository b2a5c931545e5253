#include "noisereg/datagen.hpp"

#include <cmath>
#include <string>

#include "noisereg/errors.hpp"

namespace noisereg {

void ModelConfig::validate() const {
  if (d0 < 1) throw config_error("d0 must be >= 1");
  if (n0 < 1) throw config_error("n0 must be >= 1");
  if (!(sigma2 > 0.0)) throw config_error("sigma2 must be > 0");
  if (beta0.size() != d0)
    throw config_error("beta0 has length " + std::to_string(beta0.size()) +
                       ", expected d0 = " + std::to_string(d0));
  if (snr_mode == SnrMode::weak && std::abs(beta0.norm() - 1.0) > 1e-12)
    throw config_error("weak SNR requires a unit-norm beta0");
}

RngStream beta_stream(const ModelConfig& cfg) {
  return RngStream(cfg.master_seed, {streams::beta});
}

RngStream base_stream(const ModelConfig& cfg, long trial) {
  return RngStream(cfg.master_seed, {static_cast<std::uint64_t>(trial), streams::base});
}

RngStream seq1_noise_stream(const ModelConfig& cfg, long trial) {
  return RngStream(cfg.master_seed, {static_cast<std::uint64_t>(trial), streams::seq1_noise});
}

RngStream seq2_noise_stream(const ModelConfig& cfg, long trial) {
  return RngStream(cfg.master_seed, {static_cast<std::uint64_t>(trial), streams::seq2_noise});
}

RngStream seq2_response_stream(const ModelConfig& cfg, long trial) {
  return RngStream(cfg.master_seed, {static_cast<std::uint64_t>(trial), streams::seq2_response});
}

RngStream test_point_stream(const ModelConfig& cfg, long point) {
  return RngStream(cfg.master_seed, {streams::test_points, static_cast<std::uint64_t>(point)});
}

Eigen::VectorXd make_coefficients(Eigen::Index d0, SnrMode mode, RngStream& rng) {
  if (d0 < 1) throw config_error("make_coefficients: d0 must be >= 1");
  Eigen::VectorXd beta = rng.normal_vector(d0);
  if (mode == SnrMode::weak) beta /= beta.norm();
  return beta;
}

ModelConfig make_model_config(Eigen::Index d0, Eigen::Index n0, double sigma2,
                              SnrMode mode, std::uint64_t master_seed,
                              bool intercept, NoiseResponse noise_response) {
  ModelConfig cfg;
  cfg.d0 = d0;
  cfg.n0 = n0;
  cfg.sigma2 = sigma2;
  cfg.snr_mode = mode;
  cfg.master_seed = master_seed;
  cfg.intercept = intercept;
  cfg.noise_response = noise_response;
  RngStream rng = beta_stream(cfg);
  cfg.beta0 = make_coefficients(d0, mode, rng);
  cfg.validate();
  return cfg;
}

BaseData gen_base_data(const ModelConfig& cfg, RngStream& rng) {
  cfg.validate();
  BaseData base;
  base.X = rng.normal_matrix_colwise(cfg.n0, cfg.d0);
  base.e = std::sqrt(cfg.sigma2) * rng.normal_vector(cfg.n0);
  base.y = base.X * cfg.beta0 + base.e;
  return base;
}

Regime classify_regime(Eigen::Index rows, Eigen::Index params) {
  if (params > rows) return Regime::underdetermined;
  if (params == rows) return Regime::square;
  return Regime::overdetermined;
}

DesignState seq1_design(const BaseData& base, const ModelConfig& cfg,
                        Eigen::Index d, RngStream& noise_rng) {
  if (d < 0) throw config_error("seq1_design: d must be >= 0");
  DesignState state;
  state.sequence = Sequence::I;
  state.index = d;
  state.has_intercept = cfg.intercept;
  state.response = base.y;
  if (d <= cfg.d0) {
    state.design = base.X.leftCols(d);
  } else {
    state.noise_cols = d - cfg.d0;
    state.design.resize(cfg.n0, d);
    state.design.leftCols(cfg.d0) = base.X;
    state.design.rightCols(state.noise_cols) =
        noise_rng.normal_matrix_colwise(cfg.n0, state.noise_cols);
  }
  const Eigen::Index params = d + (cfg.intercept ? 1 : 0);
  state.regime = classify_regime(cfg.n0, params);
  return state;
}

DesignState seq2_design(const BaseData& base, const ModelConfig& cfg,
                        Eigen::Index n, RngStream& noise_rng,
                        RngStream* response_rng) {
  if (n < 1) throw config_error("seq2_design: n must be >= 1");
  DesignState state;
  state.sequence = Sequence::II;
  state.index = n;
  state.has_intercept = cfg.intercept;
  if (n <= cfg.n0) {
    state.design = base.X.topRows(n);
    state.response = base.y.head(n);
  } else {
    state.noise_rows = n - cfg.n0;
    state.design.resize(n, cfg.d0);
    state.design.topRows(cfg.n0) = base.X;
    state.design.bottomRows(state.noise_rows) =
        noise_rng.normal_matrix_rowwise(state.noise_rows, cfg.d0);
    state.response.resize(n);
    state.response.head(cfg.n0) = base.y;
    if (cfg.noise_response == NoiseResponse::gaussian) {
      if (response_rng == nullptr)
        throw config_error("seq2_design: gaussian noise responses need a response stream");
      state.response.tail(state.noise_rows) =
          std::sqrt(cfg.sigma2) * response_rng->normal_vector(state.noise_rows);
    } else {
      state.response.tail(state.noise_rows).setZero();
    }
  }
  const Eigen::Index params = cfg.d0 + (cfg.intercept ? 1 : 0);
  state.regime = classify_regime(n, params);
  return state;
}

} // namespace noisereg
