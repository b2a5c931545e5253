#include "noisereg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noisereg/errors.hpp"
#include "noisereg/numerics.hpp"

namespace noisereg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Spectral form of the sequence-II ridge path for one trial: with
// G = X'X + W'W = Q diag(evals) Q', the ridge solution at penalty t is
// Q diag(1/(evals+t)) Q'X'y, and the conditional risk is
// sigma2 + |beta_hat - beta0|^2 evaluated in the eigenbasis.
struct RidgePath {
  Eigen::VectorXd evals;      // ascending
  Eigen::VectorXd b;          // Q' X'y
  Eigen::VectorXd beta0_rot;  // Q' beta0
  double sigma2 = 0.0;
  double lambda_floor = 0.0;  // smallest admissible penalty (exclusive)

  double risk(double lambda) const {
    return sigma2 +
           ((b.array() / (evals.array() + lambda)) - beta0_rot.array())
               .square()
               .sum();
  }
};

RidgePath make_ridge_path(const ModelConfig& cfg, Eigen::Index n, long trial) {
  RngStream base_rng = base_stream(cfg, trial);
  const BaseData base = gen_base_data(cfg, base_rng);
  Eigen::MatrixXd gram = base.X.transpose() * base.X;
  Eigen::VectorXd xty = base.X.transpose() * base.y;
  if (n > cfg.n0) {
    RngStream noise = seq2_noise_stream(cfg, trial);
    const Eigen::MatrixXd W = noise.normal_matrix_rowwise(n - cfg.n0, cfg.d0);
    gram += W.transpose() * W; // zero noise responses leave X'y unchanged
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw numerical_error("lambda search: eigendecomposition failed");
  RidgePath path;
  path.evals = eig.eigenvalues();
  path.b = eig.eigenvectors().transpose() * xty;
  path.beta0_rot = eig.eigenvectors().transpose() * cfg.beta0;
  path.sigma2 = cfg.sigma2;
  const double gamma1_sq = path.evals(path.evals.size() - 1);
  path.lambda_floor = 1e-10 * gamma1_sq - path.evals(0);
  return path;
}

// Golden-section minimization to a relative tolerance.
template <typename F>
double golden_min(F f, double a, double b, double rel_tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  while (b - a > rel_tol * scale) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Grid argmin followed by golden refinement within the bracketing cell.
template <typename F>
double refine_argmin(F f, const std::vector<double>& grid, double floor_exclusive) {
  double best_x = kNan, best_f = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= floor_exclusive) continue;
    const double fx = f(grid[k]);
    if (fx < best_f) {
      best_f = fx;
      best_x = grid[k];
      best_k = k;
    }
  }
  if (std::isnan(best_x)) throw config_error("lambda search: empty admissible grid");
  double lo = best_k > 0 ? grid[best_k - 1] : grid[best_k];
  double hi = best_k + 1 < grid.size() ? grid[best_k + 1] : grid[best_k];
  lo = std::max(lo, std::nextafter(floor_exclusive, std::numeric_limits<double>::max()));
  if (hi <= lo) return best_x;
  return golden_min(f, lo, hi, 1e-3);
}

} // namespace

void SweepConfig::validate() const {
  model.validate();
  if (grid.empty()) throw config_error("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw config_error("sweep grid must be strictly increasing");
  if (trials < 1) throw config_error("trials must be >= 1");
  if (sequence == Sequence::II && grid.front() < 1)
    throw config_error("sequence II grid indices must be >= 1");
  if (grid.front() < 0) throw config_error("grid indices must be >= 0");
}

namespace {

ErrorCurve run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const ModelConfig& model = cfg.model;
  const Sequence seq = cfg.sequence;

  ErrorCurve curve;
  curve.sequence = seq;
  curve.trials = cfg.trials;
  curve.seed = model.master_seed;
  curve.points.reserve(cfg.grid.size());
  curve.trial_risks.reserve(cfg.grid.size());

  // Fixed test sample for the bias-variance columns, nested across indices.
  Eigen::MatrixXd test_full;
  Eigen::VectorXd true_mean;
  if (cfg.test_points > 0) {
    const Eigen::Index max_dim =
        seq == Sequence::I ? std::max(cfg.grid.back(), model.d0) : model.d0;
    test_full.resize(cfg.test_points, max_dim);
    true_mean.resize(cfg.test_points);
    for (long j = 0; j < cfg.test_points; ++j) {
      RngStream rng = test_point_stream(model, j);
      const Eigen::VectorXd coords = rng.normal_vector(max_dim);
      true_mean(j) = coords.head(model.d0).dot(model.beta0);
      test_full.row(j) = coords.transpose();
    }
  }

  const std::size_t T = static_cast<std::size_t>(cfg.trials);
  for (Eigen::Index index : cfg.grid) {
    std::vector<double> risks(T), trains(T), conds(T);
    Eigen::VectorXd mean_pred, m2;
    if (cfg.test_points > 0) {
      mean_pred = Eigen::VectorXd::Zero(cfg.test_points);
      m2 = Eigen::VectorXd::Zero(cfg.test_points);
    }

    for (long t = 0; t < cfg.trials; ++t) {
      const DesignState state = trial_design(seq, index, model, t);
      const CoefEstimate est =
          seq == Sequence::I ? seq1_estimate(state) : seq2_estimate(state);
      risks[t] = conditional_risk_value(est, model);
      trains[t] = train_rmse(state, est);
      conds[t] = state.design.size() > 0 ? condition_number(state.design) : kNan;
      if (cfg.test_points > 0) {
        const Eigen::Index used = seq == Sequence::I ? index : model.d0;
        Eigen::VectorXd pred = test_full.leftCols(used) * est.coef;
        if (est.has_intercept) pred.array() += est.intercept;
        const Eigen::VectorXd delta = pred - mean_pred;
        mean_pred += delta / static_cast<double>(t + 1);
        m2.array() += delta.array() * (pred - mean_pred).array();
      }
    }

    CurvePoint pt;
    pt.index = index;
    pt.train_rmse = mean(trains);
    pt.test_risk_mean = mean(risks);
    pt.test_risk_se = standard_error(risks);
    pt.test_rmse_mean = std::sqrt(pt.test_risk_mean);
    if (seq == Sequence::I) {
      pt.analytic_risk = analytic_risk_seq1(index, model).value;
    } else {
      const auto closed = analytic_risk_seq2(index, model);
      pt.analytic_risk = closed ? closed->value : kNan;
    }
    pt.analytic_rmse = std::sqrt(pt.analytic_risk);
    pt.cond_mean = mean(conds);
    if (cfg.test_points > 0) {
      pt.bias2 = (mean_pred - true_mean).squaredNorm() /
                 static_cast<double>(cfg.test_points);
      pt.variance = cfg.trials > 1
                        ? m2.sum() / static_cast<double>(cfg.trials - 1) /
                              static_cast<double>(cfg.test_points)
                        : 0.0;
    }
    curve.points.push_back(pt);
    curve.trial_risks.push_back(std::move(risks));
  }
  return curve;
}

} // namespace

ErrorCurve run_seq1_sweep(const SweepConfig& cfg) {
  if (cfg.sequence != Sequence::I)
    throw config_error("run_seq1_sweep: sequence must be I");
  return run_sweep(cfg);
}

ErrorCurve run_seq2_sweep(const SweepConfig& cfg) {
  if (cfg.sequence != Sequence::II)
    throw config_error("run_seq2_sweep: sequence must be II");
  return run_sweep(cfg);
}

std::vector<CoefSummary> coef_distribution(const SweepConfig& cfg,
                                           const std::vector<Eigen::Index>& indices) {
  cfg.validate();
  if (cfg.trials < 100)
    throw config_error("coef_distribution: needs at least 100 trials");
  const ModelConfig& model = cfg.model;

  std::vector<CoefSummary> out;
  for (Eigen::Index index : indices) {
    // Term list: intercept, leading true coefficients, leading noise
    // coefficients (the noise columns all behave alike).
    std::vector<std::string> terms;
    std::vector<double> true_values;
    const Eigen::Index n_true =
        cfg.sequence == Sequence::I ? std::min(index, model.d0) : model.d0;
    const Eigen::Index shown_true = std::min(n_true, cfg.max_true_terms);
    const Eigen::Index n_noise =
        cfg.sequence == Sequence::I ? std::max<Eigen::Index>(index - model.d0, 0) : 0;
    const Eigen::Index shown_noise = std::min(n_noise, cfg.max_noise_terms);

    if (model.intercept) {
      terms.push_back("intercept");
      true_values.push_back(0.0);
    }
    for (Eigen::Index j = 0; j < shown_true; ++j) {
      terms.push_back("x" + std::to_string(j + 1));
      true_values.push_back(model.beta0(j));
    }
    for (Eigen::Index k = 0; k < shown_noise; ++k) {
      terms.push_back("z" + std::to_string(k + 1));
      true_values.push_back(0.0);
    }

    std::vector<std::vector<double>> samples(terms.size(),
                                             std::vector<double>(cfg.trials));
    for (long t = 0; t < cfg.trials; ++t) {
      const DesignState state = trial_design(cfg.sequence, index, model, t);
      const CoefEstimate est =
          cfg.sequence == Sequence::I ? seq1_estimate(state) : seq2_estimate(state);
      std::size_t slot = 0;
      if (model.intercept) samples[slot++][t] = est.intercept;
      for (Eigen::Index j = 0; j < shown_true; ++j) samples[slot++][t] = est.coef(j);
      for (Eigen::Index k = 0; k < shown_noise; ++k)
        samples[slot++][t] = est.coef(model.d0 + k);
    }

    for (std::size_t s = 0; s < terms.size(); ++s) {
      CoefSummary cs;
      cs.index = index;
      cs.term = terms[s];
      cs.true_value = true_values[s];
      cs.median = quantile(samples[s], 0.5);
      cs.q1 = quantile(samples[s], 0.25);
      cs.q3 = quantile(samples[s], 0.75);
      const double iqr = cs.q3 - cs.q1;
      const double lo_fence = cs.q1 - 1.5 * iqr;
      const double hi_fence = cs.q3 + 1.5 * iqr;
      double lo = cs.q1, hi = cs.q3;
      for (double v : samples[s]) {
        if (v >= lo_fence && v < lo) lo = v;
        if (v <= hi_fence && v > hi) hi = v;
      }
      cs.whisker_lo = lo;
      cs.whisker_hi = hi;
      out.push_back(std::move(cs));
    }
  }
  return out;
}

std::vector<double> make_lambda_grid(const ModelConfig& model, Eigen::Index n,
                                     int points) {
  const double hoerl = static_cast<double>(model.d0) * model.sigma2 / model.beta0_norm2();
  const double half_width = static_cast<double>(n - model.n0) + hoerl;
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = -half_width + 2.0 * half_width * k / (points - 1);
  return grid;
}

LambdaSearchResult lambda_search(const SweepConfig& cfg, Eigen::Index n,
                                 const std::vector<double>& lambda_grid) {
  cfg.model.validate();
  if (cfg.sequence != Sequence::II)
    throw config_error("lambda_search: sequence must be II");
  if (lambda_grid.empty()) throw config_error("lambda_search: empty lambda grid");
  if (cfg.trials < 1) throw config_error("lambda_search: trials must be >= 1");

  std::vector<RidgePath> paths;
  paths.reserve(cfg.trials);
  for (long t = 0; t < cfg.trials; ++t)
    paths.push_back(make_ridge_path(cfg.model, n, t));

  double global_floor = -std::numeric_limits<double>::infinity();
  for (const auto& p : paths) global_floor = std::max(global_floor, p.lambda_floor);

  LambdaSearchResult res;
  res.lambda_grid = lambda_grid;
  res.trials = cfg.trials;
  res.mean_risk.assign(lambda_grid.size(), kNan);
  res.counts.assign(lambda_grid.size(), 0);
  res.admissible_min = kNan;

  std::vector<double> trial_risks(cfg.trials);
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    const double lam = lambda_grid[k];
    if (lam <= global_floor) continue;
    for (long t = 0; t < cfg.trials; ++t) trial_risks[t] = paths[t].risk(lam);
    res.counts[k] = cfg.trials;
    res.mean_risk[k] = mean(trial_risks);
    if (std::isnan(res.admissible_min)) res.admissible_min = lam;
  }

  auto mean_risk_at = [&](double lam) {
    double s = 0.0;
    for (const auto& p : paths) s += p.risk(lam);
    return s / static_cast<double>(cfg.trials);
  };
  res.lambda_opt = refine_argmin(mean_risk_at, lambda_grid, global_floor);

  std::vector<double> opts(cfg.trials);
  for (long t = 0; t < cfg.trials; ++t) {
    const auto& p = paths[t];
    opts[t] = refine_argmin([&](double lam) { return p.risk(lam); }, lambda_grid,
                            p.lambda_floor);
  }
  res.mean_trial_opt = mean(opts);
  return res;
}

HeatmapResult ridge_heatmap(const ModelConfig& model,
                            const std::vector<Eigen::Index>& n0_grid,
                            const std::vector<Eigen::Index>& noise_grid,
                            long trials) {
  model.validate();
  if (n0_grid.empty() || noise_grid.empty())
    throw config_error("ridge_heatmap: grids must be nonempty");
  if (trials < 1) throw config_error("ridge_heatmap: trials must be >= 1");

  HeatmapResult hm;
  hm.n0_grid = n0_grid;
  hm.noise_grid = noise_grid;
  hm.trials = trials;
  const Eigen::Index rows = static_cast<Eigen::Index>(n0_grid.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(noise_grid.size());
  hm.mean_lambda_raw.resize(rows, cols);
  hm.mean_lambda_norm.resize(rows, cols);
  hm.formula_raw.resize(rows, cols);

  const double hoerl = static_cast<double>(model.d0) * model.sigma2 / model.beta0_norm2();

  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      // Each cell is its own sub-experiment with the shared beta0.
      ModelConfig cell = model;
      cell.n0 = n0_grid[i];
      cell.master_seed = derive_seed(
          model.master_seed,
          {streams::cell, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
      cell.beta0 = model.beta0;
      const Eigen::Index n = cell.n0 + noise_grid[j];
      const std::vector<double> grid = make_lambda_grid(cell, n);

      std::vector<double> opts(trials);
      for (long t = 0; t < trials; ++t) {
        const RidgePath path = make_ridge_path(cell, n, t);
        opts[t] = refine_argmin([&](double lam) { return path.risk(lam); }, grid,
                                path.lambda_floor);
      }
      hm.mean_lambda_raw(i, j) = mean(opts);
      hm.mean_lambda_norm(i, j) = hm.mean_lambda_raw(i, j) / static_cast<double>(n);
      hm.formula_raw(i, j) = hoerl - static_cast<double>(noise_grid[j]);
    }
  }
  return hm;
}

namespace {

// Per-index sub-experiment for the proportional rate traces.  A changed d0
// redraws beta0 from the derived seed (unit norm in weak mode keeps the
// traces comparable across indices); a changed n0 keeps beta0 shared.
ModelConfig scaled_submodel(const ModelConfig& model, Eigen::Index index,
                            Eigen::Index d0_new, Eigen::Index n0_new) {
  ModelConfig sub = model;
  sub.d0 = d0_new;
  sub.n0 = n0_new;
  sub.master_seed =
      derive_seed(model.master_seed, {streams::trace, static_cast<std::uint64_t>(index)});
  if (d0_new == model.d0) {
    sub.beta0 = model.beta0;
  } else {
    RngStream rng = beta_stream(sub);
    sub.beta0 = make_coefficients(d0_new, sub.snr_mode, rng);
  }
  return sub;
}

} // namespace

std::vector<ShrinkagePoint> shrinkage_trace(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.grid.front() < 1 || cfg.grid.back() < 4 * cfg.grid.front())
    throw config_error("shrinkage_trace: grid must span at least a factor of 4");
  if (cfg.delta < 0.0 || cfg.delta >= 1.0 || cfg.nu < 0.0 || cfg.nu >= 1.0)
    throw config_error("shrinkage_trace: ratio targets must lie in [0, 1)");

  std::vector<ShrinkagePoint> out;
  out.reserve(cfg.grid.size());
  const std::size_t T = static_cast<std::size_t>(cfg.trials);

  for (Eigen::Index index : cfg.grid) {
    std::vector<double> true_norm(T), noise_norm(T), ridge_dist(T), coef_norm(T),
        ds_dist(T);
    const double nn = static_cast<double>(index);

    for (long t = 0; t < cfg.trials; ++t) {
      if (cfg.sequence == Sequence::I) {
        const Eigen::Index d0 =
            cfg.delta > 0.0
                ? std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(
                                                cfg.delta * nn)))
                : cfg.model.d0;
        const ModelConfig sub = cfg.delta > 0.0
                                    ? scaled_submodel(cfg.model, index, d0, cfg.model.n0)
                                    : cfg.model;
        if (index <= sub.d0)
          throw config_error("shrinkage_trace: sequence I grid must exceed d0");
        RngStream base_rng = base_stream(sub, t);
        const BaseData base = gen_base_data(sub, base_rng);
        RngStream noise = seq1_noise_stream(sub, t);
        const CoefEstimate est = seq1_estimate(seq1_design(base, sub, index, noise));
        const CoefEstimate ridge_est =
            ridge(base.X, base.y, static_cast<double>(index - sub.d0));
        true_norm[t] = est.true_block().norm();
        noise_norm[t] = est.noise_block().norm();
        ridge_dist[t] = (est.true_block() - ridge_est.coef).norm();
        continue;
      }

      // Sequence II.  The coefficient norm tracks the fixed-n0 model (the
      // shrinkage-to-zero claim); the ridge distances follow the nu-scaled
      // sequence when a ratio target is set.
      if (index <= cfg.model.n0)
        throw config_error("shrinkage_trace: sequence II grid must exceed n0");
      {
        RngStream base_rng = base_stream(cfg.model, t);
        const BaseData base = gen_base_data(cfg.model, base_rng);
        RngStream noise = seq2_noise_stream(cfg.model, t);
        RngStream resp = seq2_response_stream(cfg.model, t);
        const CoefEstimate est =
            seq2_estimate(seq2_design(base, cfg.model, index, noise, &resp));
        coef_norm[t] = est.coef.norm();
        if (cfg.nu == 0.0) {
          const CoefEstimate ridge_est =
              ridge(base.X, base.y, static_cast<double>(index - cfg.model.n0));
          ridge_dist[t] = (est.coef - ridge_est.coef).norm();
        }
      }
      if (cfg.nu > 0.0) {
        const Eigen::Index n0_nu = std::max<Eigen::Index>(
            1, static_cast<Eigen::Index>(std::llround(cfg.nu * nn)));
        const double nu_eff = static_cast<double>(n0_nu) / nn;
        const ModelConfig sub = scaled_submodel(cfg.model, index, cfg.model.d0, n0_nu);
        RngStream base_rng = base_stream(sub, t);
        const BaseData base = gen_base_data(sub, base_rng);
        RngStream noise = seq2_noise_stream(sub, t);
        RngStream resp = seq2_response_stream(sub, t);
        const DesignState aug = seq2_design(base, sub, index, noise, &resp);
        const CoefEstimate est = seq2_estimate(aug);
        const CoefEstimate ridge_est =
            ridge(base.X, base.y, static_cast<double>(index - sub.n0));
        ridge_dist[t] = (est.coef - ridge_est.coef).norm();

        // Double-shrinkage trace: ridge on the augmented data with penalty
        // n*lambda against ridge on the raw data with penalty n(1-nu+lambda).
        const CoefEstimate aug_ridge =
            ridge(aug.design, aug.response, nn * cfg.trace_lambda);
        const CoefEstimate raw_ridge =
            ridge(base.X, base.y, nn * (1.0 - nu_eff + cfg.trace_lambda));
        ds_dist[t] = (aug_ridge.coef - raw_ridge.coef).norm();
      }
    }

    ShrinkagePoint pt;
    pt.index = index;
    if (cfg.sequence == Sequence::I) {
      pt.true_block_norm = mean(true_norm);
      pt.noise_block_norm = mean(noise_norm);
      pt.ridge_distance = mean(ridge_dist);
    } else {
      pt.coef_norm = mean(coef_norm);
      pt.ridge_distance = mean(ridge_dist);
      if (cfg.nu > 0.0) pt.double_shrunk_distance = mean(ds_dist);
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<std::pair<Eigen::Index, double>> condition_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<Eigen::Index, double>> out;
  out.reserve(cfg.grid.size());
  for (Eigen::Index index : cfg.grid) {
    std::vector<double> conds(cfg.trials);
    for (long t = 0; t < cfg.trials; ++t) {
      const DesignState state = trial_design(cfg.sequence, index, cfg.model, t);
      conds[t] = state.design.size() > 0 ? condition_number(state.design) : kNan;
    }
    out.emplace_back(index, mean(conds));
  }
  return out;
}

bool double_descent_certificate(const ErrorCurve& curve, Eigen::Index interp_index,
                                double asymptote_value, std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  const auto& pts = curve.points;
  if (pts.size() < 3) return fail("curve has fewer than 3 points");

  std::size_t ip = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].index == interp_index) ip = i;
  if (ip == pts.size()) return fail("interpolation index not in grid");
  if (ip == 0 || ip + 1 >= pts.size())
    return fail("interpolation index must be interior to the grid");

  const double peak = pts[ip].test_risk_mean;
  if (!(peak > pts.front().test_risk_mean))
    return fail("risk at interpolation does not exceed the first grid point");
  if (!(peak > asymptote_value))
    return fail("risk at interpolation does not exceed the asymptote");

  std::size_t best = ip + 1;
  for (std::size_t j = ip + 1; j < pts.size(); ++j)
    if (pts[j].test_risk_mean < pts[best].test_risk_mean) best = j;
  if (best + 1 >= pts.size())
    return fail("minimum beyond interpolation sits on the grid boundary");
  if (!(pts[best].test_risk_mean < peak))
    return fail("no point beyond interpolation falls below the peak");
  if (!(pts[best].test_risk_mean < pts.back().test_risk_mean))
    return fail("risk does not rise again after the second descent");
  if (why) *why = "";
  return true;
}

} // namespace noisereg
