#pragma once

#include <optional>
#include <string>
#include <vector>

#include "noisereg/datagen.hpp"
#include "noisereg/experiments.hpp"

namespace noisereg {

enum class Subcommand {
  seq1_sweep,
  seq2_sweep,
  bias_variance,
  coef_boxplots,
  ridge_heatmap,
  shrinkage_trace,
  condition_sweep,
  rice_analysis,
};

std::string subcommand_name(Subcommand sc);
std::optional<Subcommand> subcommand_from_name(const std::string& name);

/// A fully validated run configuration with per-subcommand defaults applied.
struct RunConfig {
  Subcommand subcommand = Subcommand::seq1_sweep;
  std::uint64_t seed = 20250809;
  std::string out_dir = ".";
  bool emit_csv = true;
  bool emit_svg = false;

  // [model]
  Eigen::Index d0 = 25;
  Eigen::Index n0 = 50;
  double sigma2 = 0.25;
  SnrMode snr = SnrMode::weak;
  bool intercept = false;
  NoiseResponse noise_response = NoiseResponse::zero;

  // [sweep]
  Sequence sequence = Sequence::I;
  Eigen::Index grid_min = 0;
  Eigen::Index grid_max = 150;
  Eigen::Index grid_step = 1;
  long trials = 100;
  long test_points = 0;
  std::vector<Eigen::Index> indices;       // coef-boxplots
  double delta = 0.0;                      // shrinkage-trace, sequence I ratio d0/d
  double nu = 0.0;                         // shrinkage-trace, sequence II ratio n0/n
  double trace_lambda = 0.1;
  int lambda_points = 201;
  std::vector<Eigen::Index> n0_grid;       // ridge-heatmap
  std::vector<Eigen::Index> noise_grid;
  Eigen::Index max_true_terms = 60;
  Eigen::Index max_noise_terms = 9;

  // [data] (rice-analysis)
  std::string genotype_path;
  std::string phenotype_path;
  double call_rate_min = 0.95;
  double maf_min = 0.05;
  long thin_stride = 5;
  long train_size = 300;
  long repeats = 100;
  long d_step = 5;
  Eigen::Index d_max = 0; // 0 = all ingested markers

  /// Materialize the model (draws beta0 from the seed).
  ModelConfig model() const;

  /// Materialize the sweep configuration, including the index grid.
  SweepConfig sweep() const;

  std::vector<Eigen::Index> make_grid() const;
};

/// Subcommand-specific documented defaults.
RunConfig default_config(Subcommand sc);

/// Parse a `key = value` config file with [model]/[sweep]/[data] sections.
/// Unknown keys, duplicate keys, and out-of-range values are errors naming
/// the offending line or field.  `forced` pins the subcommand chosen on the
/// command line; a conflicting value in the file is an error.
RunConfig parse_config(const std::string& path,
                       std::optional<Subcommand> forced = std::nullopt);
RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            std::optional<Subcommand> forced = std::nullopt);

/// One-line-per-key description of every config key and its default.
std::string config_reference();

} // namespace noisereg
