#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "noisereg/config.hpp"
#include "noisereg/csv.hpp"
#include "noisereg/errors.hpp"
#include "noisereg/snp.hpp"
#include "noisereg/svg.hpp"

namespace {

using namespace noisereg;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void emit_curve(const RunConfig& cfg, const ErrorCurve& curve, const std::string& stem,
                const CurveSvgOptions& svg_opts) {
  if (cfg.emit_csv) {
    const std::string p = out_path(cfg, stem + ".csv");
    write_curve_csv(curve, p);
    std::cout << "wrote " << p << "\n";
  }
  if (cfg.emit_svg) {
    const std::string p = out_path(cfg, stem + ".svg");
    render_curve_svg(curve, svg_opts, p);
    std::cout << "wrote " << p << "\n";
  }
}

CurveSvgOptions curve_annotations(const RunConfig& cfg, const ModelConfig& model,
                                  const std::string& x_label) {
  CurveSvgOptions o;
  o.n0_mark = cfg.n0;
  o.d0_mark = cfg.d0;
  o.null_rmse = std::sqrt(asymptote(model));
  o.x_label = x_label;
  o.title = subcommand_name(cfg.subcommand);
  return o;
}

int run(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  switch (cfg.subcommand) {
    case Subcommand::seq1_sweep: {
      SweepConfig sweep = cfg.sweep();
      sweep.sequence = Sequence::I;
      const ErrorCurve curve = run_seq1_sweep(sweep);
      emit_curve(cfg, curve, "seq1_sweep", curve_annotations(cfg, sweep.model, "d"));
      return 0;
    }
    case Subcommand::seq2_sweep: {
      SweepConfig sweep = cfg.sweep();
      sweep.sequence = Sequence::II;
      const ErrorCurve curve = run_seq2_sweep(sweep);
      emit_curve(cfg, curve, "seq2_sweep", curve_annotations(cfg, sweep.model, "n"));
      return 0;
    }
    case Subcommand::bias_variance: {
      const SweepConfig sweep = cfg.sweep();
      const ErrorCurve curve = sweep.sequence == Sequence::I ? run_seq1_sweep(sweep)
                                                             : run_seq2_sweep(sweep);
      emit_curve(cfg, curve, "bias_variance",
                 curve_annotations(cfg, sweep.model,
                                   sweep.sequence == Sequence::I ? "d" : "n"));
      return 0;
    }
    case Subcommand::coef_boxplots: {
      const SweepConfig sweep = cfg.sweep();
      const auto summaries = coef_distribution(sweep, cfg.indices);
      const std::string p = out_path(cfg, "coef_boxplots.csv");
      write_coef_csv(summaries, sweep.trials, cfg.seed, p);
      std::cout << "wrote " << p << "\n";
      return 0;
    }
    case Subcommand::ridge_heatmap: {
      const ModelConfig model = cfg.model();
      const HeatmapResult hm = ridge_heatmap(model, cfg.n0_grid, cfg.noise_grid, cfg.trials);
      if (cfg.emit_csv) {
        const std::string p = out_path(cfg, "ridge_heatmap.csv");
        write_heatmap_csv(hm, cfg.seed, p);
        std::cout << "wrote " << p << "\n";
      }
      if (cfg.emit_svg) {
        const std::string p = out_path(cfg, "ridge_heatmap.svg");
        render_heatmap_svg(hm, p);
        std::cout << "wrote " << p << "\n";
      }
      return 0;
    }
    case Subcommand::shrinkage_trace: {
      const SweepConfig sweep = cfg.sweep();
      const auto points = shrinkage_trace(sweep);
      const std::string p = out_path(cfg, "shrinkage_trace.csv");
      write_shrinkage_csv(points, sweep.sequence, sweep.trials, cfg.seed, p);
      std::cout << "wrote " << p << "\n";
      return 0;
    }
    case Subcommand::condition_sweep: {
      const SweepConfig sweep = cfg.sweep();
      const auto points = condition_sweep(sweep);
      const std::string p = out_path(cfg, "condition_sweep.csv");
      write_condition_csv(points, sweep.trials, cfg.seed, p);
      std::cout << "wrote " << p << "\n";
      return 0;
    }
    case Subcommand::rice_analysis: {
      const SnpDataset data = snp_ingest(cfg.genotype_path, cfg.phenotype_path,
                                         cfg.call_rate_min, cfg.maf_min, cfg.thin_stride);
      std::cout << "ingested " << data.genotype.rows() << " accessions x "
                << data.genotype.cols() << " markers (dropped: call rate "
                << data.provenance.dropped_call_rate << ", MAF "
                << data.provenance.dropped_maf << ", thinning "
                << data.provenance.dropped_thinning << ", zero variance "
                << data.provenance.dropped_zero_variance << "; imputed cells "
                << data.provenance.imputed_cells << ")\n";
      const ErrorCurve curve = rice_experiment(data, cfg.train_size, cfg.repeats,
                                               cfg.seed, cfg.d_step, cfg.d_max);
      CurveSvgOptions o;
      o.n0_mark = cfg.train_size;
      o.null_rmse = std::sqrt(data.phenotype.squaredNorm() /
                              static_cast<double>(data.phenotype.size()));
      o.x_label = "markers";
      o.title = "rice-analysis";
      o.light_curves = 0;
      emit_curve(cfg, curve, "rice_curve", o);
      return 0;
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulations of noise predictors and noise observations in linear "
               "regression: double descent curves, bias-variance decompositions, "
               "coefficient shrinkage, optimal ridge search, and an SNP data "
               "pipeline."};
  app.footer(config_reference());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> out_dir_flag;
  std::optional<long> trials_flag;
  std::optional<std::string> emit_flag;

  for (const Subcommand sc :
       {Subcommand::seq1_sweep, Subcommand::seq2_sweep, Subcommand::bias_variance,
        Subcommand::coef_boxplots, Subcommand::ridge_heatmap, Subcommand::shrinkage_trace,
        Subcommand::condition_sweep, Subcommand::rice_analysis}) {
    CLI::App* sub = app.add_subcommand(subcommand_name(sc), "");
    sub->add_option("--config", config_path, "config file (key = value)");
    sub->add_option("--seed", [&seed_flag](const CLI::results_t& r) {
      seed_flag = std::stoull(r[0]);
      return true;
    }, "master seed");
    sub->add_option("--out-dir", [&out_dir_flag](const CLI::results_t& r) {
      out_dir_flag = r[0];
      return true;
    }, "output directory");
    sub->add_option("--trials", [&trials_flag](const CLI::results_t& r) {
      trials_flag = std::stol(r[0]);
      return true;
    }, "Monte Carlo trials");
    sub->add_option("--emit", [&emit_flag](const CLI::results_t& r) {
      emit_flag = r[0];
      return true;
    }, "comma list from {csv, svg}");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string chosen = app.get_subcommands().front()->get_name();
    const std::optional<Subcommand> sc = subcommand_from_name(chosen);
    RunConfig cfg = config_path.empty()
                        ? default_config(*sc)
                        : parse_config(config_path, sc);
    if (seed_flag) cfg.seed = *seed_flag;
    if (out_dir_flag) cfg.out_dir = *out_dir_flag;
    if (trials_flag) {
      if (*trials_flag < 1) throw config_error("--trials must be >= 1");
      cfg.trials = *trials_flag;
    }
    if (emit_flag) {
      cfg.emit_csv = emit_flag->find("csv") != std::string::npos;
      cfg.emit_svg = emit_flag->find("svg") != std::string::npos;
      if (!cfg.emit_csv && !cfg.emit_svg)
        throw config_error("--emit must name csv and/or svg");
    }
    return run(cfg);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
