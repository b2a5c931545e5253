#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "noisereg/experiments.hpp"

namespace noisereg {

/// Counts recorded while filtering and imputing a marker table.
struct SnpProvenance {
  long input_markers = 0;
  long dropped_call_rate = 0;
  long dropped_maf = 0;
  long dropped_thinning = 0;
  long dropped_zero_variance = 0;
  long imputed_cells = 0;
};

/// A cleaned genotype/phenotype pair: columns standardized to mean zero and
/// unit standard deviation, phenotype centered, no missing values.
struct SnpDataset {
  Eigen::MatrixXd genotype; // accessions x markers
  Eigen::VectorXd phenotype;
  std::vector<std::string> marker_ids;
  std::vector<std::string> accession_ids;
  SnpProvenance provenance;
};

/// A delimited numeric table with row/column ids; missing cells are NaN.
struct RawTable {
  std::vector<std::string> col_ids;
  std::vector<std::string> row_ids;
  Eigen::MatrixXd values;
};

/// Read a delimited text table (comma, tab, or semicolon; sniffed from the
/// header).  First column holds row ids; "NA", "na", "NaN", or an empty cell
/// is missing.
RawTable read_delimited(const std::string& path);

/// Core ingestion: call-rate filter, MAF filter, thinning, mean imputation,
/// standardization, phenotype centering.  Values on a 0..2 dosage scale are
/// detected and halved to allele frequencies for the MAF computation.
SnpDataset snp_ingest_tables(const RawTable& genotype,
                             const std::unordered_map<std::string, double>& phenotype,
                             double call_rate_min, double maf_min, long thin_stride);

/// File-based ingestion per the CLI contract.
SnpDataset snp_ingest(const std::string& genotype_path, const std::string& phenotype_path,
                      double call_rate_min, double maf_min, long thin_stride);

/// Repeated random-split experiment: starting from an intercept-only model,
/// markers are added in file order; per step the model is fitted by least
/// squares (minimum-norm past the interpolation point) and train/test RMSE
/// recorded on the held-out accessions, averaged over repeats.
ErrorCurve rice_experiment(const SnpDataset& data, long train_size, long repeats,
                           std::uint64_t seed, long d_step = 5, Eigen::Index d_max = 0);

} // namespace noisereg
