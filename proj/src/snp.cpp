#include "noisereg/snp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "noisereg/errors.hpp"
#include "noisereg/estimators.hpp"
#include "noisereg/numerics.hpp"
#include "noisereg/rng.hpp"

namespace noisereg {

namespace {

bool is_missing_token(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

char sniff_delimiter(const std::string& header) {
  const char candidates[] = {',', '\t', ';'};
  char best = ',';
  std::size_t best_count = 0;
  for (char c : candidates) {
    const std::size_t count =
        static_cast<std::size_t>(std::count(header.begin(), header.end(), c));
    if (count > best_count) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string f;
  std::istringstream ss(line);
  while (std::getline(ss, f, delim)) {
    if (!f.empty() && f.back() == '\r') f.pop_back();
    fields.push_back(f);
  }
  if (!line.empty() && line.back() == delim) fields.push_back("");
  return fields;
}

} // namespace

RawTable read_delimited(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path);
  const char delim = sniff_delimiter(line);

  RawTable table;
  {
    auto header = split(line, delim);
    if (header.size() < 2) throw data_error(path + ": header needs id + columns");
    table.col_ids.assign(header.begin() + 1, header.end());
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line, delim);
    if (fields.size() != table.col_ids.size() + 1)
      throw data_error(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(table.col_ids.size() + 1) + " fields, got " +
                       std::to_string(fields.size()));
    table.row_ids.push_back(fields[0]);
    std::vector<double> row(table.col_ids.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& tok = fields[j];
      if (is_missing_token(tok)) {
        row[j - 1] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double v{};
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw data_error(path + ":" + std::to_string(lineno) + ": bad value `" + tok + "`");
      row[j - 1] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(path + ": no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.col_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

SnpDataset snp_ingest_tables(const RawTable& genotype,
                             const std::unordered_map<std::string, double>& phenotype,
                             double call_rate_min, double maf_min, long thin_stride) {
  if (thin_stride < 1) throw config_error("thin_stride must be >= 1");
  const Eigen::Index n = genotype.values.rows();
  const Eigen::Index m = genotype.values.cols();

  SnpDataset out;
  out.provenance.input_markers = m;
  out.accession_ids = genotype.row_ids;

  // Align the phenotype by accession id.
  out.phenotype.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = phenotype.find(genotype.row_ids[static_cast<std::size_t>(i)]);
    if (it == phenotype.end())
      throw data_error("no phenotype for accession `" +
                       genotype.row_ids[static_cast<std::size_t>(i)] + "`");
    out.phenotype(i) = it->second;
  }

  // Dosage-coded data (max > 1) is halved to allele frequencies for MAF.
  double global_max = 0.0;
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isnan(genotype.values(i, j)))
        global_max = std::max(global_max, genotype.values(i, j));
  const double dosage_scale = global_max > 1.0 ? 2.0 : 1.0;

  // Call-rate and MAF filters.
  std::vector<Eigen::Index> survivors;
  for (Eigen::Index j = 0; j < m; ++j) {
    long present = 0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = genotype.values(i, j);
      if (!std::isnan(v)) {
        ++present;
        sum += v;
      }
    }
    const double call_rate = static_cast<double>(present) / static_cast<double>(n);
    if (call_rate < call_rate_min) {
      ++out.provenance.dropped_call_rate;
      continue;
    }
    const double p = sum / static_cast<double>(present) / dosage_scale;
    const double maf = std::clamp(std::min(p, 1.0 - p), 0.0, 0.5);
    if (maf < maf_min) {
      ++out.provenance.dropped_maf;
      continue;
    }
    survivors.push_back(j);
  }

  // Keep every thin_stride-th surviving marker.
  std::vector<Eigen::Index> kept;
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    if (k % static_cast<std::size_t>(thin_stride) == 0) kept.push_back(survivors[k]);
    else ++out.provenance.dropped_thinning;
  }

  // Impute by the column mean, standardize, and drop zero-variance columns.
  std::vector<Eigen::Index> final_cols;
  std::vector<Eigen::VectorXd> columns;
  for (Eigen::Index j : kept) {
    Eigen::VectorXd col = genotype.values.col(j);
    long present = 0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isnan(col(i))) {
        ++present;
        sum += col(i);
      }
    const double colmean = sum / static_cast<double>(present);
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::isnan(col(i))) {
        col(i) = colmean;
        ++out.provenance.imputed_cells;
      }
    const double mu = col.mean();
    const double sd =
        std::sqrt((col.array() - mu).square().sum() / static_cast<double>(n - 1));
    if (sd <= 1e-12) {
      ++out.provenance.dropped_zero_variance;
      std::cerr << "warning: dropping zero-variance marker "
                << genotype.col_ids[static_cast<std::size_t>(j)] << "\n";
      continue;
    }
    columns.push_back((col.array() - mu) / sd);
    final_cols.push_back(j);
  }

  out.genotype.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.genotype.col(static_cast<Eigen::Index>(c)) = columns[c];
    out.marker_ids.push_back(genotype.col_ids[static_cast<std::size_t>(final_cols[c])]);
  }
  out.phenotype.array() -= out.phenotype.mean();
  return out;
}

SnpDataset snp_ingest(const std::string& genotype_path, const std::string& phenotype_path,
                      double call_rate_min, double maf_min, long thin_stride) {
  const RawTable genotype = read_delimited(genotype_path);
  const RawTable pheno_table = read_delimited(phenotype_path);
  if (pheno_table.values.cols() < 1)
    throw data_error(phenotype_path + ": expected id + value columns");
  std::unordered_map<std::string, double> phenotype;
  for (Eigen::Index i = 0; i < pheno_table.values.rows(); ++i) {
    const double v = pheno_table.values(i, 0);
    if (std::isnan(v))
      throw data_error(phenotype_path + ": missing phenotype for accession `" +
                       pheno_table.row_ids[static_cast<std::size_t>(i)] + "`");
    phenotype[pheno_table.row_ids[static_cast<std::size_t>(i)]] = v;
  }
  return snp_ingest_tables(genotype, phenotype, call_rate_min, maf_min, thin_stride);
}

ErrorCurve rice_experiment(const SnpDataset& data, long train_size, long repeats,
                           std::uint64_t seed, long d_step, Eigen::Index d_max) {
  const Eigen::Index n = data.genotype.rows();
  const Eigen::Index m = data.genotype.cols();
  if (train_size < 1 || train_size >= n)
    throw config_error("rice_experiment: train_size must be in [1, accessions)");
  if (repeats < 1) throw config_error("rice_experiment: repeats must be >= 1");
  if (d_step < 1) throw config_error("rice_experiment: d_step must be >= 1");
  if (d_max <= 0 || d_max > m) d_max = m;

  std::vector<Eigen::Index> grid;
  for (Eigen::Index d = 0; d <= d_max; d += d_step) grid.push_back(d);
  if (grid.back() != d_max) grid.push_back(d_max);

  const Eigen::Index n_test = n - train_size;
  ErrorCurve curve;
  curve.sequence = Sequence::I;
  curve.trials = repeats;
  curve.seed = seed;
  curve.points.resize(grid.size());
  curve.trial_risks.assign(grid.size(),
                           std::vector<double>(static_cast<std::size_t>(repeats)));

  std::vector<std::vector<double>> train_acc(grid.size());
  for (auto& v : train_acc) v.resize(static_cast<std::size_t>(repeats));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (long r = 0; r < repeats; ++r) {
    RngStream rng(seed, {streams::split, static_cast<std::uint64_t>(r)});
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = n - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[rng.uniform_below(static_cast<std::uint64_t>(i + 1))]);

    Eigen::MatrixXd train_X(train_size, d_max), test_X(n_test, d_max);
    Eigen::VectorXd train_y(train_size), test_y(n_test);
    for (Eigen::Index i = 0; i < train_size; ++i) {
      train_X.row(i) = data.genotype.row(order[static_cast<std::size_t>(i)]).head(d_max);
      train_y(i) = data.phenotype(order[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = 0; i < n_test; ++i) {
      test_X.row(i) =
          data.genotype.row(order[static_cast<std::size_t>(train_size + i)]).head(d_max);
      test_y(i) = data.phenotype(order[static_cast<std::size_t>(train_size + i)]);
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Eigen::Index d = grid[g];
      Eigen::MatrixXd design(train_size, d + 1);
      design.col(0).setOnes();
      design.rightCols(d) = train_X.leftCols(d);
      const CoefEstimate est = min_norm_ols(design, train_y);
      const double b0 = est.coef(0);
      const Eigen::VectorXd slopes = est.coef.tail(d);

      const Eigen::VectorXd train_fit =
          (train_X.leftCols(d) * slopes).array() + b0;
      const Eigen::VectorXd test_fit = (test_X.leftCols(d) * slopes).array() + b0;
      train_acc[g][static_cast<std::size_t>(r)] =
          (train_y - train_fit).norm() / std::sqrt(static_cast<double>(train_size));
      curve.trial_risks[g][static_cast<std::size_t>(r)] =
          (test_y - test_fit).squaredNorm() / static_cast<double>(n_test);
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    CurvePoint& p = curve.points[g];
    p.index = grid[g];
    p.train_rmse = mean(train_acc[g]);
    p.test_risk_mean = mean(curve.trial_risks[g]);
    p.test_risk_se = standard_error(curve.trial_risks[g]);
    p.test_rmse_mean = std::sqrt(p.test_risk_mean);
  }
  return curve;
}

} // namespace noisereg
