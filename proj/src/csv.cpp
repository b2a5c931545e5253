#include "noisereg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "noisereg/errors.hpp"

namespace noisereg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double_field(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double out{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw data_error("bad numeric field: `" + s + "`");
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary); // binary: no newline translation
  if (!out) throw data_error("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

} // namespace

void write_curve_csv(const ErrorCurve& curve, const std::string& path) {
  if (curve.points.empty()) throw data_error("write_curve_csv: empty curve");
  std::ofstream out = open_out(path);
  out << "index,train_rmse,test_rmse_mean,test_rmse_analytic,bias2,variance,"
         "cond_mean,trials,seed\n";
  for (const CurvePoint& p : curve.points) {
    out << p.index << ',' << format_double(p.train_rmse) << ','
        << format_double(p.test_rmse_mean) << ',' << format_double(p.analytic_rmse)
        << ',' << format_double(p.bias2) << ',' << format_double(p.variance) << ','
        << format_double(p.cond_mean) << ',' << curve.trials << ',' << curve.seed
        << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

ErrorCurve parse_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty CSV: " + path);
  ErrorCurve curve;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw data_error(path + ": expected 9 fields per row");
    CurvePoint p;
    p.index = static_cast<Eigen::Index>(std::stoll(f[0]));
    p.train_rmse = parse_double_field(f[1]);
    p.test_rmse_mean = parse_double_field(f[2]);
    p.analytic_rmse = parse_double_field(f[3]);
    p.bias2 = parse_double_field(f[4]);
    p.variance = parse_double_field(f[5]);
    p.cond_mean = parse_double_field(f[6]);
    p.test_risk_mean = p.test_rmse_mean * p.test_rmse_mean;
    p.analytic_risk = p.analytic_rmse * p.analytic_rmse;
    curve.trials = std::stol(f[7]);
    curve.seed = std::stoull(f[8]);
    curve.points.push_back(p);
  }
  return curve;
}

void write_coef_csv(const std::vector<CoefSummary>& summaries, long trials,
                    std::uint64_t seed, const std::string& path) {
  if (summaries.empty()) throw data_error("write_coef_csv: no summaries");
  std::ofstream out = open_out(path);
  out << "index,term,true_value,median,q1,q3,whisker_lo,whisker_hi,trials,seed\n";
  for (const CoefSummary& s : summaries) {
    out << s.index << ',' << s.term << ',' << format_double(s.true_value) << ','
        << format_double(s.median) << ',' << format_double(s.q1) << ','
        << format_double(s.q3) << ',' << format_double(s.whisker_lo) << ','
        << format_double(s.whisker_hi) << ',' << trials << ',' << seed << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

void write_lambda_csv(const LambdaSearchResult& result, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "lambda,mean_risk,count\n";
  for (std::size_t k = 0; k < result.lambda_grid.size(); ++k)
    out << format_double(result.lambda_grid[k]) << ','
        << format_double(result.mean_risk[k]) << ',' << result.counts[k] << '\n';
  if (!out) throw data_error("write failed: " + path);
}

void write_heatmap_csv(const HeatmapResult& hm, std::uint64_t seed,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "n0,n_noise,lambda_opt_raw_mean,lambda_opt_norm_mean,formula_raw,trials,seed\n";
  for (Eigen::Index i = 0; i < hm.mean_lambda_raw.rows(); ++i)
    for (Eigen::Index j = 0; j < hm.mean_lambda_raw.cols(); ++j)
      out << hm.n0_grid[i] << ',' << hm.noise_grid[j] << ','
          << format_double(hm.mean_lambda_raw(i, j)) << ','
          << format_double(hm.mean_lambda_norm(i, j)) << ','
          << format_double(hm.formula_raw(i, j)) << ',' << hm.trials << ',' << seed
          << '\n';
  if (!out) throw data_error("write failed: " + path);
}

void write_shrinkage_csv(const std::vector<ShrinkagePoint>& points, Sequence seq,
                         long trials, std::uint64_t seed, const std::string& path) {
  std::ofstream out = open_out(path);
  if (seq == Sequence::I) {
    out << "index,true_block_norm,noise_block_norm,ridge_distance,trials,seed\n";
    for (const auto& p : points)
      out << p.index << ',' << format_double(p.true_block_norm) << ','
          << format_double(p.noise_block_norm) << ','
          << format_double(p.ridge_distance) << ',' << trials << ',' << seed << '\n';
  } else {
    out << "index,coef_norm,ridge_distance,double_shrunk_distance,trials,seed\n";
    for (const auto& p : points)
      out << p.index << ',' << format_double(p.coef_norm) << ','
          << format_double(p.ridge_distance) << ','
          << format_double(p.double_shrunk_distance) << ',' << trials << ',' << seed
          << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

void write_condition_csv(const std::vector<std::pair<Eigen::Index, double>>& points,
                         long trials, std::uint64_t seed, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "index,cond_mean,trials,seed\n";
  for (const auto& [index, cond] : points)
    out << index << ',' << format_double(cond) << ',' << trials << ',' << seed << '\n';
  if (!out) throw data_error("write failed: " + path);
}

} // namespace noisereg
