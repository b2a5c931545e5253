#include <doctest.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "noisereg/config.hpp"
#include "noisereg/csv.hpp"
#include "noisereg/errors.hpp"
#include "noisereg/snp.hpp"
#include "noisereg/svg.hpp"

using namespace noisereg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal well-formedness check for the SVG we emit: balanced tags and
// quoted attribute values.  Not a general XML parser.
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    std::size_t close = text.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = text.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return false;
    if (tag.front() == '?') continue; // declaration
    bool closing = tag.front() == '/';
    bool self_closing = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    if (self_closing) tag.pop_back();
    std::istringstream ts(tag);
    std::string name;
    ts >> name;
    if (name.empty()) return false;
    // Attribute values must be double-quoted.
    std::size_t eq = tag.find('=');
    while (eq != std::string::npos) {
      std::size_t q = tag.find_first_not_of(' ', eq + 1);
      if (q == std::string::npos || tag[q] != '"') return false;
      std::size_t endq = tag.find('"', q + 1);
      if (endq == std::string::npos) return false;
      eq = tag.find('=', endq + 1);
    }
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

ErrorCurve tiny_curve() {
  ErrorCurve curve;
  curve.sequence = Sequence::I;
  curve.trials = 2;
  curve.seed = 7;
  for (Eigen::Index d : {0, 10, 20, 30, 40}) {
    CurvePoint p;
    p.index = d;
    p.train_rmse = d >= 20 ? 0.0 : 1.0 / (d + 1.0);
    p.test_risk_mean = d == 20 ? 50.0 : 1.0 + 0.01 * static_cast<double>(d);
    p.test_rmse_mean = std::sqrt(p.test_risk_mean);
    p.analytic_risk = d == 20 ? std::numeric_limits<double>::infinity()
                              : p.test_risk_mean;
    p.analytic_rmse = std::sqrt(p.analytic_risk);
    p.cond_mean = 3.0;
    curve.points.push_back(p);
    curve.trial_risks.push_back({p.test_risk_mean, p.test_risk_mean * 1.1});
  }
  return curve;
}

} // namespace

TEST_CASE("minimal config text expands to documented defaults") {
  const RunConfig cfg = parse_config_text("subcommand = seq1-sweep\nseed = 99\n", "t");
  CHECK(cfg.subcommand == Subcommand::seq1_sweep);
  CHECK(cfg.seed == 99);
  CHECK(cfg.trials == 100);
  CHECK(cfg.d0 == 25);
  CHECK(cfg.n0 == 50);
  CHECK(cfg.sigma2 == 0.25);
  CHECK(cfg.grid_min == 0);
  CHECK(cfg.grid_max == 150);
  CHECK(cfg.emit_csv);
  CHECK_FALSE(cfg.emit_svg);
}

TEST_CASE("range violations name the field") {
  const std::string text = "subcommand = seq1-sweep\n[model]\nsigma2 = -1\n";
  try {
    parse_config_text(text, "t");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("sigma2") != std::string::npos);
  }
}

TEST_CASE("duplicate keys are rejected with the line number") {
  const std::string text = "subcommand = seq1-sweep\nseed = 1\nseed = 2\n";
  try {
    parse_config_text(text, "t");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string what = e.what();
    CHECK(what.find("duplicate") != std::string::npos);
    CHECK(what.find("t:3") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config_text("subcommand = seq1-sweep\nbogus = 1\n", "t"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config_text("subcommand = seq1-sweep\n[model]\nwhatever = 2\n", "t"),
      config_error);
}

TEST_CASE("command-line subcommand must match the file") {
  CHECK_THROWS_AS(
      parse_config_text("subcommand = seq1-sweep\n", "t", Subcommand::seq2_sweep),
      config_error);
  const RunConfig ok =
      parse_config_text("seed = 4\n", "t", Subcommand::ridge_heatmap);
  CHECK(ok.subcommand == Subcommand::ridge_heatmap);
  CHECK(ok.trials == 500);
  CHECK(ok.snr == SnrMode::strong);
}

TEST_CASE("comments, sections, and lists parse") {
  const std::string text =
      "# run configuration\n"
      "subcommand = coef-boxplots\n"
      "emit = csv,svg\n"
      "[model]\n"
      "snr = strong   # strong signal\n"
      "[sweep]\n"
      "indices = 10, 20, 40\n";
  const RunConfig cfg = parse_config_text(text, "t");
  CHECK(cfg.snr == SnrMode::strong);
  CHECK(cfg.emit_svg);
  CHECK(cfg.indices == std::vector<Eigen::Index>{10, 20, 40});
  CHECK(cfg.intercept); // boxplot default
}

TEST_CASE("rice analysis requires data paths") {
  CHECK_THROWS_AS(parse_config_text("subcommand = rice-analysis\n", "t"), config_error);
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 123456789.123456789}) {
    CHECK(parse_double_field(format_double(v)) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("curve CSV obeys the schema") {
  ErrorCurve curve = tiny_curve();
  curve.points.resize(1);
  curve.trial_risks.resize(1);
  const std::string path = "/tmp/noisereg_one.csv";
  write_curve_csv(curve, path);
  const std::string text = slurp(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind("index,train_rmse,test_rmse_mean,test_rmse_analytic,bias2,"
                   "variance,cond_mean,trials,seed\n", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("infinite analytic values serialize as the literal inf") {
  const std::string path = "/tmp/noisereg_inf.csv";
  write_curve_csv(tiny_curve(), path);
  const std::string text = slurp(path);
  std::istringstream ss(text);
  std::string line;
  std::getline(ss, line); // header
  bool found = false;
  while (std::getline(ss, line)) {
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields[0] == "20") {
      CHECK(fields[3] == "inf");
      found = true;
    }
  }
  CHECK(found);
  std::remove(path.c_str());
}

TEST_CASE("curve CSV round-trips all numeric fields exactly") {
  const ErrorCurve curve = tiny_curve();
  const std::string path = "/tmp/noisereg_rt.csv";
  write_curve_csv(curve, path);
  const ErrorCurve back = parse_curve_csv(path);
  REQUIRE(back.points.size() == curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(back.points[i].index == curve.points[i].index);
    CHECK(back.points[i].train_rmse == curve.points[i].train_rmse);
    CHECK(back.points[i].test_rmse_mean == curve.points[i].test_rmse_mean);
    const bool both_inf = std::isinf(back.points[i].analytic_rmse) &&
                          std::isinf(curve.points[i].analytic_rmse);
    CHECK((both_inf || back.points[i].analytic_rmse == curve.points[i].analytic_rmse));
  }
  CHECK(back.trials == curve.trials);
  CHECK(back.seed == curve.seed);
  std::remove(path.c_str());
}

TEST_CASE("SVG output is well formed") {
  const std::string path = "/tmp/noisereg_plot.svg";
  CurveSvgOptions opts;
  opts.n0_mark = 20;
  opts.d0_mark = 10;
  opts.null_rmse = 1.118;
  render_curve_svg(tiny_curve(), opts, path);
  const std::string text = slurp(path);
  CHECK(xml_well_formed(text));
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("polyline") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("heatmap SVG is well formed for single-sign data") {
  HeatmapResult hm;
  hm.n0_grid = {10, 20};
  hm.noise_grid = {0, 5};
  hm.mean_lambda_raw.resize(2, 2);
  hm.mean_lambda_raw << 0.5, 0.2, 0.4, 0.1; // all positive
  hm.mean_lambda_norm = hm.mean_lambda_raw / 10.0;
  hm.formula_raw = hm.mean_lambda_raw;
  hm.trials = 5;
  const std::string path = "/tmp/noisereg_hm.svg";
  render_heatmap_svg(hm, path);
  const std::string text = slurp(path);
  CHECK(xml_well_formed(text));
  CHECK(text.find("<rect") != std::string::npos);
  std::remove(path.c_str());
}

namespace {

RawTable synthetic_genotype() {
  // 20 accessions x 6 markers exercising every filter rule:
  //   m1 healthy, m2 50% missing (call rate 0.5), m3 constant zero (MAF 0),
  //   m4 healthy with exactly one missing cell (call rate 0.95, imputed),
  //   m5 constant nonzero (zero variance after imputation), m6 healthy.
  RawTable t;
  t.col_ids = {"m1", "m2", "m3", "m4", "m5", "m6"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd v(20, 6);
  for (int i = 0; i < 20; ++i) {
    v(i, 0) = static_cast<double>(i % 3);
    v(i, 1) = i < 10 ? nan : 1.0;
    v(i, 2) = 0.0;
    v(i, 3) = i == 7 ? nan : static_cast<double>((i + 1) % 3);
    v(i, 4) = 1.0;
    v(i, 5) = static_cast<double>((2 * i) % 3);
  }
  t.values = v;
  for (int i = 0; i < 20; ++i) t.row_ids.push_back("acc" + std::to_string(i));
  return t;
}

std::unordered_map<std::string, double> synthetic_phenotype() {
  std::unordered_map<std::string, double> p;
  for (int i = 0; i < 20; ++i) p["acc" + std::to_string(i)] = static_cast<double>(i % 4);
  return p;
}

} // namespace

TEST_CASE("snp ingestion applies every filter rule") {
  const SnpDataset data =
      snp_ingest_tables(synthetic_genotype(), synthetic_phenotype(), 0.95, 0.05, 1);
  // m2 fails the call rate, m3 fails MAF, m5 is constant after imputation.
  CHECK(data.provenance.input_markers == 6);
  CHECK(data.provenance.dropped_call_rate == 1);
  CHECK(data.provenance.dropped_maf == 1);
  CHECK(data.provenance.dropped_zero_variance == 1);
  CHECK(data.provenance.imputed_cells == 1);
  CHECK(data.genotype.cols() == 3);
  CHECK(data.marker_ids == std::vector<std::string>{"m1", "m4", "m6"});

  // Standardization: mean 0, unit sample sd, centered phenotype.
  for (Eigen::Index j = 0; j < data.genotype.cols(); ++j) {
    const auto col = data.genotype.col(j);
    CHECK(std::abs(col.mean()) < 1e-8);
    const double sd = std::sqrt(col.squaredNorm() / (col.size() - 1.0));
    CHECK(std::abs(sd - 1.0) < 1e-8);
  }
  CHECK(std::abs(data.phenotype.mean()) < 1e-8);
}

TEST_CASE("thinning keeps every k-th surviving marker") {
  RawTable t;
  t.col_ids = {"a", "b", "c", "d", "e", "f", "g"};
  RngStream rng(5);
  t.values.resize(12, 7);
  for (Eigen::Index j = 0; j < 7; ++j)
    for (Eigen::Index i = 0; i < 12; ++i)
      t.values(i, j) = static_cast<double>(rng.uniform_below(3));
  for (int i = 0; i < 12; ++i) t.row_ids.push_back("r" + std::to_string(i));
  std::unordered_map<std::string, double> pheno;
  for (int i = 0; i < 12; ++i) pheno["r" + std::to_string(i)] = i;
  const SnpDataset data = snp_ingest_tables(t, pheno, 0.0, 0.0, 3);
  CHECK(data.marker_ids == std::vector<std::string>{"a", "d", "g"});
  CHECK(data.provenance.dropped_thinning == 4);
}

TEST_CASE("re-standardizing an ingested table changes nothing") {
  const SnpDataset first =
      snp_ingest_tables(synthetic_genotype(), synthetic_phenotype(), 0.95, 0.05, 1);
  RawTable again;
  again.col_ids = first.marker_ids;
  again.row_ids = first.accession_ids;
  again.values = first.genotype;
  std::unordered_map<std::string, double> pheno;
  for (std::size_t i = 0; i < first.accession_ids.size(); ++i)
    pheno[first.accession_ids[i]] = first.phenotype(static_cast<Eigen::Index>(i));
  const SnpDataset second = snp_ingest_tables(again, pheno, 0.0, 0.0, 1);
  CHECK((second.genotype - first.genotype).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((second.phenotype - first.phenotype).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("missing phenotype ids are a data error") {
  auto pheno = synthetic_phenotype();
  pheno.erase("acc3");
  CHECK_THROWS_AS(snp_ingest_tables(synthetic_genotype(), pheno, 0.95, 0.05, 1),
                  data_error);
}

TEST_CASE("delimited reader handles tabs and missing tokens") {
  const std::string path = "/tmp/noisereg_tab.tsv";
  {
    std::ofstream out(path);
    out << "id\tm1\tm2\n";
    out << "r1\t1\tNA\n";
    out << "r2\t0\t2\n";
  }
  const RawTable t = read_delimited(path);
  CHECK(t.col_ids == std::vector<std::string>{"m1", "m2"});
  CHECK(t.values(0, 0) == 1.0);
  CHECK(std::isnan(t.values(0, 1)));
  CHECK(t.values(1, 1) == 2.0);
  std::remove(path.c_str());
}

TEST_CASE("ragged rows are a data error") {
  const std::string path = "/tmp/noisereg_ragged.csv";
  {
    std::ofstream out(path);
    out << "id,m1,m2\nr1,1\n";
  }
  CHECK_THROWS_AS(read_delimited(path), data_error);
  std::remove(path.c_str());
}

TEST_CASE("rice experiment basics on a synthetic dataset") {
  // 60 accessions, 40 standardized markers, sparse signal on the first 4.
  RngStream rng(31);
  RawTable t;
  for (int j = 0; j < 40; ++j) t.col_ids.push_back("m" + std::to_string(j));
  Eigen::MatrixXd raw(60, 40);
  for (int j = 0; j < 40; ++j)
    for (int i = 0; i < 60; ++i)
      raw(i, j) = static_cast<double>(rng.uniform_below(3));
  t.values = raw;
  for (int i = 0; i < 60; ++i) t.row_ids.push_back("a" + std::to_string(i));
  std::unordered_map<std::string, double> pheno;
  for (int i = 0; i < 60; ++i) {
    double signal = 0.0;
    for (int j = 0; j < 4; ++j) signal += raw(i, j);
    pheno["a" + std::to_string(i)] = signal + 0.3 * rng.normal();
  }
  const SnpDataset data = snp_ingest_tables(t, pheno, 0.9, 0.01, 1);
  REQUIRE(data.genotype.cols() > 30);

  const ErrorCurve curve = rice_experiment(data, 50, 20, 99, 5);
  REQUIRE(curve.points.size() > 3);
  // Intercept-only test RMSE is about the phenotype standard deviation.
  const double sd = std::sqrt(data.phenotype.squaredNorm() / (data.phenotype.size() - 1.0));
  CHECK(curve.points.front().test_rmse_mean == doctest::Approx(sd).epsilon(0.2));
  // With signal in the leading markers, early fits beat the intercept.
  CHECK(curve.points[1].test_rmse_mean < curve.points.front().test_rmse_mean);
  // Reruns are identical.
  const ErrorCurve again = rice_experiment(data, 50, 20, 99, 5);
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    CHECK(curve.points[i].test_rmse_mean == again.points[i].test_rmse_mean);
}

TEST_CASE("rice experiment validates its arguments") {
  const SnpDataset data =
      snp_ingest_tables(synthetic_genotype(), synthetic_phenotype(), 0.95, 0.05, 1);
  CHECK_THROWS_AS(rice_experiment(data, 20, 5, 1), config_error); // no test rows left
  CHECK_THROWS_AS(rice_experiment(data, 0, 5, 1), config_error);
  CHECK_THROWS_AS(rice_experiment(data, 10, 0, 1), config_error);
}
