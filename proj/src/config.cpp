#include "noisereg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "noisereg/errors.hpp"

namespace noisereg {

std::string subcommand_name(Subcommand sc) {
  switch (sc) {
    case Subcommand::seq1_sweep: return "seq1-sweep";
    case Subcommand::seq2_sweep: return "seq2-sweep";
    case Subcommand::bias_variance: return "bias-variance";
    case Subcommand::coef_boxplots: return "coef-boxplots";
    case Subcommand::ridge_heatmap: return "ridge-heatmap";
    case Subcommand::shrinkage_trace: return "shrinkage-trace";
    case Subcommand::condition_sweep: return "condition-sweep";
    case Subcommand::rice_analysis: return "rice-analysis";
  }
  return "?";
}

std::optional<Subcommand> subcommand_from_name(const std::string& name) {
  static const std::map<std::string, Subcommand> table = {
      {"seq1-sweep", Subcommand::seq1_sweep},
      {"seq2-sweep", Subcommand::seq2_sweep},
      {"bias-variance", Subcommand::bias_variance},
      {"coef-boxplots", Subcommand::coef_boxplots},
      {"ridge-heatmap", Subcommand::ridge_heatmap},
      {"shrinkage-trace", Subcommand::shrinkage_trace},
      {"condition-sweep", Subcommand::condition_sweep},
      {"rice-analysis", Subcommand::rice_analysis},
  };
  const auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

RunConfig default_config(Subcommand sc) {
  RunConfig c;
  c.subcommand = sc;
  switch (sc) {
    case Subcommand::seq1_sweep:
      break; // struct defaults replicate the n0=50, d0=25 setting
    case Subcommand::bias_variance:
      c.test_points = 5000;
      break;
    case Subcommand::seq2_sweep:
      c.sequence = Sequence::II;
      c.d0 = 15;
      c.n0 = 15;
      c.grid_min = 1;
      c.grid_max = 90;
      break;
    case Subcommand::coef_boxplots:
      c.d0 = 50;
      c.n0 = 50;
      c.intercept = true;
      c.trials = 1000;
      c.indices = {25, 75, 100, 300};
      c.grid_min = 1;
      c.grid_max = 300;
      break;
    case Subcommand::ridge_heatmap:
      c.sequence = Sequence::II;
      c.d0 = 30;
      c.snr = SnrMode::strong;
      c.trials = 500;
      c.n0_grid = {60, 100, 150, 200, 250};
      c.noise_grid = {0, 10, 25, 50, 100};
      break;
    case Subcommand::shrinkage_trace:
      c.d0 = 20;
      c.n0 = 50;
      c.trials = 50;
      c.delta = 0.25;
      c.nu = 0.25;
      c.grid_min = 0; // grid built from the explicit doubling list below
      c.indices = {250, 500, 1000, 2000};
      break;
    case Subcommand::condition_sweep:
      c.d0 = 25;
      c.n0 = 25;
      c.grid_min = 1;
      c.grid_max = 75;
      break;
    case Subcommand::rice_analysis:
      break;
  }
  return c;
}

std::vector<Eigen::Index> RunConfig::make_grid() const {
  if (subcommand == Subcommand::shrinkage_trace && !indices.empty())
    return indices;
  std::vector<Eigen::Index> g;
  for (Eigen::Index v = grid_min; v <= grid_max; v += grid_step) g.push_back(v);
  return g;
}

ModelConfig RunConfig::model() const {
  return make_model_config(d0, n0, sigma2, snr, seed, intercept, noise_response);
}

SweepConfig RunConfig::sweep() const {
  SweepConfig s;
  s.model = model();
  s.sequence = sequence;
  s.grid = make_grid();
  s.trials = trials;
  s.test_points = test_points;
  s.delta = delta;
  s.nu = nu;
  s.trace_lambda = trace_lambda;
  s.max_true_terms = max_true_terms;
  s.max_noise_terms = max_noise_terms;
  return s;
}

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

struct RawConfig {
  // Keyed by "section.key"; top-level keys use an empty section.
  std::map<std::string, RawEntry> entries;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(const std::string& origin, int line, const std::string& msg) {
  throw config_error(origin + ":" + std::to_string(line) + ": " + msg);
}

RawConfig lex_config(const std::string& text, const std::string& origin) {
  static const std::set<std::string> sections = {"model", "sweep", "data"};
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_line(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section))
        fail_line(origin, lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_line(origin, lineno, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(origin, lineno, "empty key");
    if (value.empty()) fail_line(origin, lineno, "empty value for key `" + key + "`");
    const std::string full = section.empty() ? key : section + "." + key;
    if (raw.entries.count(full))
      fail_line(origin, lineno, "duplicate key `" + full + "`");
    raw.entries[full] = {value, lineno};
  }
  return raw;
}

class ConfigReader {
public:
  ConfigReader(RawConfig raw, std::string origin)
      : raw_(std::move(raw)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return raw_.entries.count(key) > 0; }

  std::optional<std::string> take(const std::string& key) {
    const auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second.value;
  }

  template <typename T, typename Parse>
  void read(const std::string& key, T& out, Parse parse) {
    const auto v = take(key);
    if (!v) return;
    out = parse(key, *v);
  }

  void finish() const {
    for (const auto& [key, entry] : raw_.entries)
      if (!consumed_.count(key))
        fail_line(origin_, entry.line, "unknown key `" + key + "`");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = raw_.entries.find(key);
    const int line = it == raw_.entries.end() ? 0 : it->second.line;
    fail_line(origin_, line, "key `" + key + "`: " + msg);
  }

private:
  RawConfig raw_;
  std::string origin_;
  std::set<std::string> consumed_;
};

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            std::optional<Subcommand> forced) {
  ConfigReader reader(lex_config(text, origin), origin);

  // The subcommand decides the defaults, so resolve it first.
  std::optional<Subcommand> sc = forced;
  if (const auto name = reader.take("subcommand")) {
    const auto parsed = subcommand_from_name(*name);
    if (!parsed) reader.fail("subcommand", "unknown subcommand `" + *name + "`");
    if (forced && *parsed != *forced)
      reader.fail("subcommand", "file says `" + *name + "` but the command line chose `" +
                                    subcommand_name(*forced) + "`");
    sc = parsed;
  }
  if (!sc) throw config_error(origin + ": no subcommand given (file or command line)");
  RunConfig cfg = default_config(*sc);

  auto parse_long = [&](long lo, long hi) {
    return [&reader, lo, hi](const std::string& key, const std::string& v) -> long {
      long out{};
      const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
      if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        reader.fail(key, "expected an integer, got `" + v + "`");
      if (out < lo || out > hi)
        reader.fail(key, "value " + v + " out of range [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
      return out;
    };
  };
  auto parse_index = [&](long lo, long hi) {
    auto p = parse_long(lo, hi);
    return [p](const std::string& key, const std::string& v) -> Eigen::Index {
      return static_cast<Eigen::Index>(p(key, v));
    };
  };
  auto parse_u64 = [&](const std::string& key, const std::string& v) -> std::uint64_t {
    std::uint64_t out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
      reader.fail(key, "expected an unsigned integer, got `" + v + "`");
    return out;
  };
  auto parse_double = [&](double lo, double hi, bool lo_open) {
    return [&reader, lo, hi, lo_open](const std::string& key, const std::string& v) -> double {
      double out{};
      const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
      if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        reader.fail(key, "expected a number, got `" + v + "`");
      if (out < lo || out > hi || (lo_open && out == lo))
        reader.fail(key, "value " + v + " out of range");
      return out;
    };
  };
  auto parse_bool = [&](const std::string& key, const std::string& v) -> bool {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    reader.fail(key, "expected true/false, got `" + v + "`");
  };
  auto parse_string = [](const std::string&, const std::string& v) { return v; };
  auto parse_index_list = [&](const std::string& key, const std::string& v) {
    std::vector<Eigen::Index> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      long value{};
      const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
      if (res.ec != std::errc{} || res.ptr != item.data() + item.size() || value < 0)
        reader.fail(key, "expected a comma-separated list of nonnegative integers");
      out.push_back(static_cast<Eigen::Index>(value));
    }
    if (out.empty()) reader.fail(key, "empty list");
    return out;
  };

  reader.read("seed", cfg.seed, parse_u64);
  reader.read("out_dir", cfg.out_dir, parse_string);
  reader.read("trials", cfg.trials, parse_long(1, 100000000));
  if (const auto emit = reader.take("emit")) {
    cfg.emit_csv = false;
    cfg.emit_svg = false;
    std::istringstream ss(*emit);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "csv") cfg.emit_csv = true;
      else if (item == "svg") cfg.emit_svg = true;
      else reader.fail("emit", "expected a list drawn from {csv, svg}");
    }
  }

  reader.read("model.d0", cfg.d0, parse_index(1, 1000000));
  reader.read("model.n0", cfg.n0, parse_index(1, 1000000));
  reader.read("model.sigma2", cfg.sigma2, parse_double(0.0, 1e12, /*lo_open=*/true));
  if (const auto snr = reader.take("model.snr")) {
    if (*snr == "weak") cfg.snr = SnrMode::weak;
    else if (*snr == "strong") cfg.snr = SnrMode::strong;
    else reader.fail("model.snr", "expected weak or strong");
  }
  reader.read("model.intercept", cfg.intercept, parse_bool);
  if (const auto nr = reader.take("model.noise_response")) {
    if (*nr == "zero") cfg.noise_response = NoiseResponse::zero;
    else if (*nr == "gaussian") cfg.noise_response = NoiseResponse::gaussian;
    else reader.fail("model.noise_response", "expected zero or gaussian");
  }

  if (const auto seq = reader.take("sweep.sequence")) {
    if (*seq == "I" || *seq == "1") cfg.sequence = Sequence::I;
    else if (*seq == "II" || *seq == "2") cfg.sequence = Sequence::II;
    else reader.fail("sweep.sequence", "expected I or II");
  }
  reader.read("sweep.grid_min", cfg.grid_min, parse_index(0, 100000000));
  reader.read("sweep.grid_max", cfg.grid_max, parse_index(0, 100000000));
  reader.read("sweep.grid_step", cfg.grid_step, parse_index(1, 100000000));
  reader.read("sweep.test_points", cfg.test_points, parse_long(0, 100000000));
  reader.read("sweep.indices", cfg.indices, parse_index_list);
  reader.read("sweep.delta", cfg.delta, parse_double(0.0, 0.999, false));
  reader.read("sweep.nu", cfg.nu, parse_double(0.0, 0.999, false));
  reader.read("sweep.trace_lambda", cfg.trace_lambda, parse_double(-1e12, 1e12, false));
  reader.read("sweep.lambda_points", cfg.lambda_points,
              [&](const std::string& key, const std::string& v) {
                return static_cast<int>(parse_long(3, 100001)(key, v));
              });
  reader.read("sweep.n0_grid", cfg.n0_grid, parse_index_list);
  reader.read("sweep.noise_grid", cfg.noise_grid, parse_index_list);
  reader.read("sweep.max_true_terms", cfg.max_true_terms, parse_index(1, 1000000));
  reader.read("sweep.max_noise_terms", cfg.max_noise_terms, parse_index(0, 1000000));

  reader.read("data.genotype", cfg.genotype_path, parse_string);
  reader.read("data.phenotype", cfg.phenotype_path, parse_string);
  reader.read("data.call_rate_min", cfg.call_rate_min, parse_double(0.0, 1.0, false));
  reader.read("data.maf_min", cfg.maf_min, parse_double(0.0, 0.5, false));
  reader.read("data.thin_stride", cfg.thin_stride, parse_long(1, 1000000));
  reader.read("data.train_size", cfg.train_size, parse_long(1, 100000000));
  reader.read("data.repeats", cfg.repeats, parse_long(1, 100000000));
  reader.read("data.d_step", cfg.d_step, parse_long(1, 100000000));
  reader.read("data.d_max", cfg.d_max, parse_index(0, 100000000));

  reader.finish();

  if (cfg.grid_min > cfg.grid_max)
    throw config_error(origin + ": grid_min exceeds grid_max");
  if (cfg.subcommand == Subcommand::rice_analysis) {
    if (cfg.genotype_path.empty())
      throw config_error(origin + ": rice-analysis requires data.genotype");
    if (cfg.phenotype_path.empty())
      throw config_error(origin + ": rice-analysis requires data.phenotype");
  }
  return cfg;
}

RunConfig parse_config(const std::string& path, std::optional<Subcommand> forced) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path, forced);
}

std::string config_reference() {
  return
      "Config file: `key = value` lines, `#` comments, sections [model], [sweep], [data].\n"
      "Top level:\n"
      "  subcommand        one of seq1-sweep seq2-sweep bias-variance coef-boxplots\n"
      "                    ridge-heatmap shrinkage-trace condition-sweep rice-analysis\n"
      "  seed              master seed (default 20250809)\n"
      "  out_dir           output directory (default .)\n"
      "  trials            Monte Carlo trials (defaults: sweeps 100, boxplots 1000,\n"
      "                    heatmap 500, shrinkage trace 50)\n"
      "  emit              csv,svg (default csv)\n"
      "[model]\n"
      "  d0, n0            true model size (defaults per subcommand)\n"
      "  sigma2            error variance > 0 (default 0.25)\n"
      "  snr               weak (beta normalized to unit norm) | strong (default weak;\n"
      "                    ridge-heatmap defaults to strong)\n"
      "  intercept         fit an intercept column (default false; boxplots true)\n"
      "  noise_response    zero | gaussian responses for noise observations (default zero)\n"
      "[sweep]\n"
      "  sequence          I (add predictors) | II (add observations)\n"
      "  grid_min/max/step index grid (defaults: I 0..150 step 1, II 1..90 step 1)\n"
      "  test_points       >0 adds bias/variance columns (bias-variance: 5000)\n"
      "  indices           comma list; boxplot indices or shrinkage-trace grid\n"
      "  delta             d0/d ratio target for sequence-I rate traces (default 0;\n"
      "                    shrinkage-trace defaults to 0.25)\n"
      "  nu                n0/n ratio target for sequence-II rate traces and the\n"
      "                    double-shrinkage trace (default 0; shrinkage-trace 0.25)\n"
      "  trace_lambda      ridge lambda for that trace (default 0.1)\n"
      "  lambda_points     lambda grid size for heatmap search (default 201)\n"
      "  n0_grid,noise_grid  heatmap axes (defaults 60,100,150,200,250 / 0,10,25,50,100)\n"
      "  max_true_terms,max_noise_terms  boxplot term caps (60 / 9)\n"
      "[data] (rice-analysis)\n"
      "  genotype, phenotype   delimited text files (required)\n"
      "  call_rate_min     drop markers below this call rate (default 0.95)\n"
      "  maf_min           drop markers below this minor allele frequency (default 0.05)\n"
      "  thin_stride       keep every k-th surviving marker (default 5)\n"
      "  train_size        training accessions per repeat (default 300)\n"
      "  repeats           random splits (default 100)\n"
      "  d_step            marker-count step along the curve (default 5)\n"
      "  d_max             largest marker count (default 0 = all)\n";
}

} // namespace noisereg
