#include "hdlda/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdlda/errors.hpp"

namespace hdlda {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  for (std::string& s : cells) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
  }
  return cells;
}

std::string where(const std::string& source, std::size_t row, std::size_t col) {
  return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Dataset read_dataset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row");
  const std::vector<std::string> header = split_csv_line(line);

  std::optional<std::size_t> y_col;
  std::vector<std::optional<std::size_t>> feature_col(header.size());
  std::size_t p = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "y") {
      if (y_col) throw DataError(where(source, 1, c + 1) + ": duplicate column 'y'");
      y_col = c;
    } else if (name.size() > 1 && name[0] == 'x') {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || ptr != name.data() + name.size() || index == 0 || name[1] == '0') {
        throw DataError(where(source, 1, c + 1) + ": bad column name '" + name + "'");
      }
      feature_col[c] = index - 1;
      ++p;
    } else {
      throw DataError(where(source, 1, c + 1) + ": bad column name '" + name + "' (expected x1..xp or y)");
    }
  }
  if (!y_col) throw DataError(source + ": missing label column 'y'");
  if (p == 0) throw DataError(source + ": no feature columns");
  std::vector<bool> seen(p, false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!feature_col[c]) continue;
    const std::size_t j = *feature_col[c];
    if (j >= p || seen[j]) {
      throw DataError(where(source, 1, c + 1) + ": feature columns must be x1..x" + std::to_string(p) +
                      " without gaps or repeats");
    }
    seen[j] = true;
  }

  std::vector<std::vector<double>> values;
  std::vector<int> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> x(p);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw DataError(where(source, row, c + 1) + ": invalid or non-finite value '" + cells[c] + "'");
      }
      if (c == *y_col) {
        if (v != 0.0 && v != 1.0) {
          throw DataError(where(source, row, c + 1) + ": label must be 0 or 1, found '" + cells[c] + "'");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        x[*feature_col[c]] = v;
      }
    }
    values.push_back(std::move(x));
  }

  Dataset data;
  data.rows.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) data.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  data.labels = std::move(labels);
  return data;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  return read_dataset(in, path);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const Eigen::Index p = data.dim();
  for (Eigen::Index j = 0; j < p; ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out << format_double(data.rows(i, j)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ostringstream os;
  write_dataset(os, data);
  write_text_file(path, os.str());
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  out << "y\n";
  for (int y : labels) out << y << '\n';
}

void write_bound_rows(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "d,alpha,d0,lower,excess,upper\n";
  for (const BoundRow& r : rows) {
    out << format_double(r.d) << ',' << format_double(r.alpha) << ',' << format_double(r.d0) << ','
        << format_double(r.lower) << ',' << format_double(r.excess) << ',' << format_double(r.upper) << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot write");
    out << text;
    if (!out.flush()) throw DataError(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError(path + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Strict JSON readers
// ---------------------------------------------------------------------------

namespace {

/// Object view that rejects keys outside the allowed set.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context, std::initializer_list<const char*> allowed)
      : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& item : j_.items()) {
      if (!names.count(item.key())) throw ConfigError(context_ + ": unknown key '" + item.key() + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const {
    if (!j_.contains(key)) throw ConfigError(context_ + ": missing key '" + std::string(key) + "'");
    return j_.at(key);
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw bad(key, "a string");
    return v.get<std::string>();
  }
  bool boolean(const char* key) const {
    const json& v = at(key);
    if (!v.is_boolean()) throw bad(key, "true or false");
    return v.get<bool>();
  }
  std::uint64_t uint(const char* key) const { return as_uint(at(key), key); }
  double number(const char* key) const { return as_number(at(key), key); }
  std::vector<std::size_t> uint_list(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw bad(key, "an array of non-negative integers");
    std::vector<std::size_t> out;
    for (const json& e : v) out.push_back(static_cast<std::size_t>(as_uint(e, key)));
    return out;
  }
  std::vector<double> number_list(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw bad(key, "an array of numbers");
    std::vector<double> out;
    for (const json& e : v) out.push_back(as_number(e, key));
    return out;
  }
  std::vector<std::string> string_list(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw bad(key, "an array of strings");
    std::vector<std::string> out;
    for (const json& e : v) {
      if (!e.is_string()) throw bad(key, "an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  /// Runs a parser on a string value, reporting its failure against the key.
  template <class Fn>
  auto parsed(const char* key, Fn&& fn) const {
    const std::string s = string(key);
    try {
      return fn(s);
    } catch (const ContractViolation& e) {
      throw ConfigError(context_ + ": key '" + key + "': " + e.what());
    }
  }

  ConfigError bad(const char* key, const char* expected) const {
    return ConfigError(context_ + ": key '" + std::string(key) + "' must be " + expected);
  }

 private:
  std::uint64_t as_uint(const json& v, const char* key) const {
    if (!v.is_number_unsigned()) throw bad(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }
  double as_number(const json& v, const char* key) const {
    if (!v.is_number()) throw bad(key, "a number");
    return v.get<double>();
  }

  const json& j_;
  std::string context_;
};

json parse_json(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(context + ": invalid JSON: " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  const json j = parse_json(text, "config");
  const StrictObject o(j, "config",
                       {"simulation", "custom_m10", "custom_variances", "n", "p", "procedures", "replicates",
                        "master_seed", "class_sizes", "risk", "split", "mode", "fisher_variance", "fdr_grid",
                        "hc_grid", "cv_folds", "fixed_param", "standardize_fair"});
  ExperimentConfig c;
  c.procedures = all_procedures();
  if (o.has("simulation")) c.simulation = o.parsed("simulation", parse_simulation);
  if (o.has("custom_m10")) c.custom_m10 = o.number_list("custom_m10");
  if (o.has("custom_variances")) c.custom_variances = o.number_list("custom_variances");
  c.ns = o.uint_list("n");
  c.ps = o.uint_list("p");
  if (o.has("procedures")) {
    c.procedures.clear();
    for (const std::string& name : o.string_list("procedures")) {
      try {
        c.procedures.push_back(parse_procedure(name));
      } catch (const ContractViolation& e) {
        throw ConfigError(std::string("config: key 'procedures': ") + e.what());
      }
    }
  }
  if (o.has("replicates")) c.replicates = static_cast<std::size_t>(o.uint("replicates"));
  if (o.has("master_seed")) c.master_seed = o.uint("master_seed");
  if (o.has("class_sizes")) c.class_sizes = o.parsed("class_sizes", parse_class_sizes);
  if (o.has("risk")) c.risk = o.parsed("risk", parse_risk_eval);
  if (o.has("split")) c.fit.split = o.parsed("split", parse_split_mode);
  if (o.has("mode")) c.fit.norm = o.parsed("mode", parse_normalization);
  if (o.has("fisher_variance")) c.fit.fisher_variance = o.parsed("fisher_variance", parse_fisher_variance);
  if (o.has("fdr_grid")) c.fit.fdr_grid = o.number_list("fdr_grid");
  if (o.has("hc_grid")) c.fit.hc_grid = o.number_list("hc_grid");
  if (o.has("standardize_fair")) c.fit.standardize_fair = o.boolean("standardize_fair");
  if (o.has("cv_folds")) c.fit.cv_folds = static_cast<std::size_t>(o.uint("cv_folds"));
  if (o.has("fixed_param") && !o.at("fixed_param").is_null()) c.fit.fixed_param = o.number("fixed_param");
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j;
  j["simulation"] = std::string(to_string(c.simulation));
  j["custom_m10"] = c.custom_m10;
  j["custom_variances"] = c.custom_variances;
  j["n"] = c.ns;
  j["p"] = c.ps;
  json procs = json::array();
  for (Procedure p : c.procedures) procs.push_back(std::string(to_string(p)));
  j["procedures"] = procs;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["class_sizes"] = std::string(to_string(c.class_sizes));
  j["risk"] = to_string(c.risk);
  j["split"] = std::string(to_string(c.fit.split));
  j["mode"] = std::string(to_string(c.fit.norm));
  j["fisher_variance"] = std::string(to_string(c.fit.fisher_variance));
  j["fdr_grid"] = c.fit.fdr_grid;
  j["hc_grid"] = c.fit.hc_grid;
  j["standardize_fair"] = c.fit.standardize_fair;
  j["cv_folds"] = c.fit.cv_folds;
  j["fixed_param"] = c.fit.fixed_param ? json(*c.fit.fixed_param) : json(nullptr);
  return j;
}

json header(const char* kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string bench_report_to_json(const BenchReport& report) {
  json j = header("bench_report");
  j["master_seed"] = report.config.master_seed;
  j["config"] = config_json(report.config);
  j["notes"] = report.notes;
  json cells = json::array();
  for (const CellResult& c : report.cells) {
    json cell;
    cell["n"] = c.n;
    cell["p"] = c.p;
    cell["procedure"] = std::string(to_string(c.procedure));
    cell["replicates"] = c.replicates;
    cell["mean_error_pct"] = c.mean_error_pct;
    cell["std_error_pct"] = c.std_error_pct;
    cell["se_pct"] = c.se_pct;
    cell["bayes_risk_pct"] = c.bayes_risk_pct;
    cell["degenerate_count"] = c.degenerate_count;
    cell["mean_selected"] = c.mean_selected;
    cell["chosen_params"] = c.chosen_params;
    cells.push_back(cell);
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::string prop1_report_to_json(const Prop1Report& r) {
  json j = header("prop1_report");
  j["point"] = r.point;
  j["p"] = r.p;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["norm_f10"] = r.norm_f10;
  j["bound"] = r.bound;
  j["mean_excess"] = r.mean_excess;
  j["se_excess"] = r.se_excess;
  j["mean_clipped_cos"] = r.mean_clipped_cos;
  j["se_cos"] = r.se_cos;
  j["cos_limit"] = r.cos_limit;
  j["excess_ok"] = r.excess_ok;
  j["cos_ok"] = r.cos_ok;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

std::string sandwich_report_to_json(const SandwichReport& r, bool include_rows) {
  json j = header("sandwich_report");
  j["lower_checked"] = r.lower_checked;
  j["upper_checked"] = r.upper_checked;
  j["lower_violations"] = r.lower_violations;
  j["upper_violations"] = r.upper_violations;
  j["max_lower_violation"] = r.max_lower_violation;
  j["max_upper_violation"] = r.max_upper_violation;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  if (include_rows) {
    json rows = json::array();
    for (const BoundRow& b : r.rows) rows.push_back({b.d, b.alpha, b.d0, b.lower, b.excess, b.upper});
    j["rows"] = rows;
  }
  return j.dump(2) + "\n";
}

SimulationSpec parse_simulation_spec(const std::string& text) {
  const json j = parse_json(text, "model spec");
  const StrictObject o(j, "model spec", {"simulation", "custom_m10", "custom_variances", "p", "n0", "n1", "seed"});
  SimulationSpec s;
  if (o.has("simulation")) s.simulation = o.parsed("simulation", parse_simulation);
  if (o.has("custom_m10")) s.custom_m10 = o.number_list("custom_m10");
  if (o.has("custom_variances")) s.custom_variances = o.number_list("custom_variances");
  if (o.has("p")) s.p = static_cast<std::size_t>(o.uint("p"));
  if (o.has("n0")) s.n0 = static_cast<std::size_t>(o.uint("n0"));
  if (o.has("n1")) s.n1 = static_cast<std::size_t>(o.uint("n1"));
  if (o.has("seed")) s.seed = o.uint("seed");
  return s;
}

std::string model_file_to_json(const ModelFile& m) {
  json j = header("linear_rule");
  j["method"] = m.method;
  j["settings"] = m.settings;
  j["param"] = m.param ? json(*m.param) : json(nullptr);
  j["selected"] = m.selected;
  j["direction"] = std::vector<double>(m.rule.direction.data(), m.rule.direction.data() + m.rule.direction.size());
  j["offset"] = std::vector<double>(m.rule.offset.data(), m.rule.offset.data() + m.rule.offset.size());
  return j.dump(2) + "\n";
}

ModelFile parse_model_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file: invalid JSON: ") + e.what());
  }
  try {
    const StrictObject o(j, "model file",
                         {"schema_version", "kind", "method", "settings", "param", "selected", "direction", "offset"});
    if (o.uint("schema_version") != static_cast<std::uint64_t>(kSchemaVersion)) {
      throw DataError("model file: unsupported schema_version");
    }
    if (o.string("kind") != "linear_rule") throw DataError("model file: kind must be 'linear_rule'");
    ModelFile m;
    m.method = o.string("method");
    if (o.has("settings")) {
      if (!o.at("settings").is_object()) throw o.bad("settings", "an object of strings");
      for (const auto& item : o.at("settings").items()) {
        if (!item.value().is_string()) throw o.bad("settings", "an object of strings");
        m.settings[item.key()] = item.value().get<std::string>();
      }
    }
    if (o.has("param") && !o.at("param").is_null()) m.param = o.number("param");
    if (o.has("selected")) m.selected = o.uint_list("selected");
    const std::vector<double> f = o.number_list("direction");
    const std::vector<double> s = o.number_list("offset");
    if (f.size() != s.size() || f.empty()) throw DataError("model file: direction and offset must have equal nonzero length");
    m.rule.direction = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    m.rule.offset = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    return m;
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

}  // namespace hdlda
