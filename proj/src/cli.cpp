#include "hdlda/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "hdlda/bench.hpp"
#include "hdlda/errors.hpp"
#include "hdlda/io.hpp"
#include "hdlda/procedures.hpp"

namespace hdlda {

namespace {

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct SimulateArgs {
  std::string config;
  std::string simulation = "sim1";
  std::size_t p = 100;
  std::size_t n0 = 25;
  std::size_t n1 = 25;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct FitArgs {
  std::string data;
  std::string method = "fdr";
  std::string mode = "paper";
  std::string split = "half";
  std::string fisher_variance = "global";
  std::optional<double> param;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
};

struct BenchArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::size_t threads = 1;
  std::string mode;
  std::string split;
  std::string risk;
  std::string out;
};

struct VerifyArgs {
  bool prop1 = false;
  bool sandwich = false;
  int point = 1;
  std::size_t p = 200;
  std::size_t n = 50;
  std::size_t reps = 500;
  double norm_f10 = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool rows = false;
  std::string out;
};

struct BoundsArgs {
  std::string out;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  SimulationSpec spec;
  if (!a.config.empty()) {
    spec = parse_simulation_spec(read_text_file(a.config));
  } else {
    try {
      spec.simulation = parse_simulation(a.simulation);
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("--sim: ") + e.what());
    }
    spec.p = a.p;
    spec.n0 = a.n0;
    spec.n1 = a.n1;
  }
  if (a.seed) spec.seed = *a.seed;
  ExperimentConfig cfg;
  cfg.simulation = spec.simulation;
  cfg.custom_m10 = spec.custom_m10;
  cfg.custom_variances = spec.custom_variances;
  cfg.ns = {2};
  cfg.ps = {spec.p};
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }
  const GaussianPair model = make_model(cfg, spec.p);
  RngStream stream(spec.seed);
  const Dataset data = sample(model, spec.n0, spec.n1, stream);
  std::ostringstream os;
  write_dataset(os, data);
  emit(os.str(), a.out, out);
  return kExitOk;
}

int run_fit(const FitArgs& a, std::ostream& out) {
  ProcedureOptions options;
  Procedure proc;
  try {
    proc = parse_procedure(a.method);
    options.norm = parse_normalization(a.mode);
    options.split = parse_split_mode(a.split);
    options.fisher_variance = parse_fisher_variance(a.fisher_variance);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (proc == Procedure::bayes) throw ConfigError("--method: bayes needs the true model and cannot be fitted from data");
  options.fixed_param = a.param;
  options.cv_folds = a.cv_folds;
  const Dataset data = read_dataset(a.data);
  try {
    data.validate();
  } catch (const ContractViolation& e) {
    throw DataError(a.data + ": " + e.what());
  }
  RngStream stream(a.seed);
  const FitResult fit = fit_procedure(proc, data, options, stream);

  ModelFile m;
  m.rule = fit.rule;
  m.method = std::string(to_string(proc));
  m.settings["mode"] = std::string(to_string(options.norm));
  m.settings["split"] = std::string(to_string(options.split));
  if (proc == Procedure::fisher) m.settings["fisher_variance"] = std::string(to_string(options.fisher_variance));
  m.settings["seed"] = std::to_string(a.seed);
  m.param = fit.chosen_param;
  if (fit.selection) m.selected = fit.selection->indices;
  emit(model_file_to_json(m), a.out, out);
  return kExitOk;
}

int run_predict(const PredictArgs& a, std::ostream& out) {
  const ModelFile m = parse_model_file(read_text_file(a.model));
  const Dataset data = read_dataset(a.data);
  if (data.size() > 0 && data.dim() != m.rule.dim()) {
    throw DataError(a.data + ": has " + std::to_string(data.dim()) + " features, the model expects " +
                    std::to_string(m.rule.dim()));
  }
  std::vector<int> labels;
  if (data.size() > 0) labels = predict(m.rule, data.rows);
  std::ostringstream os;
  write_labels(os, labels);
  emit(os.str(), a.out, out);
  return kExitOk;
}

int run_bench(const BenchArgs& a, std::ostream& out) {
  ExperimentConfig cfg = parse_experiment_config(read_text_file(a.config));
  try {
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.replicates) cfg.replicates = *a.replicates;
    if (!a.mode.empty()) cfg.fit.norm = parse_normalization(a.mode);
    if (!a.split.empty()) cfg.fit.split = parse_split_mode(a.split);
    if (!a.risk.empty()) cfg.risk = parse_risk_eval(a.risk);
    cfg.threads = a.threads;
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  emit(bench_report_to_json(run_table(cfg)), a.out, out);
  return kExitOk;
}

int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.prop1 == a.sandwich) throw ConfigError("verify: pass exactly one of --prop1 or --sandwich");
  if (a.sandwich) {
    const SandwichReport rep = sandwich_sweep(SandwichGrids::defaults());
    emit(sandwich_report_to_json(rep, a.rows), a.out, out);
    err << (rep.pass ? "PASS" : "FAIL") << " sandwich: " << rep.lower_violations << " lower and "
        << rep.upper_violations << " upper violations\n";
    return rep.pass ? kExitOk : kExitVerifyFail;
  }
  if (a.point != 1 && a.point != 2) throw ConfigError("--point must be 1 or 2");
  if (a.p < 3 || a.n < 3 || a.reps < 2) throw ConfigError("verify: need p >= 3, n >= 3, reps >= 2");
  if (!(a.norm_f10 > 0.0)) throw ConfigError("--norm-f10 must be positive");
  const Prop1Report rep = verify_prop1(a.point, prop1_model(a.p, a.norm_f10), a.n, a.reps, a.seed, a.threads);
  emit(prop1_report_to_json(rep), a.out, out);
  err << (rep.pass ? "PASS" : "FAIL") << " inconsistency point " << rep.point << ": mean excess " << rep.mean_excess
      << " vs bound " << rep.bound << "\n";
  return rep.pass ? kExitOk : kExitVerifyFail;
}

int run_bounds(const BoundsArgs& a, std::ostream& out) {
  const SandwichGrids g = SandwichGrids::defaults();
  std::ostringstream os;
  write_bound_rows(os, bounds_grid(g.d, g.alpha, g.d0));
  emit(os.str(), a.out, out);
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse high-dimensional linear discriminant analysis: fitting, simulation and benchmarks", "hdlda"};
  app.require_subcommand(1, 1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a labelled dataset from a two-class Gaussian model (CSV)");
  simulate->add_option("--config", sim.config, "Model spec JSON (simulation, custom_m10, custom_variances, p, n0, n1, seed)");
  simulate->add_option("--sim", sim.simulation, "sim1 | sim2 | sim2_literal");
  simulate->add_option("--p", sim.p, "Dimension")->check(CLI::Range(4, 100000000));
  simulate->add_option("--n0", sim.n0, "Class-0 rows");
  simulate->add_option("--n1", sim.n1, "Class-1 rows");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out, "Output CSV (default stdout)");

  FitArgs fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit a classifier to a CSV dataset and write a model file");
  fitcmd->add_option("data,--data", fit.data, "Training CSV")->required();
  fitcmd->add_option("--method", fit.method, "fisher | universal | fdr | student | fair | hc");
  fitcmd->add_option("--mode", fit.mode, "Threshold normalization: paper | exact");
  fitcmd->add_option("--split", fit.split, "Sample split: half | none");
  fitcmd->add_option("--fisher-variance", fit.fisher_variance, "global | within_class");
  fitcmd->add_option("--param", fit.param, "Fixed gamma (fdr, student) or q (hc); skips cross-validation");
  fitcmd->add_option("--folds", fit.cv_folds, "Cross-validation folds")->check(CLI::Range(2, 1000000));
  fitcmd->add_option("--seed", fit.seed, "Seed for the cross-validation folds");
  fitcmd->add_option("--out", fit.out, "Output model JSON (default stdout)");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Label the rows of a CSV with a fitted model");
  predict_cmd->add_option("--model", pred.model, "Model JSON")->required();
  predict_cmd->add_option("data,--data", pred.data, "CSV to label (a y column is required and ignored)")->required();
  predict_cmd->add_option("--out", pred.out, "Output labels (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte Carlo experiment grid and write a JSON report");
  bench_cmd->add_option("--config", bench.config, "Experiment config JSON")->required();
  bench_cmd->add_option("--seed", bench.seed, "Override master_seed");
  bench_cmd->add_option("--replicates", bench.replicates, "Override replicates");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 4096));
  bench_cmd->add_option("--mode", bench.mode, "Override mode: paper | exact");
  bench_cmd->add_option("--split", bench.split, "Override split: half | none");
  bench_cmd->add_option("--risk", bench.risk, "Override risk: closed | test:SIZE");
  bench_cmd->add_option("--out", bench.out, "Output report JSON (default stdout)");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Check the inconsistency bounds or the excess-risk sandwich");
  verify_cmd->add_flag("--prop1", ver.prop1, "Inconsistency of the full-covariance plug-in rules");
  verify_cmd->add_flag("--sandwich", ver.sandwich, "Lower/upper excess-risk bounds on the default grid");
  verify_cmd->add_option("--point", ver.point, "1: estimated covariance, 2: noisy mean gap");
  verify_cmd->add_option("--p", ver.p, "Dimension");
  verify_cmd->add_option("--n", ver.n, "Sample size");
  verify_cmd->add_option("--reps", ver.reps, "Monte Carlo replicates");
  verify_cmd->add_option("--norm-f10", ver.norm_f10, "Length of the Bayes direction");
  verify_cmd->add_option("--seed", ver.seed, "RNG seed");
  verify_cmd->add_option("--threads", ver.threads, "Worker threads")->check(CLI::Range(1, 4096));
  verify_cmd->add_flag("--rows", ver.rows, "Include the grid rows in the sandwich report");
  verify_cmd->add_option("--out", ver.out, "Output report JSON (default stdout)");

  BoundsArgs bnd;
  auto* bounds_cmd = app.add_subcommand("bounds", "Write the (d, alpha, d0, lower, excess, upper) grid as CSV");
  bounds_cmd->add_option("--out", bnd.out, "Output CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, out);
    if (fitcmd->parsed()) return run_fit(fit, out);
    if (predict_cmd->parsed()) return run_predict(pred, out);
    if (bench_cmd->parsed()) return run_bench(bench, out);
    if (verify_cmd->parsed()) return run_verify(ver, out, err);
    if (bounds_cmd->parsed()) return run_bounds(bnd, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InsufficientData& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace hdlda
