#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hdlda/model.hpp"
#include "hdlda/procedures.hpp"

namespace hdlda {

/// Built-in simulation designs.
///   sim1          mu0 = 0, mu1 = 3 e_4, C = I
///   sim2          mu0 = 0, mu1[1:4] = (0.01, 0.5, 0.02, 0.5), C diagonal with
///                 variances alternating 1e-4, 4 (Bayes risk 12.88%)
///   sim2_literal  mu1[1:4] = (0.01, 0.5, 0.02, 0.5) / 3, variances
///                 alternating 0.01, 2 (Bayes risk ~46%)
///   custom        leading mean gap and a cycled variance pattern from the config
enum class Simulation { sim1, sim2, sim2_literal, custom };
std::string_view to_string(Simulation s);
Simulation parse_simulation(std::string_view s);

/// How the per-cell sample size n maps to class sizes.
///   total:     n0 = n1 = n/2 (n0 = floor(n/2), n1 = n - n0)
///   per_class: n0 = n1 = n
enum class ClassSizes { total, per_class };
std::string_view to_string(ClassSizes c);
ClassSizes parse_class_sizes(std::string_view s);

/// Error metric of a fitted rule: exact conditional risk, or empirical error
/// on a fresh balanced test sample of the given size.
struct RiskEval {
  enum class Mode { closed_form, test_set } mode = Mode::closed_form;
  std::size_t test_size = 0;
};
/// "closed" or "test:SIZE". Throws ContractViolation otherwise.
RiskEval parse_risk_eval(std::string_view s);
std::string to_string(const RiskEval& r);

struct ExperimentConfig {
  Simulation simulation = Simulation::sim1;
  std::vector<double> custom_m10;        // leading entries of mu1 - mu0 (custom only)
  std::vector<double> custom_variances;  // cycled over features (custom only)
  std::vector<std::size_t> ns;
  std::vector<std::size_t> ps;
  std::vector<Procedure> procedures;
  std::size_t replicates = 100;
  std::uint64_t master_seed = 0;
  ClassSizes class_sizes = ClassSizes::total;
  RiskEval risk;
  ProcedureOptions fit;
  /// Worker threads; results never depend on it and it is not echoed in reports.
  std::size_t threads = 1;

  /// Throws ContractViolation on an inconsistent configuration.
  void validate() const;
};

/// The model of a simulation design at dimension p.
GaussianPair make_model(const ExperimentConfig& config, std::size_t p);
GaussianPair make_simulation(Simulation sim, std::size_t p);

struct CellResult {
  std::size_t n = 0;
  std::size_t p = 0;
  Procedure procedure = Procedure::bayes;
  std::size_t replicates = 0;
  double mean_error_pct = 0.0;
  double std_error_pct = 0.0;  // standard deviation across replicates
  double se_pct = 0.0;         // standard error of the mean
  double bayes_risk_pct = 0.0;
  std::size_t degenerate_count = 0;
  double mean_selected = 0.0;  // mean |I| (thresholding procedures), else p
  std::map<std::string, std::size_t> chosen_params;  // CV choices, keyed by value
};

struct BenchReport {
  static constexpr int kSchemaVersion = 1;
  ExperimentConfig config;
  std::vector<CellResult> cells;
  std::vector<std::string> notes;
};

/// Replicate r of cell (n, p, procedure) draws its training data from
/// derive_seed(master_seed, {n, p, r}); the data is shared by all
/// procedures of that (n, p, r), which sharpens between-procedure
/// comparisons. Cross-validation folds use derive_seed(master_seed,
/// {n, p, r, 1000 + procedure}) and test samples derive_seed(master_seed,
/// {n, p, r, 2000}). Failed fits count as degenerate with error 50%.
CellResult run_cell(const ExperimentConfig& config, std::size_t n, std::size_t p, Procedure procedure);

/// Every (n, p, procedure) cell, n-major then p then procedure.
BenchReport run_table(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Theory checks
// ---------------------------------------------------------------------------

struct Prop1Report {
  int point = 1;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double norm_f10 = 0.0;
  double bound = 0.0;          // closed-form lower bound on the mean excess risk
  double mean_excess = 0.0;
  double se_excess = 0.0;
  double mean_clipped_cos = 0.0;  // mean of cos(alpha) 1{|alpha| < pi/2}
  double se_cos = 0.0;
  double cos_limit = 0.0;      // sqrt(n/p) (point 1) or (sqrt(n)||F10|| + 1)/sqrt(p-2) (point 2)
  bool excess_ok = false;
  bool cos_ok = false;
  bool pass = false;
};

/// Lower bound (1 - sqrt(n/p)) ||F|| / (2 sqrt(2 pi)) exp(-5 ||F||^2 / 8).
double prop1_point1_bound(std::size_t n, std::size_t p, double norm_f10);
/// Lower bound (1 - (sqrt(n) ||F|| + 1) / sqrt(p - 2)) ||F|| / (2 sqrt(2 pi)) exp(-5 ||F||^2 / 8).
double prop1_point2_bound(std::size_t n, std::size_t p, double norm_f10);

/// Monte Carlo check of the inconsistency bounds for the full-covariance
/// plug-in rule (point 1: pinv of the pooled covariance applied to the true
/// mean gap, n/2 rows per class) and for the known-covariance rule with a
/// noisy mean gap (point 2). PASS iff mean excess >= bound - 3 SE and, for
/// point 1, mean clipped cosine <= sqrt(n/p) + 3 SE.
Prop1Report verify_prop1(int point, const GaussianPair& model, std::size_t n, std::size_t replicates,
                         std::uint64_t seed, std::size_t threads = 1);

/// Unit-covariance model in dimension p with ||F10|| = norm_f10 along e_1.
GaussianPair prop1_model(std::size_t p, double norm_f10);

struct BoundRow {
  double d;
  double alpha;
  double d0;
  double lower;
  double excess;
  double upper;
};

/// Analytic rule at separation d, angle alpha and offset error d0 (p = 2,
/// C = I, F10 = 2d e_1, direction (cos alpha, sin alpha), offset
/// s10 + d0 * direction), with its exact excess risk and both bounds.
std::vector<BoundRow> bounds_grid(const std::vector<double>& d_grid, const std::vector<double>& alpha_grid,
                                  const std::vector<double>& d0_grid);

struct SandwichGrids {
  std::vector<double> d;
  std::vector<double> alpha;
  std::vector<double> d0;
  /// d in {0.25, 0.5, ..., 4}, 13 angles k pi/24 on [0, pi/2], d0 in {-1, -0.75, ..., 1}.
  static SandwichGrids defaults();
};

struct SandwichReport {
  std::size_t lower_checked = 0;
  std::size_t upper_checked = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  double max_lower_violation = 0.0;  // max(lower - excess), d0 = 0 slice
  double max_upper_violation = 0.0;  // max(excess - upper), full grid
  double tolerance = 1e-12;
  bool pass = false;
  std::vector<BoundRow> rows;
};

/// Lower bound checked on the d0 = 0 slice, constructive upper bound on the
/// whole grid, both with absolute tolerance 1e-12.
SandwichReport sandwich_sweep(const SandwichGrids& grids);

}  // namespace hdlda
