#include "hdlda/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "hdlda/errors.hpp"

namespace hdlda {

std::string_view to_string(Simulation s) {
  switch (s) {
    case Simulation::sim1: return "sim1";
    case Simulation::sim2: return "sim2";
    case Simulation::sim2_literal: return "sim2_literal";
    case Simulation::custom: return "custom";
  }
  return "?";
}

Simulation parse_simulation(std::string_view s) {
  for (Simulation sim : {Simulation::sim1, Simulation::sim2, Simulation::sim2_literal, Simulation::custom}) {
    if (to_string(sim) == s) return sim;
  }
  throw ContractViolation("unknown simulation '" + std::string(s) + "' (expected sim1|sim2|sim2_literal|custom)");
}

std::string_view to_string(ClassSizes c) { return c == ClassSizes::total ? "total" : "per_class"; }

ClassSizes parse_class_sizes(std::string_view s) {
  if (s == "total") return ClassSizes::total;
  if (s == "per_class") return ClassSizes::per_class;
  throw ContractViolation("unknown class size convention '" + std::string(s) + "' (expected total|per_class)");
}

RiskEval parse_risk_eval(std::string_view s) {
  if (s == "closed") return RiskEval{};
  if (s.starts_with("test:")) {
    const std::string digits(s.substr(5));
    std::size_t used = 0;
    unsigned long long size = 0;
    try {
      size = std::stoull(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == digits.size() && size >= 2) return RiskEval{RiskEval::Mode::test_set, static_cast<std::size_t>(size)};
  }
  throw ContractViolation("invalid risk mode '" + std::string(s) + "' (expected closed|test:SIZE with SIZE >= 2)");
}

std::string to_string(const RiskEval& r) {
  return r.mode == RiskEval::Mode::closed_form ? "closed" : "test:" + std::to_string(r.test_size);
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ContractViolation("replicates must be >= 1");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
  for (std::size_t p : ps) {
    if (p < 2) throw ContractViolation("every p must be >= 2");
    if ((simulation == Simulation::sim1 || simulation == Simulation::sim2 ||
         simulation == Simulation::sim2_literal) && p < 4) {
      throw ContractViolation("built-in simulations need p >= 4");
    }
    if (simulation == Simulation::custom && custom_m10.size() > p) {
      throw ContractViolation("custom_m10 is longer than p = " + std::to_string(p));
    }
  }
  for (std::size_t n : ns) {
    if (n < 2) throw ContractViolation("every n must be >= 2");
  }
  if (simulation == Simulation::custom && custom_variances.empty()) {
    throw ContractViolation("custom simulation needs custom_variances");
  }
  for (double v : custom_variances) {
    if (!(v > 0.0)) throw ContractViolation("custom_variances must be positive");
  }
  if (fit.cv_folds < 2) throw ContractViolation("cv_folds must be >= 2");
  if (fit.fdr_grid.empty() || fit.hc_grid.empty()) throw ContractViolation("tuning grids must be nonempty");
}

GaussianPair make_simulation(Simulation sim, std::size_t p) {
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd var(dim);
  switch (sim) {
    case Simulation::sim1:
      if (p < 4) throw ContractViolation("sim1 needs p >= 4");
      mu1[3] = 3.0;
      var.setOnes();
      break;
    case Simulation::sim2:
    case Simulation::sim2_literal: {
      if (p < 4) throw ContractViolation("sim2 needs p >= 4");
      const double shrink = sim == Simulation::sim2 ? 1.0 : 3.0;
      const double low = sim == Simulation::sim2 ? 1e-4 : 0.01;
      const double high = sim == Simulation::sim2 ? 4.0 : 2.0;
      const double head[] = {0.01, 0.5, 0.02, 0.5};
      for (int i = 0; i < 4; ++i) mu1[i] = head[i] / shrink;
      for (Eigen::Index i = 0; i < dim; ++i) var[i] = i % 2 == 0 ? low : high;
      break;
    }
    case Simulation::custom:
      throw ContractViolation("make_simulation: custom designs need a config");
  }
  return GaussianPair(std::move(mu0), std::move(mu1), PsdMatrix::diagonal(std::move(var)));
}

GaussianPair make_model(const ExperimentConfig& config, std::size_t p) {
  if (config.simulation != Simulation::custom) return make_simulation(config.simulation, p);
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < config.custom_m10.size() && i < p; ++i) mu1[static_cast<Eigen::Index>(i)] = config.custom_m10[i];
  Eigen::VectorXd var(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    var[i] = config.custom_variances[static_cast<std::size_t>(i) % config.custom_variances.size()];
  }
  return GaussianPair(Eigen::VectorXd::Zero(dim), std::move(mu1), PsdMatrix::diagonal(std::move(var)));
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeanSe {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

// Fixed-order reduction, so results do not depend on the thread schedule.
MeanSe summarize(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

std::string param_key(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct ReplicateOutcome {
  double error = 0.5;
  bool degenerate = true;
  double selected = 0.0;
  std::optional<double> param;
};

}  // namespace

CellResult run_cell(const ExperimentConfig& config, std::size_t n, std::size_t p, Procedure procedure) {
  config.validate();
  const GaussianPair model = make_model(config, p);
  const std::size_t n0 = config.class_sizes == ClassSizes::total ? n / 2 : n;
  const std::size_t n1 = config.class_sizes == ClassSizes::total ? n - n / 2 : n;

  std::vector<ReplicateOutcome> outcomes(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::size_t r) {
    ReplicateOutcome out;
    RngStream data_stream(derive_seed(config.master_seed, {n, p, r}));
    const Dataset train = sample(model, n0, n1, data_stream);
    RngStream fit_stream(derive_seed(config.master_seed, {n, p, r, 1000 + static_cast<std::uint64_t>(procedure)}));
    try {
      const FitResult fit = fit_procedure(procedure, train, config.fit, fit_stream, &model);
      out.degenerate = fit.rule.degenerate();
      out.selected = fit.selection ? static_cast<double>(fit.selection->indices.size()) : static_cast<double>(p);
      out.param = fit.chosen_param;
      if (config.risk.mode == RiskEval::Mode::closed_form) {
        out.error = conditional_risk(fit.rule, model);
      } else {
        RngStream test_stream(derive_seed(config.master_seed, {n, p, r, 2000}));
        const std::size_t t0 = config.risk.test_size / 2;
        const Dataset test = sample(model, t0, config.risk.test_size - t0, test_stream);
        const std::vector<int> labels = predict(fit.rule, test.rows);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) wrong += labels[i] != test.labels[i];
        out.error = static_cast<double>(wrong) / static_cast<double>(labels.size());
      }
    } catch (const std::exception&) {
      out = ReplicateOutcome{};
    }
    outcomes[r] = out;
  });

  CellResult cell;
  cell.n = n;
  cell.p = p;
  cell.procedure = procedure;
  cell.replicates = config.replicates;
  cell.bayes_risk_pct = 100.0 * bayes_risk(model);
  std::vector<double> errors;
  errors.reserve(outcomes.size());
  double selected = 0.0;
  for (const ReplicateOutcome& o : outcomes) {
    errors.push_back(100.0 * o.error);
    cell.degenerate_count += o.degenerate;
    selected += o.selected;
    if (o.param) ++cell.chosen_params[param_key(*o.param)];
  }
  const MeanSe s = summarize(errors);
  cell.mean_error_pct = s.mean;
  cell.std_error_pct = s.sd;
  cell.se_pct = s.se;
  cell.mean_selected = selected / static_cast<double>(outcomes.size());
  return cell;
}

BenchReport run_table(const ExperimentConfig& config) {
  config.validate();
  BenchReport report;
  report.config = config;
  for (std::size_t n : config.ns) {
    for (std::size_t p : config.ps) {
      for (Procedure proc : config.procedures) report.cells.push_back(run_cell(config, n, p, proc));
    }
  }
  if (config.simulation == Simulation::sim2) {
    report.notes.push_back(
        "sim2 uses the reconciled parameters m10[1:4] = (0.01, 0.5, 0.02, 0.5) and variances alternating "
        "1e-4, 4; the literal reading (sim2_literal) has Bayes risk near 46%, inconsistent with the "
        "published error rates");
  }
  return report;
}

// ---------------------------------------------------------------------------

double prop1_point1_bound(std::size_t n, std::size_t p, double norm_f10) {
  const double lead = 1.0 - std::sqrt(static_cast<double>(n) / static_cast<double>(p));
  return lead * norm_f10 / (2.0 * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-5.0 * norm_f10 * norm_f10 / 8.0);
}

double prop1_point2_bound(std::size_t n, std::size_t p, double norm_f10) {
  if (p <= 2) throw DomainError("prop1_point2_bound: needs p > 2");
  const double lead = 1.0 - (std::sqrt(static_cast<double>(n)) * norm_f10 + 1.0) / std::sqrt(static_cast<double>(p) - 2.0);
  return lead * norm_f10 / (2.0 * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-5.0 * norm_f10 * norm_f10 / 8.0);
}

GaussianPair prop1_model(std::size_t p, double norm_f10) {
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(dim);
  mu1[0] = norm_f10;
  return GaussianPair(Eigen::VectorXd::Zero(dim), std::move(mu1), PsdMatrix::identity(dim));
}

Prop1Report verify_prop1(int point, const GaussianPair& model, std::size_t n, std::size_t replicates,
                         std::uint64_t seed, std::size_t threads) {
  if (point != 1 && point != 2) throw ContractViolation("verify_prop1: point must be 1 or 2");
  if (replicates < 2) throw ContractViolation("verify_prop1: need at least 2 replicates");
  if (n < 3) throw ContractViolation("verify_prop1: need n >= 3");
  const std::size_t p = static_cast<std::size_t>(model.dim());

  Prop1Report rep;
  rep.point = point;
  rep.p = p;
  rep.n = n;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.norm_f10 = l2pc_norm(model.bayes_direction(), model.cov());
  if (point == 1) {
    rep.bound = prop1_point1_bound(n, p, rep.norm_f10);
    rep.cos_limit = std::sqrt(static_cast<double>(n) / static_cast<double>(p));
  } else {
    rep.bound = prop1_point2_bound(n, p, rep.norm_f10);
    rep.cos_limit = (std::sqrt(static_cast<double>(n)) * rep.norm_f10 + 1.0) / std::sqrt(static_cast<double>(p) - 2.0);
  }

  const double base = bayes_risk(model);
  const Eigen::VectorXd m10 = model.mean_difference();
  std::vector<double> excess(replicates), cosine(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    RngStream stream(derive_seed(seed, {static_cast<std::uint64_t>(point), n, p, r}));
    LinearRule rule;
    if (point == 1) {
      const Dataset data = sample(model, n / 2, n - n / 2, stream);
      rule = fit_prop1_point1(data, m10);
    } else {
      rule = fit_prop1_point2(model, static_cast<long>(n), stream);
    }
    excess[r] = conditional_risk(rule, model) - base;
    double c = 0.0;
    try {
      c = rule_geometry(rule, model).cos_alpha;
    } catch (const DegenerateGeometry&) {
      c = 0.0;
    }
    cosine[r] = std::max(c, 0.0);
  });

  const MeanSe e = summarize(excess);
  const MeanSe c = summarize(cosine);
  rep.mean_excess = e.mean;
  rep.se_excess = e.se;
  rep.mean_clipped_cos = c.mean;
  rep.se_cos = c.se;
  rep.excess_ok = rep.mean_excess >= rep.bound - 3.0 * rep.se_excess;
  rep.cos_ok = rep.mean_clipped_cos <= rep.cos_limit + 3.0 * rep.se_cos;
  rep.pass = rep.excess_ok && (point == 2 || rep.cos_ok);
  return rep;
}

std::vector<BoundRow> bounds_grid(const std::vector<double>& d_grid, const std::vector<double>& alpha_grid,
                                  const std::vector<double>& d0_grid) {
  std::vector<BoundRow> rows;
  rows.reserve(d_grid.size() * alpha_grid.size() * d0_grid.size());
  for (double d : d_grid) {
    if (!(d > 0.0)) throw DomainError("bounds_grid: separations must be positive");
    Eigen::Vector2d mu0(-d, 0.0), mu1(d, 0.0);
    const GaussianPair model(mu0, mu1, PsdMatrix::identity(2));
    const double base = bayes_risk(model);
    for (double alpha : alpha_grid) {
      const Eigen::Vector2d dir(std::cos(alpha), std::sin(alpha));
      for (double d0 : d0_grid) {
        const LinearRule rule{dir, model.midpoint() + d0 * dir};
        const RuleGeometry geom = rule_geometry(rule, model);
        const RiskBounds b = th1_bounds(geom);
        rows.push_back(BoundRow{d, alpha, d0, b.lower, conditional_risk(rule, model) - base, b.upper});
      }
    }
  }
  return rows;
}

SandwichGrids SandwichGrids::defaults() {
  SandwichGrids g;
  for (int i = 1; i <= 16; ++i) g.d.push_back(0.25 * i);
  for (int k = 0; k <= 12; ++k) g.alpha.push_back(k * std::numbers::pi / 24.0);
  for (int j = -4; j <= 4; ++j) g.d0.push_back(0.25 * j);
  return g;
}

SandwichReport sandwich_sweep(const SandwichGrids& grids) {
  SandwichReport rep;
  rep.rows = bounds_grid(grids.d, grids.alpha, grids.d0);
  rep.max_lower_violation = -std::numeric_limits<double>::infinity();
  rep.max_upper_violation = -std::numeric_limits<double>::infinity();
  for (const BoundRow& row : rep.rows) {
    if (row.d0 == 0.0) {
      ++rep.lower_checked;
      const double gap = row.lower - row.excess;
      rep.max_lower_violation = std::max(rep.max_lower_violation, gap);
      if (gap > rep.tolerance) ++rep.lower_violations;
    }
    ++rep.upper_checked;
    const double gap = row.excess - row.upper;
    rep.max_upper_violation = std::max(rep.max_upper_violation, gap);
    if (gap > rep.tolerance) ++rep.upper_violations;
  }
  if (rep.lower_checked == 0) rep.max_lower_violation = 0.0;
  if (rep.upper_checked == 0) rep.max_upper_violation = 0.0;
  rep.pass = rep.lower_violations == 0 && rep.upper_violations == 0;
  return rep;
}

}  // namespace hdlda
