#include "hdlda/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hdlda/errors.hpp"

namespace hdlda {

std::vector<std::size_t> CvPlan::training_rows(std::size_t fold, std::size_t n) const {
  std::vector<bool> held(n, false);
  for (std::size_t r : folds.at(fold)) held.at(r) = true;
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!held[r]) out.push_back(r);
  }
  return out;
}

namespace {

CvPlan deal(const std::vector<std::size_t>& rows0, const std::vector<std::size_t>& rows1,
            std::size_t k, RngStream& stream) {
  if (k < 2) throw DomainError("kfold_split: k must be at least 2");
  if (rows0.size() < k || rows1.size() < k) {
    throw InsufficientData("kfold_split: each class needs at least k = " + std::to_string(k) +
                           " rows (have " + std::to_string(rows0.size()) + ", " +
                           std::to_string(rows1.size()) + ")");
  }
  CvPlan plan;
  plan.k = k;
  plan.rng_seed = stream.seed();
  plan.folds.assign(k, {});
  for (const auto* rows : {&rows0, &rows1}) {
    std::vector<std::size_t> shuffled = *rows;
    std::shuffle(shuffled.begin(), shuffled.end(), stream.engine());
    for (std::size_t j = 0; j < shuffled.size(); ++j) plan.folds[j % k].push_back(shuffled[j]);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

}  // namespace

CvPlan kfold_split(std::size_t n0, std::size_t n1, std::size_t k, RngStream& stream) {
  std::vector<std::size_t> rows0(n0), rows1(n1);
  std::iota(rows0.begin(), rows0.end(), std::size_t{0});
  std::iota(rows1.begin(), rows1.end(), n0);
  return deal(rows0, rows1, k, stream);
}

CvPlan kfold_split(const Dataset& data, std::size_t k, RngStream& stream) {
  return deal(data.indices_of(0), data.indices_of(1), k, stream);
}

std::vector<double> default_fdr_grid() {
  std::vector<double> grid;
  for (int e = 0; e >= -10; --e) grid.push_back(std::pow(10.0, e));
  return grid;
}

std::vector<double> default_hc_grid() { return {0.2, 0.1, 0.05, 0.01}; }

double fdr_level_from_gamma(double gamma, std::size_t p) {
  const double b = gamma / std::log(static_cast<double>(p));
  if (!(b > 0.0 && b < 0.5)) {
    throw DomainError("FDR level gamma/log(p) = " + std::to_string(b) + " outside (0, 1/2) for gamma = " +
                      std::to_string(gamma) + ", p = " + std::to_string(p));
  }
  return b;
}

namespace {

Selection select_with(const SplitStats& stats, const Ranking& ranking, SelectionMethod method,
                      double value, Normalization norm) {
  const auto p = static_cast<std::size_t>(stats.dim());
  switch (method) {
    case SelectionMethod::fdr:
      return select_fdr(stats, ranking, fdr_level_from_gamma(value, p), QuantileFamily::gaussian, norm);
    case SelectionMethod::student_fdr:
      return select_fdr(stats, ranking, fdr_level_from_gamma(value, p), QuantileFamily::student, norm);
    case SelectionMethod::hc:
      return select_hc(stats, ranking, value);
    default:
      throw ContractViolation("tune: method '" + std::string(to_string(method)) + "' has no tunable parameter");
  }
}

}  // namespace

TuneResult tune(const Dataset& data, SelectionMethod method, const std::vector<double>& grid,
                const CvPlan& plan, const TuneOptions& options) {
  if (grid.empty()) throw ContractViolation("tune: empty candidate grid");
  const auto n = static_cast<std::size_t>(data.size());

  TuneResult result;
  result.cv_error.assign(grid.size(), 1.0);
  result.full_selection_size.assign(grid.size(), 0);
  result.admissible.assign(grid.size(), false);

  {
    const SplitStats stats = split_stats(data, options.split);
    const Ranking ranking = rank_features(stats);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      try {
        result.full_selection_size[c] = select_with(stats, ranking, method, grid[c], options.norm).indices.size();
        result.admissible[c] = true;
        result.cv_error[c] = 0.0;
      } catch (const DomainError&) {
      }
    }
  }
  const auto first = std::find(result.admissible.begin(), result.admissible.end(), true);
  if (first == result.admissible.end()) {
    throw DomainError("tune: no candidate of the grid is admissible for p = " + std::to_string(data.dim()));
  }
  const auto first_index = static_cast<std::size_t>(first - result.admissible.begin());

  bool any_nonempty = false;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const std::vector<std::size_t>& held = plan.folds[f];
    const Dataset train = data.subset(plan.training_rows(f, n));
    const SplitStats stats = split_stats(train, options.split);
    const Ranking ranking = rank_features(stats);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      if (!result.admissible[c]) continue;
      const Selection sel = select_with(stats, ranking, method, grid[c], options.norm);
      any_nonempty = any_nonempty || !sel.empty();
      const LinearRule rule = assemble_rule(stats, sel);
      std::size_t wrong = 0;
      for (std::size_t r : held) {
        const Eigen::VectorXd x = data.rows.row(static_cast<Eigen::Index>(r)).transpose();
        wrong += predict(rule, x) != data.labels[r];
      }
      result.cv_error[c] += static_cast<double>(wrong) / static_cast<double>(held.size());
    }
  }
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (result.admissible[c]) result.cv_error[c] /= static_cast<double>(plan.folds.size());
  }

  if (!any_nonempty) {
    result.degenerate = true;
    result.chosen_index = first_index;
    result.chosen = grid[first_index];
    return result;
  }

  double best = 1.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (result.admissible[c]) best = std::min(best, result.cv_error[c]);
  }
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (result.admissible[c] && result.cv_error[c] <= best + 1e-12) tied.push_back(c);
  }
  std::size_t pick = tied.front();
  for (std::size_t c : tied) {
    if (result.full_selection_size[c] < result.full_selection_size[pick]) pick = c;
  }
  result.chosen_index = pick;
  result.chosen = grid[pick];
  return result;
}

}  // namespace hdlda
