#include "hdlda/procedures.hpp"

#include <algorithm>
#include <string>

#include "hdlda/errors.hpp"

namespace hdlda {

std::string_view to_string(Procedure p) {
  switch (p) {
    case Procedure::bayes: return "bayes";
    case Procedure::fisher: return "fisher";
    case Procedure::universal: return "universal";
    case Procedure::fdr: return "fdr";
    case Procedure::student: return "student";
    case Procedure::fair: return "fair";
    case Procedure::hc: return "hc";
  }
  return "?";
}

Procedure parse_procedure(std::string_view s) {
  for (Procedure p : all_procedures()) {
    if (to_string(p) == s) return p;
  }
  throw ContractViolation("unknown procedure '" + std::string(s) +
                          "' (expected bayes|fisher|universal|fdr|student|fair|hc)");
}

std::vector<Procedure> all_procedures() {
  return {Procedure::bayes, Procedure::fisher, Procedure::universal, Procedure::fdr,
          Procedure::student, Procedure::fair, Procedure::hc};
}

std::size_t effective_folds(std::size_t requested, std::size_t n0, std::size_t n1) {
  return std::min({requested, n0, n1});
}

namespace {

FitResult fit_thresholded(SelectionMethod method, const Dataset& data, const ProcedureOptions& options,
                          RngStream& stream) {
  FitResult out;
  double value;
  if (options.fixed_param) {
    value = *options.fixed_param;
  } else {
    const std::vector<double>& grid = method == SelectionMethod::hc ? options.hc_grid : options.fdr_grid;
    const std::size_t k = effective_folds(options.cv_folds, data.count(0), data.count(1));
    const CvPlan plan = kfold_split(data, k, stream);
    const TuneResult tuned = tune(data, method, grid, plan, TuneOptions{options.split, options.norm});
    value = tuned.chosen;
    out.cv_degenerate = tuned.degenerate;
    out.cv_folds_used = k;
  }
  out.chosen_param = value;

  const SplitStats stats = split_stats(data, options.split);
  const Ranking ranking = rank_features(stats);
  const auto p = static_cast<std::size_t>(stats.dim());
  Selection sel;
  switch (method) {
    case SelectionMethod::fdr:
      sel = select_fdr(stats, ranking, fdr_level_from_gamma(value, p), QuantileFamily::gaussian, options.norm);
      break;
    case SelectionMethod::student_fdr:
      sel = select_fdr(stats, ranking, fdr_level_from_gamma(value, p), QuantileFamily::student, options.norm);
      break;
    default:
      sel = select_hc(stats, ranking, value);
      break;
  }
  out.rule = assemble_rule(stats, sel);
  out.selection = std::move(sel);
  return out;
}

}  // namespace

FitResult fit_procedure(Procedure proc, const Dataset& data, const ProcedureOptions& options,
                        RngStream& stream, const GaussianPair* model) {
  switch (proc) {
    case Procedure::bayes: {
      if (model == nullptr) throw ContractViolation("fit_procedure: the bayes procedure needs the true model");
      return FitResult{bayes_rule(*model), std::nullopt, std::nullopt, false, 0};
    }
    case Procedure::fisher:
      return FitResult{fit_diag_fisher(data, options.fisher_variance), std::nullopt, std::nullopt, false, 0};
    case Procedure::universal: {
      const SplitStats stats = split_stats(data, options.split);
      Selection sel = select_universal(stats, options.norm);
      FitResult out{assemble_rule(stats, sel), std::nullopt, std::nullopt, false, 0};
      out.selection = std::move(sel);
      return out;
    }
    case Procedure::fair: {
      SplitStats stats = split_stats(data, options.split);
      if (options.standardize_fair) stats = standardize(stats, options.norm);
      Selection sel = select_fair(stats);
      FitResult out{assemble_rule(stats, sel), std::nullopt, std::nullopt, false, 0};
      out.selection = std::move(sel);
      return out;
    }
    case Procedure::fdr: return fit_thresholded(SelectionMethod::fdr, data, options, stream);
    case Procedure::student: return fit_thresholded(SelectionMethod::student_fdr, data, options, stream);
    case Procedure::hc: return fit_thresholded(SelectionMethod::hc, data, options, stream);
  }
  throw ContractViolation("fit_procedure: unknown procedure");
}

}  // namespace hdlda
