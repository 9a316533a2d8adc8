#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "hdlda/estimators.hpp"
#include "hdlda/model.hpp"
#include "hdlda/rng.hpp"
#include "hdlda/tuning.hpp"

namespace hdlda {

/// The complete classification procedures compared in the benchmarks.
///   bayes      the true Bayes rule (needs the model; benchmark anchor only)
///   fisher     diagonal Fisher rule on all features
///   universal  universal threshold sqrt(2 log p) * scale
///   fdr        FDR threshold, gaussian quantiles, gamma tuned by CV
///   student    FDR threshold, Student quantiles, gamma tuned by CV
///   fair       FAIR rank choice
///   hc         higher criticism rank choice, q tuned by CV
enum class Procedure { bayes, fisher, universal, fdr, student, fair, hc };

std::string_view to_string(Procedure p);
/// Throws ContractViolation on unknown names.
Procedure parse_procedure(std::string_view s);
std::vector<Procedure> all_procedures();

struct ProcedureOptions {
  SplitMode split = SplitMode::half;
  Normalization norm = Normalization::paper;
  FisherVariance fisher_variance = FisherVariance::global;
  /// FAIR reads standardized statistics (see standardize()) instead of the
  /// raw m_bar / sigma_hat, which sit on a 1/sqrt(n) scale.
  bool standardize_fair = false;
  std::vector<double> fdr_grid = default_fdr_grid();
  std::vector<double> hc_grid = default_hc_grid();
  std::size_t cv_folds = 10;
  /// Skip cross-validation and use this gamma (fdr/student) or q (hc).
  std::optional<double> fixed_param;
};

struct FitResult {
  LinearRule rule;
  std::optional<Selection> selection;
  std::optional<double> chosen_param;  // gamma or q
  bool cv_degenerate = false;
  std::size_t cv_folds_used = 0;
};

/// Fold count actually used: min(requested, n0, n1).
std::size_t effective_folds(std::size_t requested, std::size_t n0, std::size_t n1);

/// Fits one procedure on a training sample. The stream drives fold
/// assignment for the cross-validated procedures. Procedure::bayes needs
/// the model and throws ContractViolation when none is given.
FitResult fit_procedure(Procedure proc, const Dataset& data, const ProcedureOptions& options,
                        RngStream& stream, const GaussianPair* model = nullptr);

}  // namespace hdlda
