#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hdlda/dataset.hpp"
#include "hdlda/estimators.hpp"
#include "hdlda/rng.hpp"

namespace hdlda {

/// Stratified k-fold partition of the rows of a dataset.
struct CvPlan {
  std::vector<std::vector<std::size_t>> folds;  // each sorted ascending
  std::size_t k = 0;
  std::uint64_t rng_seed = 0;

  /// Rows outside the given fold, ascending.
  std::vector<std::size_t> training_rows(std::size_t fold, std::size_t n) const;
};

/// Stratified folds for a dataset laid out as n0 class-0 rows followed by n1
/// class-1 rows (the layout produced by sample()). Each class is shuffled
/// and dealt round-robin, so per-class fold sizes differ by at most one.
/// Throws InsufficientData when a class has fewer than k rows, DomainError
/// for k < 2.
CvPlan kfold_split(std::size_t n0, std::size_t n1, std::size_t k, RngStream& stream);
/// Same, for arbitrary row order.
CvPlan kfold_split(const Dataset& data, std::size_t k, RngStream& stream);

/// Default candidate lists: gamma in {1, 1e-1, ..., 1e-10} for the FDR
/// methods (b_p = gamma / log p) and q in {0.2, 0.1, 0.05, 0.01} for HC.
std::vector<double> default_fdr_grid();
std::vector<double> default_hc_grid();

/// b_p = gamma / log p. Throws DomainError if the result leaves (0, 1/2).
double fdr_level_from_gamma(double gamma, std::size_t p);

struct TuneOptions {
  SplitMode split = SplitMode::half;
  Normalization norm = Normalization::paper;
};

struct TuneResult {
  double chosen = 0.0;
  std::size_t chosen_index = 0;
  std::vector<double> cv_error;                  // mean held-out error per candidate
  std::vector<std::size_t> full_selection_size;  // |I| on the full data per candidate
  std::vector<bool> admissible;                  // false: parameter invalid at this p, error left at 1
  bool degenerate = false;                       // every fold selected nothing, for every candidate
};

/// Cross-validated choice of the hyperparameter of a thresholding method
/// (fdr / student_fdr: gamma; hc: q). Fits on k-1 folds, scores the held-out
/// fold, averages fold error rates, and returns the minimizer. Ties go to
/// the candidate with the smaller selection on the full data, then to the
/// earlier grid entry. Candidates the selector rejects at this p (b_p
/// outside (0, 1/2), floor(p q) < 1) are skipped; DomainError if none remain.
TuneResult tune(const Dataset& data, SelectionMethod method, const std::vector<double>& grid,
                const CvPlan& plan, const TuneOptions& options = {});

}  // namespace hdlda
