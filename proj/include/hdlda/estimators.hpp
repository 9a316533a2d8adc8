#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hdlda/dataset.hpp"
#include "hdlda/model.hpp"
#include "hdlda/rng.hpp"

namespace hdlda {

/// How the training sample is divided between the offset estimate (part A)
/// and the mean-difference/variance estimates (part B).
///   half: part A = first floor(n_k/2) rows of class k, part B = the rest.
///   none: both parts are the full sample.
enum class SplitMode { half, none };

/// Scale applied to selection thresholds.
///   paper: 1/sqrt(n) with n the total training size.
///   exact: sqrt(1/nB0 + 1/nB1), the standard deviation of the part-B mean
///          difference of a unit-variance feature.
enum class Normalization { paper, exact };

enum class SelectionMethod { universal, fdr, student_fdr, fair, hc };
enum class QuantileFamily { gaussian, student };

std::string_view to_string(SplitMode m);
std::string_view to_string(Normalization m);
std::string_view to_string(SelectionMethod m);
/// Throw ContractViolation on unknown names.
SplitMode parse_split_mode(std::string_view s);
Normalization parse_normalization(std::string_view s);

/// Per-feature sufficient statistics of a two-class sample.
struct SplitStats {
  Eigen::VectorXd s_hat;      // (mean_A1 + mean_A0) / 2
  Eigen::VectorXd m_bar;      // mean_B1 - mean_B0
  Eigen::VectorXd sigma_hat;  // pooled part-B standard deviations
  Eigen::VectorXd t_stats;    // m_bar / sigma_hat, 0 where flagged
  std::vector<bool> flagged;  // zero pooled variance
  std::size_t n0 = 0, n1 = 0;    // class counts of the whole sample
  std::size_t na0 = 0, na1 = 0;  // part A counts
  std::size_t nb0 = 0, nb1 = 0;  // part B counts

  Eigen::Index dim() const { return t_stats.size(); }
  std::size_t n() const { return n0 + n1; }
};

/// Throws InsufficientData when a class has fewer than 4 rows (half) or 2
/// rows (none).
SplitStats split_stats(const Dataset& data, SplitMode mode);

/// Threshold scale for the given normalization.
double threshold_scale(const SplitStats& stats, Normalization norm);

/// Feature indices sorted by |T| nonincreasing; ties by index, flagged
/// features last.
struct Ranking {
  std::vector<std::size_t> order;
  std::size_t usable = 0;  // number of unflagged features (a prefix of order)
};
Ranking rank_features(const SplitStats& stats);

/// Copy of stats with T divided by threshold_scale(stats, norm), so noise
/// features have |T| of order one. The ranking is unchanged.
SplitStats standardize(const SplitStats& stats, Normalization norm);

/// A chosen feature subset (0-based indices, ascending).
struct Selection {
  std::vector<std::size_t> indices;
  double threshold = 0.0;  // realized lambda
  SelectionMethod method = SelectionMethod::universal;
  double param = 0.0;      // b_p for fdr/student_fdr, q for hc, unused otherwise
  std::size_t k_star = 0;  // selected rank, 0 if empty

  bool empty() const { return indices.empty(); }
};

/// I = {i : |T[i]| > sqrt(2 log p) * scale}.
Selection select_universal(const SplitStats& stats, Normalization norm = Normalization::paper);

/// Benjamini-Hochberg style step-up over the ranked |T|:
///   k* = max{k : |T_(k)| >= scale * z(b_p k / (2p))}
/// with z the upper gaussian quantile, or the Student quantile with n - 2
/// degrees of freedom. Selects every unflagged feature with |T| >= |T_(k*)|.
/// Throws DomainError unless 0 < b_p < 1/2.
Selection select_fdr(const SplitStats& stats, double b_p, QuantileFamily family,
                     Normalization norm = Normalization::paper);
Selection select_fdr(const SplitStats& stats, const Ranking& ranking, double b_p,
                     QuantileFamily family, Normalization norm);

/// Top-m features maximizing the plug-in classification power
///   n (S_m + m (1/n1 - 1/n0))^2 / (m n1 n0 + n1 n0 S_m) / max_{i<=m} sigma^2_(i)
/// with S_m the sum of the m largest T^2. Ties go to the smallest m.
Selection select_fair(const SplitStats& stats);
Selection select_fair(const SplitStats& stats, const Ranking& ranking);

/// Higher criticism rank
///   k* = argmax_{1 <= k <= floor(pq), k < p} (k/p - pi_(k)) / sqrt(k (p - k))
/// with pi_(k) = 2 (1 - Phi(|T_(k)|)). Ties go to the smallest k. Throws
/// DomainError for q outside (0,1] or an empty search range.
Selection select_hc(const SplitStats& stats, double q);
Selection select_hc(const SplitStats& stats, const Ranking& ranking, double q);

/// F[i] = m_bar[i] / sigma_hat[i]^2 on the selected features, 0 elsewhere;
/// offset = s_hat.
LinearRule assemble_rule(const SplitStats& stats, const Selection& sel);

/// Per-feature variance used by the diagonal Fisher baseline.
///   global:       variance of the pooled sample around its global mean
///   within_class: pooled within-class variance
enum class FisherVariance { global, within_class };
std::string_view to_string(FisherVariance v);
FisherVariance parse_fisher_variance(std::string_view s);

/// Diagonal Fisher rule on the full sample: F = D^-1 (mean1 - mean0),
/// offset = (mean1 + mean0) / 2. Zero-variance features get F[i] = 0.
/// Throws InsufficientData for n < 3 or an empty class.
LinearRule fit_diag_fisher(const Dataset& data, FisherVariance variance = FisherVariance::global);

/// F = pinv(C_hat) m with C_hat the pooled within-class covariance
/// [(n0-1) C0 + (n1-1) C1] / (n-1) and m = true_m10 (or the estimated mean
/// difference when use_estimated_mean is set); offset = (mean1 + mean0) / 2.
LinearRule fit_prop1_point1(const Dataset& data, const Eigen::VectorXd& true_m10,
                            bool use_estimated_mean = false);

/// F = F10 + C^{-1/2} xi / sqrt(n), xi ~ N(0, I_p); offset = s10.
/// Throws DomainError if C is singular.
LinearRule fit_prop1_point2(const GaussianPair& model, long n, RngStream& stream);

/// 1 iff <F, x - s> >= 0. Throws ContractViolation on dimension mismatch.
int predict(const LinearRule& rule, const Eigen::VectorXd& x);
std::vector<int> predict(const LinearRule& rule, const Eigen::MatrixXd& rows);

}  // namespace hdlda
