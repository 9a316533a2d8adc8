#include "hdlda/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hdlda/errors.hpp"
#include "hdlda/numerics.hpp"

namespace hdlda {

std::string_view to_string(SplitMode m) { return m == SplitMode::half ? "half" : "none"; }

std::string_view to_string(Normalization m) { return m == Normalization::paper ? "paper" : "exact"; }

std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::universal: return "universal";
    case SelectionMethod::fdr: return "fdr";
    case SelectionMethod::student_fdr: return "student_fdr";
    case SelectionMethod::fair: return "fair";
    case SelectionMethod::hc: return "hc";
  }
  return "?";
}

std::string_view to_string(FisherVariance v) {
  return v == FisherVariance::global ? "global" : "within_class";
}

SplitMode parse_split_mode(std::string_view s) {
  if (s == "half") return SplitMode::half;
  if (s == "none") return SplitMode::none;
  throw ContractViolation("unknown split mode '" + std::string(s) + "' (expected half|none)");
}

Normalization parse_normalization(std::string_view s) {
  if (s == "paper") return Normalization::paper;
  if (s == "exact") return Normalization::exact;
  throw ContractViolation("unknown normalization '" + std::string(s) + "' (expected paper|exact)");
}

FisherVariance parse_fisher_variance(std::string_view s) {
  if (s == "global") return FisherVariance::global;
  if (s == "within_class") return FisherVariance::within_class;
  throw ContractViolation("unknown Fisher variance '" + std::string(s) +
                          "' (expected global|within_class)");
}

namespace {

struct ClassMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd scatter;  // sum of squared deviations per feature
  std::size_t count = 0;
};

ClassMoments moments(const Dataset& data, const std::vector<std::size_t>& rows, std::size_t begin,
                     std::size_t end) {
  ClassMoments m;
  m.count = end - begin;
  const Eigen::Index p = data.dim();
  m.mean = Eigen::VectorXd::Zero(p);
  m.scatter = Eigen::VectorXd::Zero(p);
  for (std::size_t k = begin; k < end; ++k) m.mean += data.rows.row(static_cast<Eigen::Index>(rows[k])).transpose();
  m.mean /= static_cast<double>(m.count);
  for (std::size_t k = begin; k < end; ++k) {
    const Eigen::VectorXd dev = data.rows.row(static_cast<Eigen::Index>(rows[k])).transpose() - m.mean;
    m.scatter += dev.cwiseProduct(dev);
  }
  return m;
}

// Variance below this fraction of the feature's squared magnitude is
// rounding noise from duplicated values.
bool negligible_variance(double var, double magnitude) {
  return !(var > 1e-26 * (1.0 + magnitude * magnitude));
}

Selection finish_selection(const SplitStats& stats, SelectionMethod method, double param,
                           std::size_t k_star, double lambda, bool strict) {
  Selection sel;
  sel.method = method;
  sel.param = param;
  sel.k_star = k_star;
  sel.threshold = lambda;
  if (k_star == 0 && !strict) return sel;
  for (Eigen::Index i = 0; i < stats.dim(); ++i) {
    if (stats.flagged[static_cast<std::size_t>(i)]) continue;
    const double a = std::abs(stats.t_stats[i]);
    if (strict ? a > lambda : a >= lambda) sel.indices.push_back(static_cast<std::size_t>(i));
  }
  if (strict) sel.k_star = sel.indices.size();
  return sel;
}

}  // namespace

SplitStats split_stats(const Dataset& data, SplitMode mode) {
  data.validate();
  const std::vector<std::size_t> rows0 = data.indices_of(0);
  const std::vector<std::size_t> rows1 = data.indices_of(1);
  const std::size_t min_rows = mode == SplitMode::half ? 4 : 2;
  if (rows0.size() < min_rows || rows1.size() < min_rows) {
    throw InsufficientData("split_stats: each class needs at least " + std::to_string(min_rows) +
                           " observations in split mode '" + std::string(to_string(mode)) +
                           "' (have " + std::to_string(rows0.size()) + ", " +
                           std::to_string(rows1.size()) + ")");
  }

  const std::size_t a0 = mode == SplitMode::half ? rows0.size() / 2 : rows0.size();
  const std::size_t a1 = mode == SplitMode::half ? rows1.size() / 2 : rows1.size();
  const std::size_t b0 = mode == SplitMode::half ? a0 : 0;
  const std::size_t b1 = mode == SplitMode::half ? a1 : 0;

  const ClassMoments partA0 = moments(data, rows0, 0, a0);
  const ClassMoments partA1 = moments(data, rows1, 0, a1);
  const ClassMoments partB0 = moments(data, rows0, b0, rows0.size());
  const ClassMoments partB1 = moments(data, rows1, b1, rows1.size());

  SplitStats s;
  s.n0 = rows0.size();
  s.n1 = rows1.size();
  s.na0 = partA0.count;
  s.na1 = partA1.count;
  s.nb0 = partB0.count;
  s.nb1 = partB1.count;
  s.s_hat = 0.5 * (partA1.mean + partA0.mean);
  s.m_bar = partB1.mean - partB0.mean;

  // sigma^2 = ((nB0-1) v0 + (nB1-1) v1) / (nB - 1), i.e. the summed part-B
  // scatter over (nB - 1).
  const double denom = static_cast<double>(s.nb0 + s.nb1) - 1.0;
  const Eigen::VectorXd var = (partB0.scatter + partB1.scatter) / denom;
  const Eigen::Index p = data.dim();
  s.sigma_hat.resize(p);
  s.t_stats.resize(p);
  s.flagged.assign(static_cast<std::size_t>(p), false);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double magnitude = std::max(std::abs(partB0.mean[i]), std::abs(partB1.mean[i]));
    if (negligible_variance(var[i], magnitude)) {
      s.flagged[static_cast<std::size_t>(i)] = true;
      s.sigma_hat[i] = 0.0;
      s.t_stats[i] = 0.0;
    } else {
      s.sigma_hat[i] = std::sqrt(var[i]);
      s.t_stats[i] = s.m_bar[i] / s.sigma_hat[i];
    }
  }
  return s;
}

double threshold_scale(const SplitStats& stats, Normalization norm) {
  if (norm == Normalization::paper) return 1.0 / std::sqrt(static_cast<double>(stats.n()));
  return std::sqrt(1.0 / static_cast<double>(stats.nb0) + 1.0 / static_cast<double>(stats.nb1));
}

SplitStats standardize(const SplitStats& stats, Normalization norm) {
  SplitStats out = stats;
  out.t_stats /= threshold_scale(stats, norm);
  return out;
}

Ranking rank_features(const SplitStats& stats) {
  const auto p = static_cast<std::size_t>(stats.dim());
  Ranking r;
  r.order.resize(p);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    if (stats.flagged[a] != stats.flagged[b]) return !stats.flagged[a];
    return std::abs(stats.t_stats[static_cast<Eigen::Index>(a)]) >
           std::abs(stats.t_stats[static_cast<Eigen::Index>(b)]);
  });
  r.usable = static_cast<std::size_t>(std::count(stats.flagged.begin(), stats.flagged.end(), false));
  return r;
}

Selection select_universal(const SplitStats& stats, Normalization norm) {
  const double p = static_cast<double>(stats.dim());
  const double lambda = std::sqrt(2.0 * std::log(p)) * threshold_scale(stats, norm);
  return finish_selection(stats, SelectionMethod::universal, 0.0, 0, lambda, /*strict=*/true);
}

Selection select_fdr(const SplitStats& stats, double b_p, QuantileFamily family, Normalization norm) {
  return select_fdr(stats, rank_features(stats), b_p, family, norm);
}

Selection select_fdr(const SplitStats& stats, const Ranking& ranking, double b_p,
                     QuantileFamily family, Normalization norm) {
  if (!(b_p > 0.0 && b_p < 0.5)) {
    throw DomainError("select_fdr: b_p must lie in (0, 1/2), got " + std::to_string(b_p));
  }
  const long df = static_cast<long>(stats.n()) - 2;
  if (family == QuantileFamily::student && df < 1) {
    throw InsufficientData("select_fdr: Student quantiles need n >= 3");
  }
  const SelectionMethod method =
      family == QuantileFamily::gaussian ? SelectionMethod::fdr : SelectionMethod::student_fdr;
  const double p = static_cast<double>(stats.dim());
  const double scale = threshold_scale(stats, norm);
  auto critical = [&](std::size_t k, bool gaussian) {
    const double level = b_p * static_cast<double>(k) / (2.0 * p);
    return scale * (gaussian ? upper_quantile(level) : student_upper_quantile(level, df));
  };

  // Step-up: the largest qualifying rank. Flagged features (T = 0) can never
  // meet a positive critical value, so only the usable prefix is scanned.
  // Student quantiles dominate gaussian ones in the upper tail, so the
  // gaussian test is a cheap necessary condition.
  std::size_t k_star = 0;
  for (std::size_t k = ranking.usable; k >= 1; --k) {
    const double t = std::abs(stats.t_stats[static_cast<Eigen::Index>(ranking.order[k - 1])]);
    if (t < critical(k, true)) continue;
    if (family == QuantileFamily::student && t < critical(k, false)) continue;
    k_star = k;
    break;
  }
  if (k_star == 0) {
    Selection empty = finish_selection(stats, method, b_p, 0, 0.0, false);
    empty.threshold = critical(1, family == QuantileFamily::gaussian);
    return empty;
  }
  const double lambda = std::abs(stats.t_stats[static_cast<Eigen::Index>(ranking.order[k_star - 1])]);
  return finish_selection(stats, method, b_p, k_star, lambda, false);
}

Selection select_fair(const SplitStats& stats) { return select_fair(stats, rank_features(stats)); }

Selection select_fair(const SplitStats& stats, const Ranking& ranking) {
  const double n = static_cast<double>(stats.n());
  const double n0 = static_cast<double>(stats.n0);
  const double n1 = static_cast<double>(stats.n1);
  if (ranking.usable == 0) return finish_selection(stats, SelectionMethod::fair, 0.0, 0, 0.0, false);

  double sum_t2 = 0.0;
  double max_var = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_m = 1;
  for (std::size_t m = 1; m <= ranking.usable; ++m) {
    const auto idx = static_cast<Eigen::Index>(ranking.order[m - 1]);
    const double t = stats.t_stats[idx];
    sum_t2 += t * t;
    max_var = std::max(max_var, stats.sigma_hat[idx] * stats.sigma_hat[idx]);
    const double md = static_cast<double>(m);
    const double lead = sum_t2 + md * (1.0 / n1 - 1.0 / n0);
    const double value = (n * lead * lead) / (md * n1 * n0 + n1 * n0 * sum_t2) / max_var;
    if (value > best) {
      best = value;
      best_m = m;
    }
  }
  const double lambda = std::abs(stats.t_stats[static_cast<Eigen::Index>(ranking.order[best_m - 1])]);
  return finish_selection(stats, SelectionMethod::fair, 0.0, best_m, lambda, false);
}

Selection select_hc(const SplitStats& stats, double q) { return select_hc(stats, rank_features(stats), q); }

Selection select_hc(const SplitStats& stats, const Ranking& ranking, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("select_hc: q must lie in (0,1]");
  const auto p = static_cast<std::size_t>(stats.dim());
  // p*q can land a rounding error below an integer (e.g. 0.29 * 100).
  const auto upper = static_cast<std::size_t>(std::floor(static_cast<double>(p) * q * (1.0 + 1e-12)));
  if (upper < 1) throw DomainError("select_hc: floor(p q) < 1, nothing to search");
  // k = p has a zero denominator.
  const std::size_t last = std::min(upper, p - 1);
  if (last < 1) throw DomainError("select_hc: no admissible rank for p = " + std::to_string(p));

  const double pd = static_cast<double>(p);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= last; ++k) {
    const double t = std::abs(stats.t_stats[static_cast<Eigen::Index>(ranking.order[k - 1])]);
    const double pi = 2.0 * std_normal_cdf(-t);
    const double kd = static_cast<double>(k);
    const double value = (kd / pd - pi) / std::sqrt(kd * (pd - kd));
    if (value > best) {
      best = value;
      best_k = k;
    }
  }
  // A flagged feature at the chosen rank would give lambda = 0; cap the rank
  // at the usable prefix.
  if (ranking.usable == 0) return finish_selection(stats, SelectionMethod::hc, q, 0, 0.0, false);
  const std::size_t k_eff = std::min(best_k, ranking.usable);
  const double lambda = std::abs(stats.t_stats[static_cast<Eigen::Index>(ranking.order[k_eff - 1])]);
  return finish_selection(stats, SelectionMethod::hc, q, best_k, lambda, false);
}

LinearRule assemble_rule(const SplitStats& stats, const Selection& sel) {
  LinearRule rule;
  rule.direction = Eigen::VectorXd::Zero(stats.dim());
  rule.offset = stats.s_hat;
  for (std::size_t i : sel.indices) {
    const auto j = static_cast<Eigen::Index>(i);
    if (stats.flagged[i]) continue;
    rule.direction[j] = stats.m_bar[j] / (stats.sigma_hat[j] * stats.sigma_hat[j]);
  }
  return rule;
}

LinearRule fit_diag_fisher(const Dataset& data, FisherVariance variance) {
  data.validate();
  const std::vector<std::size_t> rows0 = data.indices_of(0);
  const std::vector<std::size_t> rows1 = data.indices_of(1);
  if (rows0.empty() || rows1.empty() || data.size() < 3) {
    throw InsufficientData("fit_diag_fisher: need n >= 3 with both classes present");
  }
  const ClassMoments c0 = moments(data, rows0, 0, rows0.size());
  const ClassMoments c1 = moments(data, rows1, 0, rows1.size());
  const double n = static_cast<double>(data.size());

  Eigen::VectorXd var;
  if (variance == FisherVariance::global) {
    const Eigen::VectorXd grand = data.rows.colwise().mean().transpose();
    var = (data.rows.rowwise() - grand.transpose()).colwise().squaredNorm().transpose() / (n - 1.0);
  } else {
    if (rows0.size() + rows1.size() < 3) throw InsufficientData("fit_diag_fisher: n too small");
    var = (c0.scatter + c1.scatter) / (n - 2.0);
  }

  LinearRule rule;
  const Eigen::VectorXd diff = c1.mean - c0.mean;
  rule.direction = Eigen::VectorXd::Zero(data.dim());
  for (Eigen::Index i = 0; i < data.dim(); ++i) {
    const double magnitude = std::max(std::abs(c0.mean[i]), std::abs(c1.mean[i]));
    if (!negligible_variance(var[i], magnitude)) rule.direction[i] = diff[i] / var[i];
  }
  rule.offset = 0.5 * (c1.mean + c0.mean);
  return rule;
}

LinearRule fit_prop1_point1(const Dataset& data, const Eigen::VectorXd& true_m10, bool use_estimated_mean) {
  data.validate();
  if (true_m10.size() != data.dim()) {
    throw ContractViolation("fit_prop1_point1: mean difference has the wrong dimension");
  }
  const std::vector<std::size_t> rows0 = data.indices_of(0);
  const std::vector<std::size_t> rows1 = data.indices_of(1);
  if (rows0.empty() || rows1.empty() || data.size() < 3) {
    throw InsufficientData("fit_prop1_point1: need n >= 3 with both classes present");
  }
  const ClassMoments c0 = moments(data, rows0, 0, rows0.size());
  const ClassMoments c1 = moments(data, rows1, 0, rows1.size());

  Eigen::MatrixXd centered(data.size(), data.dim());
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    const Eigen::VectorXd& mean = data.labels[static_cast<std::size_t>(r)] == 0 ? c0.mean : c1.mean;
    centered.row(r) = data.rows.row(r) - mean.transpose();
  }
  // (n0-1) C0 + (n1-1) C1 is the summed within-class scatter.
  Eigen::MatrixXd pooled = centered.transpose() * centered / static_cast<double>(data.size() - 1);
  pooled = 0.5 * (pooled + pooled.transpose()).eval();

  const PsdMatrix inv = pinv_psd(PsdMatrix::dense(std::move(pooled)));
  const Eigen::VectorXd m = use_estimated_mean ? Eigen::VectorXd(c1.mean - c0.mean) : true_m10;
  return LinearRule{inv.apply(m), 0.5 * (c1.mean + c0.mean)};
}

LinearRule fit_prop1_point2(const GaussianPair& model, long n, RngStream& stream) {
  if (n < 1) throw DomainError("fit_prop1_point2: n must be positive");
  if (psd_rank(model.cov()) != model.dim()) {
    throw DomainError("fit_prop1_point2: covariance must be full rank");
  }
  Eigen::VectorXd xi(model.dim());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = stream.normal();
  const Eigen::VectorXd noise = apply_psd_power(model.cov(), xi, -0.5) / std::sqrt(static_cast<double>(n));
  return LinearRule{model.bayes_direction() + noise, model.midpoint()};
}

int predict(const LinearRule& rule, const Eigen::VectorXd& x) { return rule.score(x) >= 0.0 ? 1 : 0; }

std::vector<int> predict(const LinearRule& rule, const Eigen::MatrixXd& rows) {
  if (rows.rows() > 0 && rows.cols() != rule.dim()) {
    throw ContractViolation("predict: feature count does not match the rule");
  }
  std::vector<int> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = predict(rule, Eigen::VectorXd(rows.row(r).transpose()));
  }
  return out;
}

}  // namespace hdlda
