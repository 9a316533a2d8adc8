#include "hdlda/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hdlda/errors.hpp"

namespace hdlda {

GaussianPair::GaussianPair(Eigen::VectorXd mu0, Eigen::VectorXd mu1, PsdMatrix cov)
    : mu0_(std::move(mu0)), mu1_(std::move(mu1)), cov_(std::move(cov)) {
  if (mu0_.size() != mu1_.size() || mu0_.size() != cov_.order()) {
    throw ContractViolation("GaussianPair: mu0, mu1 and cov must share one dimension");
  }
  if (!mu0_.allFinite() || !mu1_.allFinite()) {
    throw ContractViolation("GaussianPair: non-finite mean");
  }
}

Eigen::VectorXd GaussianPair::bayes_direction() const {
  return pinv_psd(cov_).apply(mean_difference());
}

double LinearRule::score(const Eigen::VectorXd& x) const {
  if (x.size() != direction.size() || offset.size() != direction.size()) {
    throw ContractViolation("LinearRule::score: dimension mismatch");
  }
  return direction.dot(x - offset);
}

SparsityClass::SparsityClass(double q_, double radius) : q(q_), radius_r(radius) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("SparsityClass: q must lie in (0,2)");
  if (!(radius_r > 0.0)) throw DomainError("SparsityClass: radius must be positive");
}

bool SparsityClass::contains(const Eigen::VectorXd& v, const PsdMatrix& cov) const {
  return lq_quasi_norm(v, cov, q) <= radius_r;
}

LinearRule bayes_rule(const GaussianPair& model) {
  return LinearRule{model.bayes_direction(), model.midpoint()};
}

double l2pc_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const PsdMatrix& cov) {
  return cov.quad(u, v);
}

double l2pc_norm(const Eigen::VectorXd& v, const PsdMatrix& cov) {
  return std::sqrt(std::max(cov.quad(v, v), 0.0));
}

double conditional_risk(const LinearRule& rule, const GaussianPair& model) {
  if (rule.direction.size() != model.dim() || rule.offset.size() != model.dim()) {
    throw ContractViolation("conditional_risk: rule and model dimensions differ");
  }
  if (!rule.direction.allFinite() || !rule.offset.allFinite()) {
    throw DomainError("conditional_risk: non-finite rule");
  }
  if (rule.degenerate()) return 0.5;

  const double gap1 = rule.direction.dot(model.mu1() - rule.offset);
  const double gap0 = rule.direction.dot(model.mu0() - rule.offset);
  const double sd = l2pc_norm(rule.direction, model.cov());
  if (sd == 0.0) {
    // Direction lies in the null space of C: the score is deterministic.
    const double err1 = gap1 >= 0.0 ? 0.0 : 1.0;
    const double err0 = gap0 >= 0.0 ? 1.0 : 0.0;
    return 0.5 * (err1 + err0);
  }
  return 0.5 * (std_normal_cdf(-gap1 / sd) + std_normal_cdf(gap0 / sd));
}

double bayes_risk(const GaussianPair& model) {
  const double d = 0.5 * l2pc_norm(model.bayes_direction(), model.cov());
  return std_normal_cdf(-d);
}

double excess_risk(const LinearRule& rule, const GaussianPair& model) {
  return conditional_risk(rule, model) - bayes_risk(model);
}

double class_l1_distance(const GaussianPair& model) {
  const double d = 0.5 * l2pc_norm(model.bayes_direction(), model.cov());
  return std::abs(std_normal_cdf(d) - std_normal_cdf(-d));
}

RuleGeometry rule_geometry(const LinearRule& rule, const GaussianPair& model) {
  if (rule.direction.size() != model.dim() || rule.offset.size() != model.dim()) {
    throw ContractViolation("rule_geometry: rule and model dimensions differ");
  }
  const Eigen::VectorXd f10 = model.bayes_direction();
  const double norm_f10 = l2pc_norm(f10, model.cov());
  const double norm_hat = l2pc_norm(rule.direction, model.cov());
  if (norm_f10 == 0.0) throw DegenerateGeometry("rule_geometry: F10 has zero L2(P_C) norm");
  if (norm_hat == 0.0) throw DegenerateGeometry("rule_geometry: rule direction has zero L2(P_C) norm");

  RuleGeometry g;
  g.norm_f10 = norm_f10;
  g.separation_d = 0.5 * norm_f10;
  g.cos_alpha = std::clamp(l2pc_inner(rule.direction, f10, model.cov()) / (norm_hat * norm_f10), -1.0, 1.0);
  g.alpha = std::acos(g.cos_alpha);
  g.d0 = rule.direction.dot(rule.offset - model.midpoint()) / norm_hat;
  return g;
}

RiskBounds th1_bounds(const RuleGeometry& geom) {
  const double norm = geom.norm_f10;
  const double b = (1.0 - geom.cos_alpha) * norm / 2.0;
  const double a = geom.cos_alpha * norm / 2.0;
  RiskBounds out;
  out.lower = 0.5 * std_normal_band(b) * std::exp(-norm * norm / 8.0);
  out.upper = std_normal_band(2.0 * b) * std::exp(-a * a / 2.0) + kMaxNormalCurvature * geom.d0 * geom.d0;
  return out;
}

double lq_quasi_norm(const Eigen::VectorXd& v, const PsdMatrix& cov, double q) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("lq_quasi_norm: q must lie in (0,2)");
  if (v.size() != cov.order()) throw ContractViolation("lq_quasi_norm: dimension mismatch");
  if (psd_rank(cov) != cov.order()) throw DomainError("lq_quasi_norm: covariance must be full rank");
  const Eigen::VectorXd w = apply_psd_power(cov, v, 0.5);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) sum += std::pow(std::abs(w[i]), q);
  return std::pow(sum, 1.0 / q);
}

double oracle_complexity(const GaussianPair& model, long n) {
  if (!model.cov().is_diagonal()) {
    throw Unsupported("oracle_complexity: only defined for diagonal covariances");
  }
  if (n < 1) throw DomainError("oracle_complexity: n must be positive");
  const Eigen::VectorXd m = model.mean_difference();
  const Eigen::VectorXd var = model.cov().diag();
  double total = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m[i] == 0.0) continue;
    total += var[i] > 0.0 ? std::min(static_cast<double>(n) * m[i] * m[i] / var[i], 1.0) : 1.0;
  }
  return total;
}

Dataset sample(const GaussianPair& model, std::size_t n0, std::size_t n1, RngStream& stream) {
  const Eigen::Index p = model.dim();
  const auto n = static_cast<Eigen::Index>(n0 + n1);
  Dataset data;
  data.rows.resize(n, p);
  data.labels.assign(n0, 0);
  data.labels.insert(data.labels.end(), n1, 1);

  if (model.cov().is_diagonal()) {
    const Eigen::VectorXd sd = model.cov().diag().cwiseSqrt();
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::VectorXd& mu = r < static_cast<Eigen::Index>(n0) ? model.mu0() : model.mu1();
      for (Eigen::Index j = 0; j < p; ++j) data.rows(r, j) = mu[j] + sd[j] * stream.normal();
    }
    return data;
  }

  const SymEig eig = sym_eig_psd(model.cov());
  const Eigen::MatrixXd factor =
      eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Eigen::VectorXd z(p);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::VectorXd& mu = r < static_cast<Eigen::Index>(n0) ? model.mu0() : model.mu1();
    for (Eigen::Index j = 0; j < p; ++j) z[j] = stream.normal();
    data.rows.row(r) = (mu + factor * z).transpose();
  }
  return data;
}

}  // namespace hdlda
