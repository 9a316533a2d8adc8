#pragma once

#include <Eigen/Dense>

#include "hdlda/dataset.hpp"
#include "hdlda/numerics.hpp"
#include "hdlda/rng.hpp"

namespace hdlda {

/// Two Gaussian classes N(mu0, C) and N(mu1, C) with equal priors.
class GaussianPair {
 public:
  /// Throws ContractViolation if the dimensions disagree.
  GaussianPair(Eigen::VectorXd mu0, Eigen::VectorXd mu1, PsdMatrix cov);

  Eigen::Index dim() const { return mu0_.size(); }
  const Eigen::VectorXd& mu0() const { return mu0_; }
  const Eigen::VectorXd& mu1() const { return mu1_; }
  const PsdMatrix& cov() const { return cov_; }

  /// m10 = mu1 - mu0
  Eigen::VectorXd mean_difference() const { return mu1_ - mu0_; }
  /// s10 = (mu1 + mu0) / 2
  Eigen::VectorXd midpoint() const { return 0.5 * (mu1_ + mu0_); }
  /// F10 = C^- m10
  Eigen::VectorXd bayes_direction() const;

 private:
  Eigen::VectorXd mu0_;
  Eigen::VectorXd mu1_;
  PsdMatrix cov_;
};

/// Linear classifier x -> 1 if <direction, x - offset> >= 0, else 0.
struct LinearRule {
  Eigen::VectorXd direction;
  Eigen::VectorXd offset;

  Eigen::Index dim() const { return direction.size(); }
  /// All-zero direction: the rule sends everything to class 1.
  bool degenerate() const { return direction.size() == 0 || direction.isZero(0.0); }
  double score(const Eigen::VectorXd& x) const;
};

/// Angle and offset error of a rule relative to the Bayes rule, in the
/// L2(P_C) geometry.
struct RuleGeometry {
  double norm_f10 = 0.0;      // ||F10||_{L2(P_C)}
  double cos_alpha = 1.0;
  double alpha = 0.0;         // radians in [0, pi]
  double d0 = 0.0;            // <F, s - s10> / ||F||_{L2(P_C)}
  double separation_d = 0.0;  // norm_f10 / 2
};

/// l^q ball {v : ||C^{1/2} v||_q <= R}, 0 < q < 2.
struct SparsityClass {
  double q;
  double radius_r;

  /// Throws DomainError unless 0 < q < 2 and radius_r > 0.
  SparsityClass(double q_, double radius);
  bool contains(const Eigen::VectorXd& v, const PsdMatrix& cov) const;
};

struct RiskBounds {
  double lower;
  double upper;
};

/// direction = C^- (mu1 - mu0), offset = (mu1 + mu0) / 2.
LinearRule bayes_rule(const GaussianPair& model);

/// u^T C v. Throws ContractViolation on dimension mismatch.
double l2pc_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const PsdMatrix& cov);
double l2pc_norm(const Eigen::VectorXd& v, const PsdMatrix& cov);

/// Exact misclassification probability of a rule under equal priors:
///   1/2 [ Phi(-<F, mu1 - s> / ||F||_C) + Phi(<F, mu0 - s> / ||F||_C) ].
/// A zero direction classifies everything as 1 and has risk 1/2.
/// Throws DomainError on non-finite inputs.
double conditional_risk(const LinearRule& rule, const GaussianPair& model);

/// Phi(-d) with d = ||F10||_{L2(P_C)} / 2.
double bayes_risk(const GaussianPair& model);

/// conditional_risk - bayes_risk
double excess_risk(const LinearRule& rule, const GaussianPair& model);

/// Total variation style distance |Phi(d) - Phi(-d)| between the classes.
double class_l1_distance(const GaussianPair& model);

/// Throws DegenerateGeometry when either F10 or the rule direction has zero
/// L2(P_C) norm.
RuleGeometry rule_geometry(const LinearRule& rule, const GaussianPair& model);

/// Excess-risk sandwich for a rule with the given geometry. With
/// b = (1 - cos a) ||F10|| / 2 and a' = cos a ||F10|| / 2:
///   lower = 1/2 P(0 < N <= b) exp(-||F10||^2 / 8)
///   upper = P(0 < N <= 2b) exp(-a'^2 / 2) + phi(1) d0^2
/// The upper bound uses explicit constants (gaussian strip with factor 1,
/// curvature term with sup|Phi''|) in place of an unspecified universal c.
RiskBounds th1_bounds(const RuleGeometry& geom);

/// (sum_i |(C^{1/2} v)_i|^q)^{1/q}. Throws DomainError unless 0 < q < 2, or
/// if cov is rank deficient.
double lq_quasi_norm(const Eigen::VectorXd& v, const PsdMatrix& cov, double q);

/// sum_i min(n m10[i]^2 / sigma^2[i], 1). Throws Unsupported for a dense
/// covariance. Features with zero variance and zero mean gap contribute 0;
/// zero variance with a nonzero gap contributes 1.
double oracle_complexity(const GaussianPair& model, long n);

/// n0 rows from N(mu0, C) followed by n1 rows from N(mu1, C). Dense
/// covariances are factored through their eigen-decomposition.
Dataset sample(const GaussianPair& model, std::size_t n0, std::size_t n1, RngStream& stream);

}  // namespace hdlda
