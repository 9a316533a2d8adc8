#include "hdlda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "hdlda/errors.hpp"

namespace hdlda {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Acklam's rational approximation of the lower-tail quantile, relative error
// about 1.15e-9, followed by one Halley step against std_normal_cdf.
double lower_quantile_tail(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // p <= 0.5 here, so Phi(x) - p has no cancellation problem in the tail.
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_band(double x) { return 0.5 * std::erf(x * kInvSqrt2); }

double upper_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("upper_quantile: alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  if (alpha == 0.5) return 0.0;
  // Work in whichever tail is smaller so the probability keeps full precision.
  if (alpha < 0.5) return -lower_quantile_tail(alpha);
  return lower_quantile_tail(1.0 - alpha);
}

double student_upper_quantile(double alpha, long df) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("student_upper_quantile: alpha must lie in (0,1), got " +
                      std::to_string(alpha));
  }
  if (df < 1) {
    throw DomainError("student_upper_quantile: df must be >= 1, got " + std::to_string(df));
  }
  if (alpha == 0.5) return 0.0;
  const boost::math::students_t_distribution<double> dist(static_cast<double>(df));
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

// ---------------------------------------------------------------------------

PsdMatrix PsdMatrix::identity(Eigen::Index order) {
  return diagonal(Eigen::VectorXd::Ones(order));
}

PsdMatrix PsdMatrix::diagonal(Eigen::VectorXd entries) {
  for (Eigen::Index i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i]) || entries[i] < 0.0) {
      throw ContractViolation("PsdMatrix::diagonal: entry " + std::to_string(i) +
                              " is negative or non-finite");
    }
  }
  PsdMatrix m;
  m.order_ = entries.size();
  m.diagonal_form_ = true;
  m.diag_ = std::move(entries);
  return m;
}

PsdMatrix PsdMatrix::dense(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols()) {
    throw ContractViolation("PsdMatrix::dense: matrix is not square");
  }
  if (!entries.allFinite()) {
    throw ContractViolation("PsdMatrix::dense: non-finite entry");
  }
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (entries.size() > 0 && asym > 1e-12) {
    throw ContractViolation("PsdMatrix::dense: matrix is not symmetric (max |m - m^T| = " +
                            std::to_string(asym) + ")");
  }
  PsdMatrix m;
  m.order_ = entries.rows();
  m.diagonal_form_ = false;
  m.dense_ = std::move(entries);
  return m;
}

Eigen::VectorXd PsdMatrix::diag() const {
  return diagonal_form_ ? diag_ : Eigen::VectorXd(dense_.diagonal());
}

Eigen::MatrixXd PsdMatrix::to_dense() const {
  if (diagonal_form_) return diag_.asDiagonal();
  return dense_;
}

Eigen::VectorXd PsdMatrix::apply(const Eigen::VectorXd& v) const {
  if (v.size() != order_) {
    throw ContractViolation("PsdMatrix::apply: dimension mismatch");
  }
  if (diagonal_form_) return diag_.cwiseProduct(v);
  return dense_ * v;
}

double PsdMatrix::quad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  if (u.size() != order_ || v.size() != order_) {
    throw ContractViolation("PsdMatrix::quad: dimension mismatch");
  }
  if (diagonal_form_) return (u.array() * diag_.array() * v.array()).sum();
  return u.dot(dense_ * v);
}

// ---------------------------------------------------------------------------

SymEig sym_eig_psd(const PsdMatrix& m) {
  const Eigen::Index p = m.order();
  SymEig out;
  if (m.is_diagonal()) {
    const Eigen::VectorXd d = m.diag();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return d[a] > d[b]; });
    out.values.resize(p);
    out.vectors = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
      out.values[k] = d[idx[static_cast<std::size_t>(k)]];
      out.vectors(idx[static_cast<std::size_t>(k)], k) = 1.0;
    }
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense_entries());
  if (solver.info() != Eigen::Success) {
    throw ContractViolation("sym_eig_psd: eigen-decomposition did not converge");
  }
  // Eigen returns ascending order.
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  if (p > 0) {
    const double lmax = std::max(out.values[0], 0.0);
    if (out.values[p - 1] < -1e-10 * lmax) {
      throw ContractViolation("sym_eig_psd: matrix is not positive semidefinite (min eigenvalue " +
                              std::to_string(out.values[p - 1]) + ")");
    }
  }
  return out;
}

namespace {

Eigen::VectorXd spectral_map(const Eigen::VectorXd& values, double rel_tol, double power) {
  const double lmax = values.size() > 0 ? std::max(values.maxCoeff(), 0.0) : 0.0;
  Eigen::VectorXd mapped(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mapped[i] = (values[i] > rel_tol * lmax && values[i] > 0.0) ? std::pow(values[i], power) : 0.0;
  }
  return mapped;
}

void check_tol(double rel_tol) {
  if (!(rel_tol >= 0.0 && rel_tol < 1.0)) {
    throw DomainError("pseudo-inverse tolerance must lie in [0,1)");
  }
}

}  // namespace

PsdMatrix pinv_psd(const PsdMatrix& m, double rel_tol) {
  check_tol(rel_tol);
  if (m.is_diagonal()) {
    return PsdMatrix::diagonal(spectral_map(m.diag(), rel_tol, -1.0));
  }
  const SymEig eig = sym_eig_psd(m);
  const Eigen::VectorXd inv = spectral_map(eig.values, rel_tol, -1.0);
  Eigen::MatrixXd out = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return PsdMatrix::dense(std::move(out));
}

Eigen::VectorXd apply_psd_power(const PsdMatrix& m, const Eigen::VectorXd& v, double power,
                                double rel_tol) {
  check_tol(rel_tol);
  if (v.size() != m.order()) {
    throw ContractViolation("apply_psd_power: dimension mismatch");
  }
  if (m.is_diagonal()) {
    return spectral_map(m.diag(), rel_tol, power).cwiseProduct(v);
  }
  const SymEig eig = sym_eig_psd(m);
  const Eigen::VectorXd scaled = spectral_map(eig.values, rel_tol, power);
  return eig.vectors * scaled.cwiseProduct(eig.vectors.transpose() * v);
}

Eigen::Index psd_rank(const PsdMatrix& m, double rel_tol) {
  check_tol(rel_tol);
  const Eigen::VectorXd values = m.is_diagonal() ? m.diag() : sym_eig_psd(m).values;
  const Eigen::VectorXd mapped = spectral_map(values, rel_tol, 0.0);
  return static_cast<Eigen::Index>((mapped.array() > 0.0).count());
}

}  // namespace hdlda
