#pragma once

#include <Eigen/Dense>

namespace hdlda {

// ---------------------------------------------------------------------------
// Gaussian and Student special functions
// ---------------------------------------------------------------------------

/// phi(x), the standard normal density.
double std_normal_pdf(double x);

/// Phi(x) = P(N(0,1) <= x), computed as erfc(-x/sqrt 2)/2. The C library
/// erfc is accurate to a few ulp over the whole real line, which keeps the
/// absolute error far below 1e-12 and the lower tail accurate in relative
/// terms.
double std_normal_cdf(double x);

/// P(0 < N(0,1) <= x) for x >= 0 (signed for x < 0), computed through erf so
/// that it stays accurate for tiny x.
double std_normal_band(double x);

/// sup |Phi''| = phi(1).
inline constexpr double kMaxNormalCurvature = 0.24197072451914337;

/// z such that Phi(z) = 1 - alpha. Throws DomainError unless 0 < alpha < 1.
double upper_quantile(double alpha);

/// t such that P(T_df > t) = alpha. Throws DomainError for alpha outside
/// (0,1) or df < 1.
double student_upper_quantile(double alpha, long df);

// ---------------------------------------------------------------------------
// Positive semidefinite matrices
// ---------------------------------------------------------------------------

/// Symmetric positive semidefinite matrix, stored either densely or as its
/// diagonal. The diagonal form scales to very large orders and is what the
/// estimators and simulations use.
class PsdMatrix {
 public:
  static PsdMatrix identity(Eigen::Index order);
  /// Throws ContractViolation on negative or non-finite entries.
  static PsdMatrix diagonal(Eigen::VectorXd entries);
  /// Throws ContractViolation if |m - m^T| exceeds 1e-12 anywhere. Positive
  /// semidefiniteness is checked by sym_eig_psd.
  static PsdMatrix dense(Eigen::MatrixXd m);

  Eigen::Index order() const { return order_; }
  bool is_diagonal() const { return diagonal_form_; }

  /// Diagonal entries (either storage).
  Eigen::VectorXd diag() const;
  Eigen::MatrixXd to_dense() const;
  /// Dense storage; only valid when !is_diagonal().
  const Eigen::MatrixXd& dense_entries() const { return dense_; }

  /// m * v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// u^T m v
  double quad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  PsdMatrix() = default;

  Eigen::Index order_ = 0;
  bool diagonal_form_ = true;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd dense_;
};

struct SymEig {
  Eigen::VectorXd values;   // nonincreasing
  Eigen::MatrixXd vectors;  // orthonormal columns, same order as values
};

/// Eigen-decomposition of a PSD matrix. Throws ContractViolation if an
/// eigenvalue falls below -1e-10 * lambda_max.
SymEig sym_eig_psd(const PsdMatrix& m);

inline constexpr double kDefaultPinvTolerance = 1e-10;

/// Moore-Penrose inverse: eigenvalues <= rel_tol * lambda_max map to zero,
/// the others to their reciprocal.
PsdMatrix pinv_psd(const PsdMatrix& m, double rel_tol = kDefaultPinvTolerance);

/// m^power * v through the eigen-decomposition, with eigenvalues below
/// rel_tol * lambda_max treated as zero (so negative powers act as the
/// generalized inverse power). Used for C^{1/2} and C^{-1/2}.
Eigen::VectorXd apply_psd_power(const PsdMatrix& m, const Eigen::VectorXd& v, double power,
                                double rel_tol = kDefaultPinvTolerance);

/// Number of eigenvalues above rel_tol * lambda_max.
Eigen::Index psd_rank(const PsdMatrix& m, double rel_tol = kDefaultPinvTolerance);

}  // namespace hdlda
