#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace povmlab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense complex Hermitian matrix at truncation dimension D. Construction
/// validates hermiticity: max entrywise deviation from the conjugate
/// transpose must stay below 1e-12 * (1 + max|entry|).
class HermitianOperator {
public:
  explicit HermitianOperator(Matrix m);

  /// (M + M^dagger)/2 — for results assembled from rounded arithmetic.
  static HermitianOperator symmetrized(const Matrix& m);
  static HermitianOperator identity(int dim);
  static HermitianOperator diagonal(const Eigen::VectorXd& entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  /// True when every off-diagonal entry is exactly zero; diagonal operators
  /// get exact spectral computations (no eigensolver rounding).
  bool is_diagonal() const { return diagonal_; }

private:
  Matrix m_;
  bool diagonal_;
};

/// Unit vector in C^D (norm enforced to 1 within 1e-12).
class State {
public:
  explicit State(Vector psi);
  static State normalized(Vector psi);
  static State basis(int dim, int k);

  int dim() const { return static_cast<int>(psi_.size()); }
  const Vector& vector() const { return psi_; }

private:
  Vector psi_;
};

/// Ascending real eigenvalues of a Hermitian operator. Exact read-off for
/// diagonal matrices, full eigendecomposition otherwise. Throws
/// std::runtime_error with a condition report if the solver fails.
Eigen::VectorXd hermitian_eigenvalues(const HermitianOperator& h);

/// Spectral norm = max |eigenvalue| (spectral radius equals norm for
/// self-adjoint operators).
double operator_norm(const HermitianOperator& h);

/// ||AB - BA||. The commutator is skew-Hermitian, so i[A,B] is Hermitian and
/// its spectral radius is the commutator's operator norm.
double commutator_norm(const HermitianOperator& a, const HermitianOperator& b);

/// <psi, H psi>; the imaginary part must vanish within 1e-12 scale.
double expectation(const HermitianOperator& h, const State& psi);

enum class OperatorClass { projection, effect, positive, indefinite };

struct Classification {
  OperatorClass kind;
  /// Offending eigenvalue (positivity breaches) or ||H^2 - H|| (projection
  /// defect), whichever decided the classification.
  double witness;
};

std::string to_string(OperatorClass c);

/// Tolerances: projections need ||H^2-H|| <= 1e-10 and eigenvalues in {0,1}
/// within 1e-8; effects need eigenvalues in [-tol, 1+tol] with
/// tol = 1e-10 * (1 + ||H||).
Classification classify(const HermitianOperator& h);

/// Positive operator with spectrum in [0,1]: the value F(Delta). Caches its
/// eigenvalue range so analyzers can reuse the norm without re-solving.
class Effect {
public:
  explicit Effect(HermitianOperator op);

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }
  double norm() const { return norm_; }
  double min_eigenvalue() const { return min_eig_; }
  double max_eigenvalue() const { return max_eig_; }

private:
  HermitianOperator op_;
  double min_eig_, max_eig_, norm_;
};

/// Idempotent effect: ||P^2 - P|| <= 1e-10, eigenvalues in {0,1} within 1e-8.
class Projection {
public:
  explicit Projection(HermitianOperator op);
  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }

private:
  HermitianOperator op_;
};

}  // namespace povmlab
