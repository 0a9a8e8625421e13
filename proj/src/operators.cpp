#include "povmlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace povmlab {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kProjIdempotencyTol = 1e-10;
constexpr double kProjEigTol = 1e-8;

bool exactly_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != std::complex<double>(0.0, 0.0)) return false;
  return true;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("operator must be square and nonempty");
  double max_entry = m_.cwiseAbs().maxCoeff();
  double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermTol * (1.0 + max_entry))
    throw std::invalid_argument("matrix is not Hermitian: deviation " + std::to_string(dev));
  diagonal_ = exactly_diagonal(m_);
}

HermitianOperator HermitianOperator::symmetrized(const Matrix& m) {
  return HermitianOperator((m + m.adjoint()) / 2.0);
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const Eigen::VectorXd& entries) {
  Matrix m = Matrix::Zero(entries.size(), entries.size());
  for (Eigen::Index i = 0; i < entries.size(); ++i) m(i, i) = entries(i);
  return HermitianOperator(std::move(m));
}

State::State(Vector psi) : psi_(std::move(psi)) {
  if (psi_.size() == 0) throw std::invalid_argument("state vector is empty");
  if (std::abs(psi_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("state vector is not normalized");
}

State State::normalized(Vector psi) {
  double n = psi.norm();
  if (!(n > 0)) throw std::invalid_argument("cannot normalize the zero vector");
  return State(psi / n);
}

State State::basis(int dim, int k) {
  if (k < 0 || k >= dim) throw std::invalid_argument("basis index out of range");
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return State(std::move(v));
}

Eigen::VectorXd hermitian_eigenvalues(const HermitianOperator& h) {
  if (h.is_diagonal()) {
    Eigen::VectorXd ev = h.matrix().diagonal().real();
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Hermitian eigensolver failed: dim=" +
                             std::to_string(h.dim()) +
                             " frobenius=" + std::to_string(h.matrix().norm()) +
                             " max|entry|=" + std::to_string(h.matrix().cwiseAbs().maxCoeff()));
  return solver.eigenvalues();
}

double operator_norm(const HermitianOperator& h) {
  Eigen::VectorXd ev = hermitian_eigenvalues(h);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("commutator of operators with mismatched dimensions");
  Matrix c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  Matrix ic = std::complex<double>(0.0, 1.0) * c;
  return operator_norm(HermitianOperator::symmetrized(ic));
}

double expectation(const HermitianOperator& h, const State& psi) {
  if (h.dim() != psi.dim())
    throw std::invalid_argument("expectation with mismatched dimensions");
  std::complex<double> v = psi.vector().dot(h.matrix() * psi.vector());
  if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
    throw std::runtime_error("expectation value has a non-vanishing imaginary part");
  return v.real();
}

std::string to_string(OperatorClass c) {
  switch (c) {
    case OperatorClass::projection: return "projection";
    case OperatorClass::effect: return "effect";
    case OperatorClass::positive: return "positive";
    case OperatorClass::indefinite: return "indefinite";
  }
  return "?";
}

Classification classify(const HermitianOperator& h) {
  Eigen::VectorXd ev = hermitian_eigenvalues(h);
  double min_eig = ev(0);
  double max_eig = ev(ev.size() - 1);
  double norm = std::max(std::abs(min_eig), std::abs(max_eig));
  double tol_pos = 1e-10 * (1.0 + norm);

  bool eigs_zero_one = true;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::min(std::abs(ev(i)), std::abs(ev(i) - 1.0)) > kProjEigTol) {
      eigs_zero_one = false;
      break;
    }
  if (eigs_zero_one) {
    const Matrix& m = h.matrix();
    double defect = operator_norm(HermitianOperator::symmetrized(m * m - m));
    if (defect <= kProjIdempotencyTol) return {OperatorClass::projection, defect};
  }
  if (min_eig >= -tol_pos && max_eig <= 1.0 + tol_pos)
    return {OperatorClass::effect, min_eig < 0 ? min_eig : max_eig};
  if (min_eig >= -tol_pos) return {OperatorClass::positive, max_eig};
  return {OperatorClass::indefinite, min_eig};
}

Effect::Effect(HermitianOperator op) : op_(std::move(op)) {
  Eigen::VectorXd ev = hermitian_eigenvalues(op_);
  min_eig_ = ev(0);
  max_eig_ = ev(ev.size() - 1);
  norm_ = std::max(std::abs(min_eig_), std::abs(max_eig_));
  double tol_pos = 1e-10 * (1.0 + norm_);
  if (min_eig_ < -tol_pos || max_eig_ > 1.0 + tol_pos)
    throw std::invalid_argument("not an effect: spectrum [" + std::to_string(min_eig_) +
                                ", " + std::to_string(max_eig_) + "] leaves [0,1]");
}

Projection::Projection(HermitianOperator op) : op_(std::move(op)) {
  Classification c = classify(op_);
  if (c.kind != OperatorClass::projection)
    throw std::invalid_argument("not a projection (" + to_string(c.kind) +
                                ", witness " + std::to_string(c.witness) + ")");
}

}  // namespace povmlab
