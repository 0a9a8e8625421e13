#include "povmlab/catalog.hpp"

#include "povmlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace povmlab {

namespace {

using namespace std::complex_literals;

constexpr double kOverlapTol = 1e-10;

}  // namespace

OverlapMatrix::OverlapMatrix(Matrix g) : g_(std::move(g)) {
  if (g_.rows() != g_.cols() || g_.rows() == 0)
    throw std::invalid_argument("overlap matrix must be square and nonempty");
  if ((g_ - g_.adjoint()).cwiseAbs().maxCoeff() > kOverlapTol)
    throw std::invalid_argument("overlap matrix is not Hermitian");
  for (Eigen::Index n = 0; n < g_.rows(); ++n)
    if (std::abs(g_(n, n) - 1.0) > kOverlapTol)
      throw std::invalid_argument("overlap diagonal must be 1 (unit vectors)");
  if (g_.cwiseAbs().maxCoeff() > 1.0 + kOverlapTol)
    throw std::invalid_argument("overlap modulus exceeds 1 (Cauchy-Schwarz)");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("overlap matrix eigensolve failed");
  if (solver.eigenvalues()(0) < -kOverlapTol)
    throw std::invalid_argument("overlap matrix is not positive semidefinite "
                                "(would break POVM positivity); min eigenvalue " +
                                std::to_string(solver.eigenvalues()(0)));
}

OverlapMatrix OverlapMatrix::orthonormal(int dim) {
  return OverlapMatrix(Matrix::Identity(dim, dim));
}

OverlapMatrix OverlapMatrix::single_pair(int dim, int s, int t,
                                         std::complex<double> overlap) {
  if (s < 0 || t < 0 || s >= dim || t >= dim || s == t)
    throw std::invalid_argument("overlap pair indices must be distinct and within range");
  if (std::abs(overlap) >= 1.0)
    throw std::invalid_argument("pair overlap must have modulus < 1");
  Matrix g = Matrix::Identity(dim, dim);
  g(s, t) = overlap;
  g(t, s) = std::conj(overlap);
  return OverlapMatrix(std::move(g));
}

OverlapMatrix OverlapMatrix::constant(int dim) {
  return OverlapMatrix(Matrix::Ones(dim, dim));
}

HermitianOperator number_operator(int dim) {
  Eigen::VectorXd n(dim);
  for (int i = 0; i < dim; ++i) n(i) = i;
  return HermitianOperator::diagonal(n);
}

// ---------------------------------------------------------------------------
// Phase observable

namespace {

// integral over the arcs of e^{ikx} dx
std::complex<double> arc_fourier(const CircleSet& delta, int k) {
  std::complex<double> total = 0.0;
  for (const auto& arc : delta.arcs()) {
    if (k == 0)
      total += arc.hi - arc.lo;
    else
      total += (std::exp(1i * (static_cast<double>(k) * arc.hi)) -
                std::exp(1i * (static_cast<double>(k) * arc.lo))) /
               (1i * static_cast<double>(k));
  }
  return total;
}

class PhaseImpl final : public Povm::Impl {
public:
  explicit PhaseImpl(OverlapMatrix overlaps)
      : Impl(Domain::circle, overlaps.dim(), Provenance::explicit_formula,
             "phase observable"),
        g_(std::move(overlaps)) {}

  Matrix evaluate(const MeasurableSet& delta) const override {
    const auto& arcs = std::get<CircleSet>(delta);
    const int d = dim();
    // Fourier coefficients depend only on n - m.
    std::vector<std::complex<double>> coeff(2 * d - 1);
    for (int k = -(d - 1); k <= d - 1; ++k)
      coeff[static_cast<std::size_t>(k + d - 1)] = arc_fourier(arcs, k);
    Matrix m(d, d);
    for (int n = 0; n < d; ++n)
      for (int c = 0; c < d; ++c)
        m(n, c) = g_.matrix()(n, c) * coeff[static_cast<std::size_t>(n - c + d - 1)] /
                  kTwoPi;
    return (m + m.adjoint()) / 2.0;
  }

  Matrix evaluate_point(double) const override {
    return Matrix::Zero(dim(), dim());  // zero-length arcs carry no mass
  }

private:
  OverlapMatrix g_;
};

}  // namespace

Povm phase_povm(const OverlapMatrix& overlaps) {
  return Povm(std::make_shared<PhaseImpl>(overlaps));
}

Povm phase_e1(int dim, int s, int t, std::complex<double> overlap) {
  return phase_povm(OverlapMatrix::single_pair(dim, s, t, overlap));
}

Povm canonical_phase(int dim) {
  if (dim < 2) throw std::invalid_argument("canonical phase needs dim >= 2");
  return phase_povm(OverlapMatrix::constant(dim));
}

double covariance_check(const Povm& phase, std::span<const double> thetas,
                        std::span<const CircleSet> arcs) {
  if (phase.domain() != Domain::circle)
    throw std::invalid_argument("covariance check applies to circle observables");
  const int d = phase.dim();
  double worst = 0.0;
  for (double theta : thetas) {
    Vector diag(d);
    for (int n = 0; n < d; ++n) diag(n) = std::exp(1i * (static_cast<double>(n) * theta));
    for (const auto& delta : arcs) {
      Matrix rotated = diag.asDiagonal() * phase.at(delta).matrix() *
                       diag.conjugate().asDiagonal();
      Matrix shifted = phase.at(delta.shift(theta)).matrix();
      worst = std::max(
          worst, operator_norm(HermitianOperator::symmetrized(rotated - shifted)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Number and position observables

Povm unsharp_number(double eps, int dim) {
  if (dim < 1) throw std::invalid_argument("unsharp number needs dim >= 1");
  std::vector<double> levels(dim);
  for (int m = 0; m < dim; ++m) levels[m] = m;
  return smear(SpectralMeasure::diagonal(std::move(levels)), binomial_kernel(eps));
}

namespace {

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("position grid needs >= 2 points");
  if (!(lo < hi)) throw std::invalid_argument("grid bounds must satisfy lo < hi");
  std::vector<double> xs(count);
  for (int j = 0; j < count; ++j)
    xs[j] = lo + (hi - lo) * static_cast<double>(j) / (count - 1);
  return xs;
}

}  // namespace

Povm bounded_unsharp_position(const KernelWeight& weight, int grid_size) {
  return smear(SpectralMeasure::diagonal(uniform_grid(0.0, 1.0, grid_size)),
               convolution_kernel(weight));
}

Povm gaussian_unsharp_position(double l, double x_min, double x_max, int grid_size) {
  return smear(SpectralMeasure::diagonal(uniform_grid(x_min, x_max, grid_size)),
               gaussian_kernel(l));
}

double halfline_localization(double l, double a, int n) {
  if (!(l > 0)) throw std::invalid_argument("halfline localization needs l > 0");
  if (n < 1) throw std::invalid_argument("halfline localization needs n >= 1");
  // mu_{(-inf,a)}(x) = Phi((a - x)/l), integrated over the unit window.
  auto cdf = [l, a](double x) { return normal_cdf((a - x) / l); };
  double lo = -static_cast<double>(n);
  return adaptive_simpson(cdf, lo, lo + 1.0, 1e-10);
}

}  // namespace povmlab
