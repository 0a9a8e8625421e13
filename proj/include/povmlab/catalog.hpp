#pragma once

#include "povmlab/povm.hpp"

#include <complex>
#include <span>

namespace povmlab {

/// Gram matrix g_nm = <psi_n|psi_m> of the unit-vector sequence entering the
/// phase observable. Must be Hermitian with unit diagonal, entries bounded
/// by 1 in modulus, and positive semidefinite.
class OverlapMatrix {
public:
  explicit OverlapMatrix(Matrix g);

  /// Orthonormal sequence: g = identity.
  static OverlapMatrix orthonormal(int dim);
  /// Identity except one off-diagonal pair (s,t) with |overlap| < 1.
  static OverlapMatrix single_pair(int dim, int s, int t, std::complex<double> overlap);
  /// All overlaps 1 (psi_n = psi for all n): the canonical phase observable.
  static OverlapMatrix constant(int dim);

  int dim() const { return static_cast<int>(g_.rows()); }
  const Matrix& matrix() const { return g_; }

private:
  Matrix g_;
};

/// Number operator N = diag(0, 1, ..., D-1) in the Fock basis.
HermitianOperator number_operator(int dim);

/// Unsharp number observable {F_n^eps}: the binomial smearing of the number
/// operator, diagonal in the Fock basis with entries mu_n(m), m < D.
Povm unsharp_number(double eps, int dim);

/// Phase observable on the circle with matrix elements
/// g_nm / (2 pi) * integral over Delta of e^{i(n-m)x} dx.
Povm phase_povm(const OverlapMatrix& overlaps);

/// Phase observable from an identity-plus-one-pair overlap matrix; the
/// default instance of the absolutely continuous example.
Povm phase_e1(int dim, int s = 0, int t = 1, std::complex<double> overlap = 0.5);

/// Canonical phase observable (all overlaps 1).
Povm canonical_phase(int dim);

/// Max deviation || e^{iN theta} F(Delta) e^{-iN theta} - F(Delta (+) theta) ||
/// over the supplied rotation angles and arc sets. Exact covariance gives a
/// value at rounding level.
double covariance_check(const Povm& phase, std::span<const double> thetas,
                        std::span<const CircleSet> arcs);

/// Q^f on [0,1]: position grid PVM smeared by the convolution kernel of f.
Povm bounded_unsharp_position(const KernelWeight& weight, int grid_size);

/// Gaussian unsharp position on a uniform grid over [x_min, x_max].
Povm gaussian_unsharp_position(double l, double x_min, double x_max, int grid_size);

/// <psi_n, Q^f((-inf, a)) psi_n> with psi_n the normalized indicator of
/// [-n, -n+1], computed grid-free as the integral of the Gaussian kernel CDF
/// over that window (absolute error <= 1e-9). Nondecreasing in n with
/// limit 1.
double halfline_localization(double l, double a, int n);

}  // namespace povmlab
