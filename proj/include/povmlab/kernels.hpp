#pragma once

#include "povmlab/sets.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace povmlab {

/// Where the sharp value lambda lives.
enum class KernelDomain { line, unit_interval, naturals };

/// Weight profile for the convolution kernel: positive, continuous,
/// supported on [0,1], integral 1, bounded by `bound`. Validation samples
/// positivity and the bound and checks the normalization by quadrature
/// to 1e-8.
class KernelWeight {
public:
  KernelWeight(std::function<double(double)> f, double bound);

  /// f(y) = 6 y (1-y), bound M = 1.5. All derived constants in the test
  /// suites assume this profile.
  static KernelWeight default_weight();

  double operator()(double y) const { return f_(y); }
  double bound() const { return bound_; }

private:
  std::function<double(double)> f_;
  double bound_;
};

/// Markov kernel mu: Lambda x B -> [0,1]; mu_Delta(lambda) is evaluated
/// lazily per (lambda, set) pair. Kernels are immutable and freely shared.
class MarkovKernel {
public:
  class Impl;

  KernelDomain lambda_domain() const;
  /// Domain of the outcome sets Delta (line for the continuous kernels,
  /// naturals for the binomial kernel).
  Domain target_domain() const;
  const std::string& label() const;

  /// mu_Delta(lambda). Throws DomainMismatchError if the set lives in the
  /// wrong domain, std::invalid_argument if lambda is outside Lambda.
  double operator()(double lambda, const MeasurableSet& delta) const;
  /// mu_{{x}}(lambda): the singleton probe, 0 for atomless kernels.
  double point_mass(double lambda, double x) const;
  bool contains(double lambda) const;

  explicit MarkovKernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
  std::shared_ptr<const Impl> impl_;
};

/// mu_Delta(x) = integral over Delta of the normal density centered at x with
/// width l; evaluated through the normal CDF with absolute error <= 1e-12.
MarkovKernel gaussian_kernel(double l);

/// mu_{n}(m) = C(m,n) eps^n (1-eps)^(m-n) for n <= m, else 0. Log-space
/// binomial evaluation; cofinite sets as 1 minus the finite complement.
MarkovKernel binomial_kernel(double eps);

/// mu_Delta(x) = integral of f(x-y) over Delta ∩ [x-1, x], adaptive
/// quadrature to 1e-10 with interval endpoints as breakpoints.
MarkovKernel convolution_kernel(KernelWeight f);

/// Degenerate kernel mu_Delta(lambda) = chi_Delta(lambda); smearing with it
/// reproduces the sharp observable.
MarkovKernel point_kernel();

/// Convex combination alpha*a + (1-alpha)*b; a Markov kernel again.
MarkovKernel blend(double alpha, const MarkovKernel& a, const MarkovKernel& b);

struct ModulusResult {
  bool applicable;  // false on discrete lambda domains
  double value;
};

/// Empirical continuity modulus: sup of |mu_Delta(l) - mu_Delta(l')| over
/// grid pairs with |l - l'| <= delta_x.
ModulusResult continuity_modulus(const MarkovKernel& kernel, const MeasurableSet& delta,
                                 std::span<const double> grid, double delta_x);

struct KernelAxiomReport {
  double normalization_error;  // max |mu_X(lambda) - 1|
  double additivity_error;     // worst finite-additivity defect observed
  double range_excess;         // worst excursion outside [0,1]
  int range_violations;        // count of sampled values outside [0,1] beyond 1e-9

  bool passes() const {
    return normalization_error <= 1e-9 && additivity_error <= 1e-9 && range_excess <= 1e-9;
  }
};

/// Probability-measure axioms checked over sampled lambdas and a finite
/// disjoint partition of the full target domain.
KernelAxiomReport kernel_axiom_report(const MarkovKernel& kernel,
                                      std::span<const double> lambdas,
                                      std::span<const MeasurableSet> partition);

/// Standard normal CDF, absolute error <= 1e-12 (erfc based).
double normal_cdf(double z);

}  // namespace povmlab
