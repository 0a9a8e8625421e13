#pragma once

namespace povmlab {

/// Regularized lower incomplete gamma P(a, x), double precision (series for
/// x < a+1, continued fraction otherwise).
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

/// Inverse of chi_square_cdf in x (bisection to 1e-10 relative).
double chi_square_quantile(double p, double dof);

}  // namespace povmlab
