#ifndef MLMDA_SPECIAL_MATH_HPP_INCLUDED
#define MLMDA_SPECIAL_MATH_HPP_INCLUDED

namespace mlmda {

/// Regularized lower incomplete gamma P(a, x), relative error <= 1e-12.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Chi-square survival function: P(X >= x) with k degrees of freedom.
double chi_square_sf(double x, double k);

} // namespace mlmda

#endif
