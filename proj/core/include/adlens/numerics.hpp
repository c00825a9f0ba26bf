#pragma once

namespace adlens {

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction otherwise. Target absolute error 1e-10.
double regularized_gamma_p(double a, double x);

// Chi-square survival function: Q(df/2, x/2).
double chi_square_sf(double x, int df);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double regularized_beta(double x, double a, double b);

// Two-sided Student-t tail probability P(|T| >= t) with df degrees of
// freedom.
double student_t_two_sided_sf(double t, double df);

}  // namespace adlens
