#pragma once

namespace launchpulse::stats {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
/// Returns 0 for infinite |t| and 1 for t == 0.
double student_t_two_sided(double t, double dof);

}  // namespace launchpulse::stats
