#pragma once

#include <functional>
#include <span>

namespace growthlab {

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add_exp(double a, double b);

/// log(sum exp(x_i)) with the maximum factored out. Empty input gives -inf.
double log_sum_exp(std::span<const double> xs);

struct QuadratureOptions {
    /// Target bound on (estimated absolute error) / (integral value).
    double rel_tol = 1e-12;
    int max_panels = 20000;
    /// Exponent alpha in (-1, 0) of an integrable endpoint singularity
    /// f ~ (s - a)^alpha at the left end; 0 means none. A leading segment is
    /// then integrated after the substitution s = a + L tau^(1/(1+alpha)).
    double left_singularity = 0.0;
};

struct LogIntegral {
    double log_value;  // log of the integral, -inf for a zero integral
    double rel_error;  // estimated absolute error divided by the integral
    int panels;
};

/// Integrates f over [a, b] given log f, using globally adaptive
/// Gauss-Kronrod (7, 15) panels. Each panel is evaluated as
/// exp(m) * sum w_i exp(log f(x_i) - m) with m the panel maximum, and panel
/// contributions are reduced by log-sum-exp in left-to-right order, so
/// integrands of size exp(1e4) and beyond are handled without overflow.
/// log_f may return -inf where f vanishes.
///
/// Throws QuadratureError when the panel budget is exhausted first.
LogIntegral integrate_log(const std::function<double(double)>& log_f, double a, double b,
                          const QuadratureOptions& opts = {});

/// Same, with the integrand given as a function of the offset d = s - a and
/// of log d. Inside the singular leading segment both are formed directly
/// from the substitution, so integrands that need the exact distance to a
/// (such as (s - a)^alpha near a) see no cancellation. For alpha close to -1
/// d itself may underflow to 0 while log d stays accurate.
LogIntegral integrate_log_offset(const std::function<double(double d, double log_d)>& log_f_at_offset, double a,
                                 double b, const QuadratureOptions& opts = {});

} // namespace growthlab
