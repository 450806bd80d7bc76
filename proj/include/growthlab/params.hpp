#pragma once

#include <optional>

namespace growthlab {

/// Parameter quintuple of the growth problem.
///
/// p     exponent of the operator, p > 1
/// q     integral exponent, q > p - 1
/// mu    decay exponent of the potential, 0 <= mu <= p
/// lambda asymptotic potential level, lambda > 0
/// k     coercivity constant, k > 0
///
/// Construction throws PreconditionError on any violation, so every live
/// Params value is valid.
class Params {
public:
    Params(double p, double q, double mu, double lambda, double k = 1.0);

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    double mu() const noexcept { return mu_; }
    double lambda() const noexcept { return lambda_; }
    double k() const noexcept { return k_; }

    /// True when mu == p, the logarithmic growth regime.
    bool critical_decay() const noexcept { return mu_ == p_; }

private:
    double p_;
    double q_;
    double mu_;
    double lambda_;
    double k_;
};

struct DerivedExponents {
    double p_conj; // p / (p - 1)
    double gamma;  // q - p + 1
    double beta;   // 1 - mu / p
};

DerivedExponents derive_exponents(const Params& params);

/// Sharp exponential growth constant
///   C0 = p * gamma^(1/p') * lambda^(1/p) / ((p-1)^(1/p') * k).
double compute_C0(const Params& params);

/// Unique root C1 in (p, inf) of C^(1/p) (C - p)^(1/p') = C0.
/// Relative accuracy 1e-12. Throws PreconditionError unless p > 1, C0 > 0.
double solve_C1(double p, double C0);

/// Constants of the comparison argument for the growth bounds.
/// c4, c5, c6 are only populated in the mu == p regime.
struct ComparisonConstants {
    double eps;
    double c1;
    double c2;
    double c3;
    std::optional<double> c4;
    std::optional<double> c5;
    std::optional<double> c6;
    double C2;
};

/// Throws PreconditionError unless 0 <= eps < lambda.
ComparisonConstants comparison_constants(const Params& params, double eps = 0.0);

/// Multiplicative constant in the cutoff estimate G(R+h) * prefactor >= h^p H(R):
///   k^(p p') (p-1)^(p-1) 4^p / (gamma * min(1, gamma^(p-1))).
double caccioppoli_prefactor(const Params& params);

enum class LiouvilleVerdict { forced_zero, inconclusive };

/// A solution of the equation whose ball integrals of |u|^q grow at most
/// like exp(C R) with C strictly below C0 must vanish identically.
LiouvilleVerdict liouville_check(const Params& params, double C);

const char* to_string(LiouvilleVerdict verdict);

} // namespace growthlab
