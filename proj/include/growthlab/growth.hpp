#pragma once

#include "growthlab/quadrature.hpp"
#include "growthlab/radial.hpp"
#include "growthlab/sharp.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace growthlab {

/// (R, log G(R)) with G(R) = integral over B_R of (u - s0)_+^q.
struct GrowthSample {
    double R;
    double logG;
    double quad_error; // estimated relative error of G(R)
};

enum class RateRegime { power, logarithmic };

const char* to_string(RateRegime regime);

struct RateEstimate {
    RateRegime regime;
    double beta;         // exponent of the power model; 0 in the logarithmic regime
    double rate;         // A * beta (power) or the log-log slope (logarithmic)
    double fit_residual; // max |fit - logG| over the window
    double Rmin;
    double Rmax;
};

/// Outcome of one inequality verification. For every check, margin is
/// oriented so that a non-negative margin means the inequality holds.
struct CheckReport {
    std::string name;
    double lhs;
    double rhs;
    double margin;
    bool passed;
    double tolerance;
};

/// Tolerance rule for inequality checks: absolute + quad_factor * (sum of
/// relative quadrature errors of the integrals involved). Both sides are
/// logarithms, so relative quadrature error is absolute error there.
struct CheckTolerance {
    double absolute = 1e-8;
    double quad_factor = 10.0;
};

struct LogQuantity {
    double log_value;
    double rel_error;
};

/// Smallest t in the profile domain with v(t) >= s0, found by bisection.
/// Throws DomainError if v never reaches s0 below 1e12.
double level_crossing(const RadialProfile& profile, double s0);

/// log(omega * int_{t0}^{R} g(s) (v(s) - s0)^q ds), t0 the level crossing.
/// R <= t0 gives log_value = -inf.
LogQuantity log_ball_integral(const ModelManifold& model, const RadialProfile& profile, double q, double s0,
                              double R, const QuadratureOptions& opts = {});

/// log(omega * int_{t0}^{R} g(s) w(s)^(q-p) v'(s)^p ds): the weighted energy
/// of the superlevel set inside B_R for the p-Laplacian. The endpoint
/// singularity at t0 for q < p is removed by substitution.
LogQuantity log_energy_integral(const ModelManifold& model, const RadialProfile& profile, double p, double q,
                                double s0, double R, const QuadratureOptions& opts = {});

/// log(omega * g(s) * (v(s) - s0)_+^q); -inf when v(s) <= s0.
double log_sphere_integral(const ModelManifold& model, const RadialProfile& profile, double q, double s0,
                           double s);

/// Ball integrals at increasing radii, accumulated panel-wise so each
/// stretch [R_{i-1}, R_i] is integrated once.
std::vector<GrowthSample> sample_growth(const ModelManifold& model, const RadialProfile& profile, double q,
                                        double s0, std::span<const double> radii,
                                        const QuadratureOptions& opts = {});

/// Least-squares tail fit.
///   power:        logG = A R^beta + B log R + D,  rate = A * beta
///   logarithmic:  logG = l log R + D,             rate = l
/// Needs at least 4 finite samples with strictly increasing R. The power
/// regime rejects beta <= 0 (use the logarithmic regime instead). For
/// user-supplied profiles the rate is a fitted tail rate, not a liminf.
RateEstimate estimate_rate(std::span<const GrowthSample> samples, RateRegime regime, double beta = 0.0);

/// Radii used for rate measurement of a sharp example: log-spaced on
/// [1e3, 1e6] when mu == p, otherwise spread below the radius where
/// expected_rate * R^beta reaches log_growth_target.
std::vector<double> default_rate_radii(const SharpExample& example, int count = 8,
                                       double log_growth_target = 1e4);

/// Measured rate for a sharp example over the given radii.
RateEstimate measure_rate(const SharpExample& example, std::span<const double> radii,
                          const QuadratureOptions& opts = {});

/// Relaxation eps for which V(t) >= (lambda - eps)/t^mu for every t >= R1,
/// computed from the exact potential. Throws PreconditionError when no
/// eps < lambda works (R1 not beyond the radius where V turns positive).
double default_phi_eps(const SharpExample& example, double R1);

/// Integrated comparison bound
///   mu < p:  log Phi(R) >= c3/beta (R^beta - R1^beta) + log G(R1),  Phi = G + c2 R^mu H
///   mu = p:  log Phi(R) >= c5 (log R - log R1) + log G(R1),         Phi = G + c6 R^p H
/// with constants relaxed by eps (default_phi_eps when omitted).
CheckReport check_phi_lower_bound(const SharpExample& example, double R1, double R,
                                  std::optional<double> eps = {}, const CheckTolerance& tol = {},
                                  const QuadratureOptions& opts = {});

/// Cutoff estimate prefactor * G(R + h) >= h^p H(R).
CheckReport check_caccioppoli(const SharpExample& example, double R, double h, const CheckTolerance& tol = {},
                              const QuadratureOptions& opts = {});

/// Energy bound for Lu >= 0 on the superlevel set:
///   H(r) <= (p-1)^(p-1)/min(1, gamma^p) * (int_r^R (omega g w^q)^(1/(1-p)) ds)^(1-p).
CheckReport check_prop_pgp(const SharpExample& example, double r, double R, const CheckTolerance& tol = {},
                           const QuadratureOptions& opts = {});

/// Radii at which the inequality suite is evaluated for a sharp example:
/// inner is R1 (phi bound), R (cutoff estimate) and r (energy bound); outer
/// is R (phi bound) and R (energy bound); h is the cutoff width.
struct CheckPoint {
    double inner;
    double outer;
    double h;
};
std::vector<CheckPoint> default_check_points(const SharpExample& example);

/// Log-domain bounds on G(R) from integrating exp((a+qc) s^beta) by parts
/// (mu < p only). lower uses a2 = (a+qc)beta + (1-beta) t0^(-beta) on the
/// stretch [(t0+R)/2, R]; upper uses a1 = (a+qc)beta.
struct LogBracket {
    double lower;
    double upper;
};
LogBracket integration_by_parts_bracket(const SharpExample& example, double R);

enum class L1Verdict { condition_holds, condition_fails, holds_only_for_small_r };

const char* to_string(L1Verdict verdict);

/// Divergence of int^inf phi(s) ds with phi = (sphere integral)^(-1/(p-1))
/// and sphere integral ~ s^alpha. finite_radius_infinite marks phi = +inf on
/// an initial interval (w vanishing on a ball).
L1Verdict classify_l1_condition(double sphere_log_slope, double p, bool finite_radius_infinite);

/// Exponent of phi(s) ~ s^e for sphere integral ~ s^alpha: e = -alpha/(p-1).
double phi_exponent(double sphere_log_slope, double p);

/// Sufficient ball-integral condition: int^inf (s / G(s))^(1/(p-1)) ds
/// diverges for G ~ R^l iff l <= p.
bool ball_growth_condition_holds(double ball_log_slope, double p);

/// Asymptotic exponent of the sphere integral, by a log-log fit over radii.
RateEstimate estimate_sphere_log_slope(const ModelManifold& model, const RadialProfile& profile, double q,
                                       double s0, std::span<const double> radii);

/// g_0(t) = 1, g_n(t) = log t * log log t * ... (n factors).
/// Throws DomainError naming the depth at which an iterate is not positive.
double iterated_log(int n, double t);

/// Radii log-spaced on [lo, hi], count >= 2.
std::vector<double> log_spaced(double lo, double hi, int count);

} // namespace growthlab
