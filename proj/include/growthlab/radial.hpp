#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

namespace growthlab {

/// Derivatives of a radial function in scaled form:
///   f^(k)(t) = exp(log_scale) * d[k],  k = 0, 1, 2.
/// Exponential families factor out their growth so that values of
/// order exp(1e4) stay representable.
struct Jet {
    double log_scale = 0.0;
    double d0 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

namespace family {

/// t^c
struct PowerLaw {
    double c;
};

/// exp(c t^beta)
struct ExpPower {
    double c;
    double beta;
};

/// slope * t + offset
struct Affine {
    double slope;
    double offset;
};

/// t^((p - n)/(p - 1)) - 1, the radial p-harmonic function on R^n \ {0}.
struct PHarmonicRn {
    int n;
    double p;
};

/// Arbitrary user-supplied jet.
struct Custom {
    std::function<Jet(double)> jet;
    std::string label;
};

} // namespace family

/// A smooth radial function t -> f(t) with analytic derivatives on the
/// domain t >= t_min. Used both for profiles v and warps g.
class RadialFunction {
public:
    using Family = std::variant<family::PowerLaw, family::ExpPower, family::Affine, family::PHarmonicRn,
                                family::Custom>;

    RadialFunction(Family fam, double t_min);

    static RadialFunction power_law(double c, double t_min = 1.0);
    static RadialFunction exp_power(double c, double beta, double t_min = 1.0);
    static RadialFunction affine(double slope, double offset, double t_min = 1.0);
    static RadialFunction p_harmonic_rn(int n, double p, double t_min = 1.0);
    static RadialFunction custom(std::function<Jet(double)> jet, double t_min, std::string label = "custom");

    const Family& family() const noexcept { return family_; }
    double t_min() const noexcept { return t_min_; }
    bool in_domain(double t) const noexcept;
    std::string describe() const;

    /// Throws DomainError outside the valid domain.
    Jet jet(double t) const;

    /// Unscaled value and derivatives; may overflow for exponential families.
    double value(double t) const;
    double first(double t) const;
    double second(double t) const;

    /// log f(t); -inf when f(t) <= 0.
    double log_value(double t) const;

    /// log(f(t) - level); -inf when f(t) <= level. Accurate near the
    /// crossing point for the power and exponential families.
    double log_excess(double t, double level) const;

    /// log(f(t + d) - f(t)) for d > 0; -inf when f does not increase. For
    /// the power and exponential families this stays accurate as d -> 0.
    double log_rise(double t, double d) const;

    /// f'(t) / f(t).
    double log_derivative(double t) const;

private:
    Family family_;
    double t_min_;
};

using RadialProfile = RadialFunction;

/// Rotationally symmetric model: metric dr^2 + g(r)^2 dtheta^2, sphere
/// measure |dB_s| = omega * g(s).
struct ModelManifold {
    RadialFunction warp;
    double omega;

    ModelManifold(RadialFunction warp, double omega);

    /// g = exp(a t^beta), the exponential model surface.
    static ModelManifold exp_power(double a, double beta, double t_min = 1.0);
    /// g = t^exponent.
    static ModelManifold power_law(double exponent, double t_min = 1.0);
    /// g = t^(n-1), omega = area of the unit (n-1)-sphere.
    static ModelManifold euclidean(int n, double t_min = 1.0);

    double log_g(double s) const { return warp.log_value(s); }
    double log_sphere_measure(double s) const;
    double g_ratio(double s) const { return warp.log_derivative(s); }
};

/// Area of the unit sphere S^(n-1) in R^n.
double unit_sphere_area(int n);

/// Radial potential r -> V(r) > 0 with declared asymptotics r^mu V(r) -> lambda_asym.
struct Potential {
    std::function<double(double)> eval;
    double lambda_asym;
    double mu;
    /// Smallest radius from which V is guaranteed positive.
    double safe_radius = 0.0;

    double operator()(double r) const { return eval(r); }
};

/// Delta_p u for u = v(r) in scaled form: the true value is
/// exp((p-1) * log_scale) * mantissa.
struct ScaledValue {
    double log_scale;
    double mantissa;

    double value() const;
};

/// Radial p-Laplacian (p-1) v'^(p-2) v'' + (g'/g) v'^(p-1), scaled.
/// Throws DomainError when r leaves either domain or v'(r) <= 0.
ScaledValue p_laplacian_radial_scaled(const ModelManifold& model, const RadialProfile& profile, double p,
                                      double r);

/// Unscaled radial p-Laplacian; may overflow for exponential profiles.
double p_laplacian_radial(const ModelManifold& model, const RadialProfile& profile, double p, double r);

/// Independent finite-difference reevaluation of the radial p-Laplacian:
/// 5-point central differences of the profile values for v', v'' and of
/// log g for g'/g. Returns
///   |FD - analytic| / max(1, |analytic|)
/// on the scaled mantissa. Throws DomainError if r - 2h leaves the domain.
double fd_cross_check(const ModelManifold& model, const RadialProfile& profile, double p, double r, double h);

/// Step for fd_cross_check: a fraction (|log v| eps)^(1/6) of the smaller of
/// r and the local length scale 1/|(log v)'|, clipped to the domain.
double fd_default_step(const RadialProfile& profile, double r);

/// Exact potential making the extremal profile an equality solution.
/// mu < p:  ((p-1)(1 + (beta-1)/(c beta r^beta)) c + a) beta^p c^(p-1) / r^mu
/// mu = p:  c^(p-1) ((p-1)c + a) / r^p
/// Requires r >= 1, c > 0 and (p-1)c + a > 0.
double potential_sharp(double p, double mu, double a, double c, double r);

/// Smallest r such that potential_sharp stays positive on [r, inf).
double potential_sharp_safe_radius(double p, double mu, double a, double c);

/// Potential object wrapping potential_sharp with its asymptotic data.
Potential make_sharp_potential(double p, double mu, double a, double c);

/// max over grid of (V v^(p-1) - Delta_p u) / (V v^(p-1)).
/// <= tol: verified subsolution; |.| <= tol: verified equation.
/// Grid radii must lie in both domains and satisfy v > s0.
double subsolution_residual(const ModelManifold& model, const RadialProfile& profile, const Potential& V,
                            double p, double s0, std::span<const double> grid);

/// Same as subsolution_residual but returning the max of |.|.
double max_abs_equation_residual(const ModelManifold& model, const RadialProfile& profile, const Potential& V,
                                 double p, double s0, std::span<const double> grid);

} // namespace growthlab
