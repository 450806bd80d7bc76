#include "growthlab/radial.hpp"

#include "growthlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace growthlab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log(exp(x) - 1) for x > 0
double log_expm1(double x) {
    if (x > 30.0)
        return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

// log(exp(log_v) - level) given log_v and the level, for positive levels
// written through x = log_v - log(level).
double log_excess_from_log(double log_v, double level) {
    if (level > 0.0) {
        const double x = log_v - std::log(level);
        if (!(x > 0.0))
            return neg_inf;
        return std::log(level) + log_expm1(x);
    }
    if (level == 0.0)
        return log_v;
    return log_v + std::log1p(-level * std::exp(-log_v));
}

std::string fmt_num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace

RadialFunction::RadialFunction(Family fam, double t_min) : family_(std::move(fam)), t_min_(t_min) {
    if (!(t_min > 0.0) || !std::isfinite(t_min))
        throw PreconditionError("radial function: t_min must be positive and finite");
    std::visit(overloaded{
                   [](const family::PowerLaw&) {},
                   [](const family::ExpPower& f) {
                       if (!(f.beta > 0.0))
                           throw PreconditionError("ExpPower: beta must be > 0");
                   },
                   [](const family::Affine&) {},
                   [](const family::PHarmonicRn& f) {
                       if (f.n < 1 || !(f.p > 1.0))
                           throw PreconditionError("PHarmonicRn: need n >= 1 and p > 1");
                   },
                   [](const family::Custom& f) {
                       if (!f.jet)
                           throw PreconditionError("Custom radial function needs a jet callback");
                   },
               },
               family_);
}

RadialFunction RadialFunction::power_law(double c, double t_min) { return {family::PowerLaw{c}, t_min}; }

RadialFunction RadialFunction::exp_power(double c, double beta, double t_min) {
    return {family::ExpPower{c, beta}, t_min};
}

RadialFunction RadialFunction::affine(double slope, double offset, double t_min) {
    return {family::Affine{slope, offset}, t_min};
}

RadialFunction RadialFunction::p_harmonic_rn(int n, double p, double t_min) {
    return {family::PHarmonicRn{n, p}, t_min};
}

RadialFunction RadialFunction::custom(std::function<Jet(double)> jet, double t_min, std::string label) {
    return {family::Custom{std::move(jet), std::move(label)}, t_min};
}

bool RadialFunction::in_domain(double t) const noexcept { return std::isfinite(t) && t >= t_min_; }

std::string RadialFunction::describe() const {
    return std::visit(overloaded{
                          [](const family::PowerLaw& f) { return "t^" + fmt_num(f.c); },
                          [](const family::ExpPower& f) {
                              return "exp(" + fmt_num(f.c) + " t^" + fmt_num(f.beta) + ")";
                          },
                          [](const family::Affine& f) { return fmt_num(f.slope) + " t + " + fmt_num(f.offset); },
                          [](const family::PHarmonicRn& f) {
                              return "t^((" + fmt_num(f.p) + "-" + std::to_string(f.n) + ")/(" + fmt_num(f.p)
                                     + "-1)) - 1";
                          },
                          [](const family::Custom& f) { return f.label; },
                      },
                      family_);
}

Jet RadialFunction::jet(double t) const {
    if (!in_domain(t))
        throw DomainError("radial function " + describe() + ": t=" + fmt_num(t) + " outside domain [" +
                          fmt_num(t_min_) + ", inf)");
    return std::visit(overloaded{
                          [t](const family::PowerLaw& f) {
                              return Jet{f.c * std::log(t), 1.0, f.c / t, f.c * (f.c - 1.0) / (t * t)};
                          },
                          [t](const family::ExpPower& f) {
                              const double tb = std::pow(t, f.beta);
                              const double cb = f.c * f.beta;
                              const double d1 = cb * tb / t;
                              const double d2 = cb * ((f.beta - 1.0) * tb / (t * t) + cb * tb * tb / (t * t));
                              return Jet{f.c * tb, 1.0, d1, d2};
                          },
                          [t](const family::Affine& f) { return Jet{0.0, f.slope * t + f.offset, f.slope, 0.0}; },
                          [t](const family::PHarmonicRn& f) {
                              const double e = (f.p - f.n) / (f.p - 1.0);
                              const double te = std::pow(t, e);
                              return Jet{0.0, te - 1.0, e * te / t, e * (e - 1.0) * te / (t * t)};
                          },
                          [t](const family::Custom& f) { return f.jet(t); },
                      },
                      family_);
}

double RadialFunction::value(double t) const {
    const auto j = jet(t);
    return std::exp(j.log_scale) * j.d0;
}

double RadialFunction::first(double t) const {
    const auto j = jet(t);
    return std::exp(j.log_scale) * j.d1;
}

double RadialFunction::second(double t) const {
    const auto j = jet(t);
    return std::exp(j.log_scale) * j.d2;
}

double RadialFunction::log_value(double t) const {
    const auto j = jet(t);
    if (!(j.d0 > 0.0))
        return neg_inf;
    return j.log_scale + std::log(j.d0);
}

double RadialFunction::log_excess(double t, double level) const {
    if (std::holds_alternative<family::PowerLaw>(family_) || std::holds_alternative<family::ExpPower>(family_)) {
        // d0 == 1 for both, so log_scale is log f exactly
        return log_excess_from_log(jet(t).log_scale, level);
    }
    const auto j = jet(t);
    const double diff = j.d0 - level * std::exp(-j.log_scale);
    if (!(diff > 0.0))
        return neg_inf;
    return j.log_scale + std::log(diff);
}

double RadialFunction::log_rise(double t, double d) const {
    if (!(d > 0.0))
        return neg_inf;
    double dL;
    if (const auto* f = std::get_if<family::PowerLaw>(&family_)) {
        dL = f->c * std::log1p(d / t);
    } else if (const auto* f = std::get_if<family::ExpPower>(&family_)) {
        dL = f->c * std::pow(t, f->beta) * std::expm1(f->beta * std::log1p(d / t));
    } else {
        const auto j0 = jet(t);
        const auto j1 = jet(t + d);
        const double diff = j1.d0 - j0.d0 * std::exp(j0.log_scale - j1.log_scale);
        return diff > 0.0 ? j1.log_scale + std::log(diff) : neg_inf;
    }
    if (!(dL > 0.0))
        return neg_inf;
    return jet(t).log_scale + log_expm1(dL);
}

double RadialFunction::log_derivative(double t) const {
    const auto j = jet(t);
    return j.d1 / j.d0;
}

ModelManifold::ModelManifold(RadialFunction w, double om) : warp(std::move(w)), omega(om) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw PreconditionError("model manifold: sphere factor omega must be positive");
}

ModelManifold ModelManifold::exp_power(double a, double beta, double t_min) {
    return {RadialFunction::exp_power(a, beta, t_min), 2.0 * std::numbers::pi};
}

ModelManifold ModelManifold::power_law(double exponent, double t_min) {
    return {RadialFunction::power_law(exponent, t_min), 2.0 * std::numbers::pi};
}

ModelManifold ModelManifold::euclidean(int n, double t_min) {
    if (n < 1)
        throw PreconditionError("euclidean model needs n >= 1");
    return {RadialFunction::power_law(n - 1.0, t_min), unit_sphere_area(n)};
}

double ModelManifold::log_sphere_measure(double s) const { return std::log(omega) + log_g(s); }

double unit_sphere_area(int n) {
    if (n < 1)
        throw PreconditionError("unit_sphere_area: n >= 1");
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ScaledValue::value() const { return std::exp(log_scale) * mantissa; }

namespace {

double radial_operator_mantissa(double p, double d1, double d2, double g_ratio) {
    return (p - 1.0) * std::pow(d1, p - 2.0) * d2 + g_ratio * std::pow(d1, p - 1.0);
}

} // namespace

ScaledValue p_laplacian_radial_scaled(const ModelManifold& model, const RadialProfile& profile, double p,
                                      double r) {
    if (!model.warp.in_domain(r))
        throw DomainError("p_laplacian_radial: r=" + fmt_num(r) + " outside the warp domain");
    const auto j = profile.jet(r);
    if (!(j.d1 > 0.0))
        throw DomainError("p_laplacian_radial: profile is not increasing at r=" + fmt_num(r));
    return {j.log_scale, radial_operator_mantissa(p, j.d1, j.d2, model.g_ratio(r))};
}

double p_laplacian_radial(const ModelManifold& model, const RadialProfile& profile, double p, double r) {
    const auto s = p_laplacian_radial_scaled(model, profile, p, r);
    return std::exp((p - 1.0) * s.log_scale) * s.mantissa;
}

double fd_cross_check(const ModelManifold& model, const RadialProfile& profile, double p, double r, double h) {
    if (!(h > 0.0))
        throw PreconditionError("fd_cross_check: step must be positive");
    const double lo = r - 2.0 * h;
    if (!profile.in_domain(lo) || !model.warp.in_domain(lo))
        throw DomainError("fd_cross_check: stencil [" + fmt_num(lo) + ", " + fmt_num(r + 2.0 * h) +
                          "] leaves the valid domain");

    const auto analytic = p_laplacian_radial_scaled(model, profile, p, r);

    // values normalised by the scale at r, so exponential families stay finite
    const double ref = profile.jet(r).log_scale;
    auto f = [&](double t) {
        const auto j = profile.jet(t);
        return std::exp(j.log_scale - ref) * j.d0;
    };
    const double fm2 = f(r - 2.0 * h);
    const double fm1 = f(r - h);
    const double f0 = f(r);
    const double fp1 = f(r + h);
    const double fp2 = f(r + 2.0 * h);
    const double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    const double d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    const double g_ratio = (model.log_g(r - 2.0 * h) - 8.0 * model.log_g(r - h) + 8.0 * model.log_g(r + h) -
                            model.log_g(r + 2.0 * h)) /
                           (12.0 * h);

    const double fd = radial_operator_mantissa(p, d1, d2, g_ratio);
    return std::abs(fd - analytic.mantissa) / std::max(1.0, std::abs(analytic.mantissa));
}

double fd_default_step(const RadialProfile& profile, double r) {
    const auto j = profile.jet(r);
    const double slope = std::abs(j.d1 / j.d0);
    const double length = std::min(r, 1.0 / std::max(slope, 1e-300));
    // rounding in the stencil values grows with |log v|; balance it against
    // the h^4 truncation error of the 5-point formulas
    const double magnitude = std::max({1.0, std::abs(j.log_scale), r * slope});
    double h = std::pow(magnitude * std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * length;
    const double room = (r - profile.t_min()) / 2.0;
    if (h >= room)
        h = 0.5 * room;
    return h;
}

namespace {

void require_acex(double p, double a, double c) {
    if (!(c > 0.0) || !((p - 1.0) * c + a > 0.0))
        throw PreconditionError("sharp potential: need c > 0 and (p-1)c + a > 0");
}

} // namespace

double potential_sharp(double p, double mu, double a, double c, double r) {
    require_acex(p, a, c);
    if (!(r >= 1.0))
        throw PreconditionError("potential_sharp: r must be >= 1");
    if (mu == p)
        return std::pow(c, p - 1.0) * ((p - 1.0) * c + a) / std::pow(r, p);
    const double beta = 1.0 - mu / p;
    const double rb = std::pow(r, beta);
    const double inner = (p - 1.0) * (1.0 + (beta - 1.0) / (c * beta * rb)) * c + a;
    return inner * std::pow(beta, p) * std::pow(c, p - 1.0) / std::pow(r, mu);
}

double potential_sharp_safe_radius(double p, double mu, double a, double c) {
    require_acex(p, a, c);
    if (mu == p)
        return 1.0;
    const double beta = 1.0 - mu / p;
    const double threshold = (p - 1.0) * (1.0 - beta) / (beta * ((p - 1.0) * c + a));
    return std::max(1.0, std::pow(threshold, 1.0 / beta));
}

Potential make_sharp_potential(double p, double mu, double a, double c) {
    require_acex(p, a, c);
    const double beta = mu == p ? 1.0 : 1.0 - mu / p;
    const double lambda = std::pow(beta, p) * std::pow(c, p - 1.0) * ((p - 1.0) * c + a);
    return Potential{[=](double r) { return potential_sharp(p, mu, a, c, r); }, lambda, mu,
                     potential_sharp_safe_radius(p, mu, a, c)};
}

namespace {

template <class Reduce>
double residual_sweep(const ModelManifold& model, const RadialProfile& profile, const Potential& V, double p,
                      double s0, std::span<const double> grid, Reduce reduce) {
    if (grid.empty())
        throw PreconditionError("subsolution_residual: empty grid");
    double worst = neg_inf;
    for (double r : grid) {
        if (profile.log_excess(r, s0) == neg_inf)
            throw PreconditionError("subsolution_residual: r=" + fmt_num(r) + " is outside {v > s0}");
        const auto lap = p_laplacian_radial_scaled(model, profile, p, r);
        const auto j = profile.jet(r);
        const double vr = V(r);
        // V v^(p-1) in the same scale as lap.mantissa
        const double ref = vr == 0.0 ? 0.0 : vr * std::pow(j.d0, p - 1.0);
        const double res = ref == 0.0 ? -lap.mantissa : (ref - lap.mantissa) / ref;
        worst = std::max(worst, reduce(res));
    }
    return worst;
}

} // namespace

double subsolution_residual(const ModelManifold& model, const RadialProfile& profile, const Potential& V,
                            double p, double s0, std::span<const double> grid) {
    return residual_sweep(model, profile, V, p, s0, grid, [](double x) { return x; });
}

double max_abs_equation_residual(const ModelManifold& model, const RadialProfile& profile, const Potential& V,
                                 double p, double s0, std::span<const double> grid) {
    return residual_sweep(model, profile, V, p, s0, grid, [](double x) { return std::abs(x); });
}

} // namespace growthlab
