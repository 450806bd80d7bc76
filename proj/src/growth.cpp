#include "growthlab/growth.hpp"

#include "growthlab/errors.hpp"
#include "growthlab/params.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace growthlab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double pos_inf = std::numeric_limits<double>::infinity();

std::string num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

// log of the ball integrand omega g w^q given log w
double log_ball_density(const ModelManifold& model, double q, double s, double lw) {
    if (lw == neg_inf)
        return neg_inf;
    return model.log_sphere_measure(s) + q * lw;
}

// log of the energy density omega g w^(q-p) v'^p given log w
double log_energy_density(const ModelManifold& model, const RadialProfile& profile, double p, double q, double s,
                          double lw) {
    if (lw == neg_inf)
        return neg_inf;
    const auto j = profile.jet(s);
    return model.log_sphere_measure(s) + (q - p) * lw + p * (j.log_scale + std::log(j.d1));
}

double log_ball_density(const ModelManifold& model, const RadialProfile& profile, double q, double s0, double s) {
    return log_ball_density(model, q, s, profile.log_excess(s, s0));
}

// log w(t0 + d) with w measured as v(t0 + d) - v(t0) from the exact offset,
// so w^(q-p) keeps its integrable spike instead of collapsing to w = 0 once
// t0 + d rounds to t0. Below the double range of d, w = v'(t0) d to all digits.
double log_w_near(const RadialProfile& profile, double t0, double d, double log_d) {
    if (d > 1e-280)
        return profile.log_rise(t0, d);
    const auto j = profile.jet(t0);
    return j.log_scale + std::log(j.d1) + log_d;
}

// Integrals over [lo, R]; see log_w_near for the case lo == t0.
LogQuantity ball_from(const ModelManifold& model, const RadialProfile& profile, double q, double s0, double lo,
                      double R, const QuadratureOptions& opts, bool lo_is_crossing = true) {
    if (!(R > lo))
        return {neg_inf, 0.0};
    LogIntegral res;
    if (lo_is_crossing)
        res = integrate_log_offset(
            [&](double d, double log_d) {
                return log_ball_density(model, q, lo + d, log_w_near(profile, lo, d, log_d));
            },
            lo, R, opts);
    else
        res = integrate_log([&](double s) { return log_ball_density(model, profile, q, s0, s); }, lo, R, opts);
    return {res.log_value, res.rel_error};
}

LogQuantity energy_from(const ModelManifold& model, const RadialProfile& profile, double p, double q, double t0,
                        double R, QuadratureOptions opts) {
    if (!(R > t0))
        return {neg_inf, 0.0};
    if (q < p)
        opts.left_singularity = q - p;
    const auto res = integrate_log_offset(
        [&](double d, double log_d) {
            return log_energy_density(model, profile, p, q, t0 + d, log_w_near(profile, t0, d, log_d));
        },
        t0, R, opts);
    return {res.log_value, res.rel_error};
}

CheckReport make_report(std::string name, double lhs, double rhs, double margin, double tolerance) {
    // an inequality between two vanishing sides holds trivially
    if (std::isnan(margin))
        margin = pos_inf;
    return {std::move(name), lhs, rhs, margin, margin >= -tolerance, tolerance};
}

double tolerance_for(const CheckTolerance& tol, std::initializer_list<double> rel_errors) {
    double sum = 0.0;
    for (double e : rel_errors)
        sum += e;
    return tol.absolute + tol.quad_factor * sum;
}

} // namespace

const char* to_string(RateRegime regime) {
    return regime == RateRegime::power ? "power" : "logarithmic";
}

const char* to_string(L1Verdict verdict) {
    switch (verdict) {
    case L1Verdict::condition_holds:
        return "condition_holds";
    case L1Verdict::condition_fails:
        return "condition_fails";
    case L1Verdict::holds_only_for_small_r:
        return "holds_only_for_small_r";
    }
    return "unknown";
}

double level_crossing(const RadialProfile& profile, double s0) {
    double lo = profile.t_min();
    if (profile.log_excess(lo, s0) > neg_inf)
        return lo;
    double hi = 2.0 * lo;
    while (profile.log_excess(hi, s0) == neg_inf) {
        if (hi > 1e12)
            throw DomainError("level_crossing: profile never exceeds s0=" + num(s0));
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (profile.log_excess(mid, s0) == neg_inf)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

LogQuantity log_ball_integral(const ModelManifold& model, const RadialProfile& profile, double q, double s0,
                              double R, const QuadratureOptions& opts) {
    if (!(R > 0.0))
        throw PreconditionError("log_ball_integral: R must be > 0");
    if (!(q > 0.0))
        throw PreconditionError("log_ball_integral: q must be > 0");
    if (R <= profile.t_min())
        return {neg_inf, 0.0};
    return ball_from(model, profile, q, s0, level_crossing(profile, s0), R, opts);
}

LogQuantity log_energy_integral(const ModelManifold& model, const RadialProfile& profile, double p, double q,
                                double s0, double R, const QuadratureOptions& opts) {
    if (!(R > 0.0))
        throw PreconditionError("log_energy_integral: R must be > 0");
    if (!(p > 1.0) || !(q > p - 1.0))
        throw PreconditionError("log_energy_integral: need p > 1 and q > p - 1");
    if (R <= profile.t_min())
        return {neg_inf, 0.0};
    return energy_from(model, profile, p, q, level_crossing(profile, s0), R, opts);
}

double log_sphere_integral(const ModelManifold& model, const RadialProfile& profile, double q, double s0,
                           double s) {
    if (!(s > 0.0))
        throw PreconditionError("log_sphere_integral: s must be > 0");
    if (!profile.in_domain(s))
        return neg_inf;
    return log_ball_density(model, profile, q, s0, s);
}

std::vector<GrowthSample> sample_growth(const ModelManifold& model, const RadialProfile& profile, double q,
                                        double s0, std::span<const double> radii, const QuadratureOptions& opts) {
    std::vector<GrowthSample> out;
    out.reserve(radii.size());
    const double t0 = level_crossing(profile, s0);
    double log_G = neg_inf;
    double log_abs_err = neg_inf;
    double prev = t0;
    for (double R : radii) {
        if (!out.empty() && !(R > out.back().R))
            throw PreconditionError("sample_growth: radii must be strictly increasing");
        if (R > prev) {
            const auto piece = ball_from(model, profile, q, s0, prev, R, opts, prev == t0);
            log_G = log_add_exp(log_G, piece.log_value);
            if (piece.log_value > neg_inf && piece.rel_error > 0.0)
                log_abs_err = log_add_exp(log_abs_err, piece.log_value + std::log(piece.rel_error));
            prev = R;
        }
        const double rel = log_G == neg_inf || log_abs_err == neg_inf ? 0.0 : std::exp(log_abs_err - log_G);
        out.push_back({R, log_G, rel});
    }
    return out;
}

RateEstimate estimate_rate(std::span<const GrowthSample> samples, RateRegime regime, double beta) {
    std::vector<GrowthSample> usable;
    for (const auto& s : samples) {
        if (!std::isfinite(s.logG))
            continue;
        if (!usable.empty() && !(s.R > usable.back().R))
            throw PreconditionError("estimate_rate: sample radii must be strictly increasing");
        usable.push_back(s);
    }
    if (usable.size() < 4)
        throw PreconditionError("estimate_rate: need at least 4 samples with finite logG");
    if (regime == RateRegime::power && !(beta > 0.0))
        throw PreconditionError("estimate_rate: power regime needs beta > 0; use the logarithmic regime for "
                                "mu == p");

    const auto n = static_cast<Eigen::Index>(usable.size());
    const Eigen::Index cols = regime == RateRegime::power ? 3 : 2;
    Eigen::MatrixXd X(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double R = usable[static_cast<std::size_t>(i)].R;
        y(i) = usable[static_cast<std::size_t>(i)].logG;
        if (regime == RateRegime::power) {
            X(i, 0) = std::pow(R, beta);
            X(i, 1) = std::log(R);
            X(i, 2) = 1.0;
        } else {
            X(i, 0) = std::log(R);
            X(i, 1) = 1.0;
        }
    }
    // column equilibration before the rank-revealing QR
    Eigen::VectorXd scale = X.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < cols; ++j)
        X.col(j) /= scale(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols)
        throw PreconditionError(regime == RateRegime::power
                                    ? "estimate_rate: rank-deficient power fit; use the logarithmic regime"
                                    : "estimate_rate: rank-deficient logarithmic fit");
    const Eigen::VectorXd coef = qr.solve(y);
    const double residual = (X * coef - y).cwiseAbs().maxCoeff();
    const double lead = coef(0) / scale(0);

    RateEstimate est{};
    est.regime = regime;
    est.beta = regime == RateRegime::power ? beta : 0.0;
    est.rate = regime == RateRegime::power ? lead * beta : lead;
    est.fit_residual = residual;
    est.Rmin = usable.front().R;
    est.Rmax = usable.back().R;
    return est;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo))
        throw PreconditionError("log_spaced: need count >= 2 and 0 < lo < hi");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_rate_radii(const SharpExample& example, int count, double log_growth_target) {
    if (count < 4)
        throw PreconditionError("default_rate_radii: need at least 4 radii");
    if (example.critical())
        return log_spaced(1e3, 1e6, count);
    const double r_max = std::pow(log_growth_target / example.expected_rate, 1.0 / example.beta);
    const double r_min = std::max(example.t0 + 1.0, 0.2 * r_max);
    if (!(r_max > r_min))
        throw PreconditionError("default_rate_radii: growth target too small for this example");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = r_min + (r_max - r_min) * i / (count - 1);
    return out;
}

RateEstimate measure_rate(const SharpExample& example, std::span<const double> radii,
                          const QuadratureOptions& opts) {
    const auto samples = sample_growth(example.model, example.profile, example.params.q(), example.s0, radii, opts);
    return example.critical() ? estimate_rate(samples, RateRegime::logarithmic)
                              : estimate_rate(samples, RateRegime::power, example.beta);
}

double default_phi_eps(const SharpExample& example, double R1) {
    const double lambda = example.params.lambda();
    if (!(R1 > example.t0))
        throw PreconditionError("default_phi_eps: R1 must exceed t0");
    if (example.critical())
        return 0.0; // V = lambda / r^p exactly
    // s^mu V(s) increases to lambda, so the bound on [R1, inf) is tightest at R1
    const double mu = example.params.mu();
    const double eps = std::max(0.0, lambda - std::pow(R1, mu) * example.potential(R1));
    if (!(eps < lambda))
        throw PreconditionError("default_phi_eps: R1=" + num(R1) +
                                " is below the radius where the potential bound can hold (safe radius " +
                                num(example.potential.safe_radius) + ")");
    return eps;
}

CheckReport check_phi_lower_bound(const SharpExample& example, double R1, double R, std::optional<double> eps,
                                  const CheckTolerance& tol, const QuadratureOptions& opts) {
    if (!(R1 > example.t0) || !(R >= R1))
        throw PreconditionError("check_phi_lower_bound: need t0 < R1 <= R");
    const double e = eps ? *eps : default_phi_eps(example, R1);
    const auto& prm = example.params;
    const double p = prm.p();
    const double q = prm.q();
    const auto cc = comparison_constants(prm, e);

    const auto G1 = ball_from(example.model, example.profile, q, example.s0, example.t0, R1, opts);
    const auto G = ball_from(example.model, example.profile, q, example.s0, example.t0, R, opts);
    const auto H = energy_from(example.model, example.profile, p, q, example.t0, R, opts);

    double lhs;
    double rhs;
    if (example.critical()) {
        lhs = log_add_exp(G.log_value, std::log(*cc.c6) + p * std::log(R) + H.log_value);
        rhs = *cc.c5 * (std::log(R) - std::log(R1)) + G1.log_value;
    } else {
        const double beta = example.beta;
        lhs = log_add_exp(G.log_value, std::log(cc.c2) + prm.mu() * std::log(R) + H.log_value);
        rhs = cc.c3 / beta * (std::pow(R, beta) - std::pow(R1, beta)) + G1.log_value;
    }
    return make_report("phi_lower_bound", lhs, rhs, lhs - rhs,
                       tolerance_for(tol, {G1.rel_error, G.rel_error, H.rel_error}));
}

CheckReport check_caccioppoli(const SharpExample& example, double R, double h, const CheckTolerance& tol,
                              const QuadratureOptions& opts) {
    if (!(R > example.t0) || !(h >= 0.0))
        throw PreconditionError("check_caccioppoli: need R > t0 and h >= 0");
    const auto& prm = example.params;
    const auto G = ball_from(example.model, example.profile, prm.q(), example.s0, example.t0, R + h, opts);
    const auto H = energy_from(example.model, example.profile, prm.p(), prm.q(), example.t0, R, opts);
    const double lhs = std::log(caccioppoli_prefactor(prm)) + G.log_value;
    const double rhs = h > 0.0 ? prm.p() * std::log(h) + H.log_value : neg_inf;
    return make_report("caccioppoli", lhs, rhs, lhs - rhs, tolerance_for(tol, {G.rel_error, H.rel_error}));
}

CheckReport check_prop_pgp(const SharpExample& example, double r, double R, const CheckTolerance& tol,
                           const QuadratureOptions& opts) {
    if (!(r > 0.0) || !(R > r))
        throw PreconditionError("check_prop_pgp: need 0 < r < R");
    const auto& prm = example.params;
    const double p = prm.p();
    const double q = prm.q();
    const double gamma = q - p + 1.0;

    const auto H = energy_from(example.model, example.profile, p, q, example.t0, r, opts);
    const double lhs = H.log_value;

    // int_r^R (omega g w^q)^(1/(1-p)) ds; infinite when w vanishes on part of (r, R)
    double log_phi_int = pos_inf;
    double phi_err = 0.0;
    if (r >= example.t0) {
        const auto res = integrate_log(
            [&](double s) {
                return log_ball_density(example.model, example.profile, q, example.s0, s) / (1.0 - p);
            },
            r, R, opts);
        log_phi_int = res.log_value;
        phi_err = res.rel_error;
    }
    const double log_const = (p - 1.0) * std::log(p - 1.0) - std::log(std::min(1.0, std::pow(gamma, p)));
    const double rhs = log_const + (1.0 - p) * log_phi_int;
    return make_report("energy_bound", lhs, rhs, rhs - lhs, tolerance_for(tol, {H.rel_error, phi_err}));
}

std::vector<CheckPoint> default_check_points(const SharpExample& example) {
    const double base = std::max(example.t0, example.potential.safe_radius) + 0.5;
    const double mu_over_p = example.params.mu() / example.params.p();
    // the first two use the width R^(mu/p) from the growth argument, the last h = R
    return {{base, base + 5.0, std::pow(base, mu_over_p)},
            {2.0 * base, 10.0 * base, std::pow(2.0 * base, mu_over_p)},
            {5.0 * base, 100.0 * base, 5.0 * base}};
}

LogBracket integration_by_parts_bracket(const SharpExample& example, double R) {
    if (example.critical())
        throw PreconditionError("integration_by_parts_bracket: only defined for mu < p");
    const double t0 = example.t0;
    if (!(R > t0))
        throw PreconditionError("integration_by_parts_bracket: need R > t0");
    const double beta = example.beta;
    const double A = example.a + example.params.q() * example.c;
    const double a1 = A * beta;
    const double a2 = A * beta + (1.0 - beta) * std::pow(t0, -beta);
    const double log_omega = std::log(example.model.omega);
    const double X = A * std::pow(R, beta) + (1.0 - beta) * std::log(R);

    const double rho = 0.5 * (t0 + R);
    const double Y = A * std::pow(rho, beta) + (1.0 - beta) * std::log(rho);
    const double log_kappa =
        example.params.q() * std::log(-std::expm1(std::log(example.s0) - example.c * std::pow(rho, beta)));
    const double lower = log_omega + log_kappa + X + std::log(-std::expm1(Y - X)) - std::log(a2);
    const double upper = log_omega + X - std::log(a1);
    return {lower, upper};
}

L1Verdict classify_l1_condition(double sphere_log_slope, double p, bool finite_radius_infinite) {
    if (!(p > 1.0))
        throw PreconditionError("classify_l1_condition: p must be > 1");
    // phi ~ s^(-alpha/(p-1)) is non-integrable at infinity iff alpha/(p-1) <= 1
    if (sphere_log_slope / (p - 1.0) <= 1.0)
        return L1Verdict::condition_holds;
    return finite_radius_infinite ? L1Verdict::holds_only_for_small_r : L1Verdict::condition_fails;
}

double phi_exponent(double sphere_log_slope, double p) {
    if (!(p > 1.0))
        throw PreconditionError("phi_exponent: p must be > 1");
    return -sphere_log_slope / (p - 1.0);
}

bool ball_growth_condition_holds(double ball_log_slope, double p) {
    if (!(p > 1.0))
        throw PreconditionError("ball_growth_condition_holds: p must be > 1");
    return ball_log_slope <= p;
}

RateEstimate estimate_sphere_log_slope(const ModelManifold& model, const RadialProfile& profile, double q,
                                       double s0, std::span<const double> radii) {
    std::vector<GrowthSample> samples;
    samples.reserve(radii.size());
    for (double s : radii)
        samples.push_back({s, log_sphere_integral(model, profile, q, s0, s), 0.0});
    return estimate_rate(samples, RateRegime::logarithmic);
}

double iterated_log(int n, double t) {
    if (n < 0)
        throw PreconditionError("iterated_log: n must be >= 0");
    double product = 1.0;
    double iterate = t;
    for (int j = 1; j <= n; ++j) {
        if (!(iterate > 0.0))
            throw DomainError("iterated_log: log applied to a non-positive value at depth " + std::to_string(j));
        iterate = std::log(iterate);
        if (!(iterate > 0.0))
            throw DomainError("iterated_log: iterate of depth " + std::to_string(j) + " is " + num(iterate) +
                              " <= 0; t=" + num(t) + " is too small");
        product *= iterate;
    }
    return product;
}

} // namespace growthlab
