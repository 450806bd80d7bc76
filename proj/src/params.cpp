#include "growthlab/params.hpp"

#include "growthlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace growthlab {

namespace {

std::string describe(double p, double q, double mu, double lambda, double k) {
    std::ostringstream os;
    os << "(p=" << p << ", q=" << q << ", mu=" << mu << ", lambda=" << lambda << ", k=" << k << ")";
    return os.str();
}

} // namespace

Params::Params(double p, double q, double mu, double lambda, double k)
    : p_(p), q_(q), mu_(mu), lambda_(lambda), k_(k) {
    const auto where = describe(p, q, mu, lambda, k);
    if (!std::isfinite(p) || !(p > 1.0))
        throw PreconditionError("p must be > 1 " + where);
    if (!std::isfinite(q) || !(q > p - 1.0))
        throw PreconditionError("q must be > p - 1 " + where);
    if (!std::isfinite(mu) || mu < 0.0 || mu > p)
        throw PreconditionError("mu must lie in [0, p] " + where);
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw PreconditionError("lambda must be > 0 " + where);
    if (!std::isfinite(k) || !(k > 0.0))
        throw PreconditionError("k must be > 0 " + where);
}

DerivedExponents derive_exponents(const Params& params) {
    const double p = params.p();
    return {p / (p - 1.0), params.q() - p + 1.0, 1.0 - params.mu() / p};
}

namespace {

// C0 with lambda replaced by an arbitrary positive level; shared by
// compute_C0 and the eps-relaxed c3.
double growth_constant(double p, double gamma, double level, double k) {
    const double inv_pc = (p - 1.0) / p;
    return p * std::pow(gamma, inv_pc) * std::pow(level, 1.0 / p) / (std::pow(p - 1.0, inv_pc) * k);
}

} // namespace

double compute_C0(const Params& params) {
    const auto ex = derive_exponents(params);
    return growth_constant(params.p(), ex.gamma, params.lambda(), params.k());
}

double solve_C1(double p, double C0) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw PreconditionError("solve_C1: p must be > 1");
    if (!(C0 > 0.0) || !std::isfinite(C0))
        throw PreconditionError("solve_C1: C0 must be > 0");

    // Solve for x = C - p > 0 in log form:
    //   h(x) = log(p + x)/p + log(x)/p' - log(C0),  strictly increasing.
    // Working with x keeps full relative precision when C1 is close to p.
    const double inv_p = 1.0 / p;
    const double inv_pc = 1.0 - inv_p;
    const double log_C0 = std::log(C0);
    const double log_p = std::log(p);
    auto h = [&](double x) { return inv_p * (log_p + std::log1p(x / p)) + inv_pc * std::log(x) - log_C0; };

    // (p + x)^(1/p) > p^(1/p) and > x^(1/p), so both candidates overshoot the root.
    double hi = std::min(C0, std::pow(C0 / std::pow(p, inv_p), p / (p - 1.0)));
    double h_hi = h(hi);
    double lo = 0.5 * hi;
    double h_lo = h(lo);
    for (int i = 0; h_lo >= 0.0; ++i) {
        if (h_lo == 0.0)
            return p + lo;
        if (i > 2000)
            throw ConvergenceError("solve_C1: failed to bracket root", p + lo, p + hi);
        hi = lo;
        h_hi = h_lo;
        lo *= 0.5;
        h_lo = h(lo);
    }
    if (h_hi == 0.0)
        return p + hi;

    // Illinois regula falsi with a bisection step whenever the bracket
    // fails to halve over two consecutive iterations.
    constexpr int max_iter = 300;
    int side = 0;
    double width_two_ago = hi - lo;
    double width_prev = hi - lo;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double width = hi - lo;
        if (width <= 1e-15 * hi)
            return p + 0.5 * (lo + hi);

        double x;
        if (iter >= 2 && width > 0.5 * width_two_ago) {
            x = 0.5 * (lo + hi);
            side = 0;
        } else {
            x = (lo * h_hi - hi * h_lo) / (h_hi - h_lo);
            if (!(x > lo && x < hi))
                x = 0.5 * (lo + hi);
        }
        width_two_ago = width_prev;
        width_prev = width;

        const double hx = h(x);
        if (hx == 0.0)
            return p + x;
        if (hx < 0.0) {
            lo = x;
            h_lo = hx;
            if (side == -1)
                h_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            h_hi = hx;
            if (side == 1)
                h_lo *= 0.5;
            side = 1;
        }
    }
    throw ConvergenceError("solve_C1: iteration cap reached", p + lo, p + hi);
}

ComparisonConstants comparison_constants(const Params& params, double eps) {
    if (!(eps >= 0.0) || !(eps < params.lambda()))
        throw PreconditionError("comparison_constants: eps must satisfy 0 <= eps < lambda");

    const double p = params.p();
    const double k = params.k();
    const auto ex = derive_exponents(params);
    const double level = params.lambda() - eps;
    const double ppc = p * ex.p_conj;

    ComparisonConstants cc{};
    cc.eps = eps;
    cc.c1 = std::pow(p - 1.0, 1.0 / ppc) * std::pow(level, 1.0 / ppc) * std::pow(ex.gamma, -1.0 / ppc)
            * std::pow(k, 1.0 / p);
    cc.c2 = ex.gamma / level * std::pow(k, -ex.p_conj);
    cc.c3 = growth_constant(p, ex.gamma, level, k);
    cc.C2 = 1.0 + cc.c2 * caccioppoli_prefactor(params);

    if (params.critical_decay()) {
        const double c5 = solve_C1(p, cc.c3);
        cc.c5 = c5;
        cc.c4 = std::pow(p, 1.0 / p) * std::pow(level, 1.0 / p) / std::pow(c5, 1.0 / p);
        cc.c6 = (p - 1.0) * std::pow(c5, ex.p_conj) / (std::pow(p, ex.p_conj) * std::pow(level, ex.p_conj));
    }
    return cc;
}

double caccioppoli_prefactor(const Params& params) {
    const double p = params.p();
    const auto ex = derive_exponents(params);
    return std::pow(params.k(), p * ex.p_conj) * std::pow(p - 1.0, p - 1.0) * std::pow(4.0, p)
           / (ex.gamma * std::min(1.0, std::pow(ex.gamma, p - 1.0)));
}

LiouvilleVerdict liouville_check(const Params& params, double C) {
    if (!(C >= 0.0))
        throw PreconditionError("liouville_check: growth rate C must be >= 0");
    return C < compute_C0(params) ? LiouvilleVerdict::forced_zero : LiouvilleVerdict::inconclusive;
}

const char* to_string(LiouvilleVerdict verdict) {
    switch (verdict) {
    case LiouvilleVerdict::forced_zero:
        return "forced_zero";
    case LiouvilleVerdict::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

} // namespace growthlab
