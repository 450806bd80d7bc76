#include "growthlab/sharp.hpp"

#include "growthlab/errors.hpp"

#include <cmath>

namespace growthlab {

AcChoice choose_ac(double p, double q) {
    if (!(p > 1.0))
        throw PreconditionError("choose_ac: p must be > 1");
    if (!(q > p - 1.0))
        throw PreconditionError("choose_ac: q must be > p - 1");
    const double pivot = p * (p - 1.0);
    // q == p(p-1) up to round-off in the caller's arithmetic
    if (std::abs(q - pivot) <= 1e-13 * pivot)
        return {0.0, 1.0};
    if (q < pivot)
        return {-1.0, (p - 1.0) / (pivot - q)};
    return {1.0, (p - 1.0) / (q - pivot)};
}

double ac_relation_residual(double p, double q, double a, double c) {
    const double inv_pc = (p - 1.0) / p;
    const double lhs = a + q * c;
    const double rhs = p * std::pow(q - p + 1.0, inv_pc) * std::pow(c, inv_pc)
                       * std::pow((p - 1.0) * c + a, 1.0 / p) / std::pow(p - 1.0, inv_pc);
    return (lhs - rhs) / lhs;
}

double SharpExample::theorem_bound() const {
    const double C0 = compute_C0(params);
    return critical() ? C0 + params.p() : C0;
}

SharpExample build_sharp_example(double p, double q, double mu, std::optional<AcChoice> override_ac) {
    if (!(p > 1.0) || !(q > p - 1.0) || !(mu >= 0.0 && mu <= p))
        throw PreconditionError("build_sharp_example: need p > 1, q > p - 1, 0 <= mu <= p");

    AcChoice ac = choose_ac(p, q);
    if (override_ac) {
        ac = *override_ac;
        if (!(ac.c > 0.0) || !((p - 1.0) * ac.c + ac.a > 0.0))
            throw PreconditionError("build_sharp_example: override (a, c) violates c > 0, (p-1)c + a > 0");
        const double line = (p - 1.0) * ac.a - (q - p * (p - 1.0)) * ac.c;
        if (std::abs(line) > 1e-12 * (std::abs(ac.a) + std::abs(ac.c)))
            throw PreconditionError("build_sharp_example: override (a, c) is off the line (p-1)a = (q-p(p-1))c");
    }
    const double a = ac.a;
    const double c = ac.c;
    const bool critical = mu == p;
    const double beta = critical ? 1.0 : 1.0 - mu / p;
    const double lambda = std::pow(beta, p) * std::pow(c, p - 1.0) * ((p - 1.0) * c + a);

    if (critical) {
        // v = t^c, g = t^(a+p-1); s0 = 2 v(1)
        const double s0 = 2.0;
        return SharpExample{Params(p, q, mu, lambda, 1.0),
                            a,
                            c,
                            beta,
                            ModelManifold::power_law(a + p - 1.0),
                            RadialProfile::power_law(c),
                            make_sharp_potential(p, mu, a, c),
                            s0,
                            std::pow(s0, 1.0 / c),
                            (a + q * c) + p};
    }
    // v = exp(c t^beta), g = exp(a t^beta); s0 = 2 v(1)
    const double s0 = 2.0 * std::exp(c);
    return SharpExample{Params(p, q, mu, lambda, 1.0),
                        a,
                        c,
                        beta,
                        ModelManifold::exp_power(a, beta),
                        RadialProfile::exp_power(c, beta),
                        make_sharp_potential(p, mu, a, c),
                        s0,
                        std::pow(std::log(s0) / c, 1.0 / beta),
                        (a + q * c) * beta};
}

} // namespace growthlab
