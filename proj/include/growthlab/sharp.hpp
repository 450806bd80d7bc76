#pragma once

#include "growthlab/params.hpp"
#include "growthlab/radial.hpp"

#include <optional>

namespace growthlab {

struct AcChoice {
    double a;
    double c;
};

/// Feasible (a, c) on the line (p-1) a = (q - p(p-1)) c:
///   (-1, (p-1)/(p(p-1)-q))  if p-1 < q < p(p-1)
///   ( 0, 1)                 if q == p(p-1)
///   ( 1, (p-1)/(q-p(p-1)))  if q > p(p-1)
AcChoice choose_ac(double p, double q);

/// Extremal construction attaining equality in the growth bound.
struct SharpExample {
    Params params; // lambda induced by (a, c), k = 1
    double a;
    double c;
    double beta; // 1 - mu/p; 1 in the critical regime
    ModelManifold model;
    RadialProfile profile;
    Potential potential;
    double s0; // truncation level
    double t0; // v(t0) == s0
    double expected_rate;

    bool critical() const noexcept { return params.critical_decay(); }
    /// Growth bound the expected rate is compared against: C0 for
    /// mu < p and C0 + p for mu == p.
    double theorem_bound() const;
};

/// Builds the extremal example for (p, q, mu). An explicit (a, c) may be
/// supplied in place of choose_ac; it must satisfy c > 0, (p-1)c + a > 0 and
/// lie on the line (p-1) a = (q - p(p-1)) c.
SharpExample build_sharp_example(double p, double q, double mu, std::optional<AcChoice> override_ac = {});

/// Residual of a + qc = p gamma^(1/p') c^(1/p') ((p-1)c + a)^(1/p) / (p-1)^(1/p'),
/// relative to the left side.
double ac_relation_residual(double p, double q, double a, double c);

} // namespace growthlab
