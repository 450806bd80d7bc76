#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "growthlab/errors.hpp"
#include "growthlab/sharp.hpp"

#include <cmath>
#include <vector>

using namespace growthlab;

namespace {

struct Case {
    double p;
    double q;
};

// one q per (a, c) branch for each p: below, at and above p(p-1)
const std::vector<Case> branch_grid = {{1.5, 0.6}, {1.5, 0.75}, {1.5, 1.5}, {2.0, 1.5}, {2.0, 2.0},
                                       {2.0, 3.0}, {3.0, 2.5},  {3.0, 6.0}, {3.0, 8.0}};

double C0_formula(double p, double q, double lambda) {
    const double pc = p / (p - 1.0);
    return p * std::pow(q - p + 1.0, 1.0 / pc) * std::pow(lambda, 1.0 / p) / std::pow(p - 1.0, 1.0 / pc);
}

} // namespace

TEST_CASE("choose_ac branches") {
    auto ac = choose_ac(2.0, 2.0);
    CHECK(ac.a == 0.0);
    CHECK(ac.c == 1.0);
    ac = choose_ac(2.0, 1.5);
    CHECK(ac.a == -1.0);
    CHECK(ac.c == doctest::Approx(2.0).epsilon(1e-15));
    ac = choose_ac(2.0, 3.0);
    CHECK(ac.a == 1.0);
    CHECK(ac.c == doctest::Approx(1.0).epsilon(1e-15));
    // p(p-1) computed with round-off still lands on the middle branch
    ac = choose_ac(1.1, 1.1 * 0.1);
    CHECK(ac.a == 0.0);
}

TEST_CASE("choose_ac errors") {
    CHECK_THROWS_AS(choose_ac(2.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(choose_ac(2.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(choose_ac(1.0, 2.0), PreconditionError);
}

TEST_CASE("choose_ac output is feasible and on the line") {
    for (double p : {1.2, 1.5, 2.0, 3.0, 4.5}) {
        for (double t : {0.01, 0.3, 0.5, 0.99, 1.0, 1.01, 1.5, 3.0, 10.0}) {
            // t < 1, t == 1, t > 1 select the three branches
            const double q = (p - 1.0) + t * (p * (p - 1.0) - (p - 1.0));
            if (!(q > p - 1.0))
                continue;
            const auto ac = choose_ac(p, q);
            CHECK(ac.c > 0.0);
            CHECK((p - 1.0) * ac.c + ac.a > 0.0);
            CHECK(std::abs((p - 1.0) * ac.a - (q - p * (p - 1.0)) * ac.c) <= 1e-12 * (1.0 + ac.c));
            CHECK(std::abs(ac_relation_residual(p, q, ac.a, ac.c)) <= 1e-12);
        }
    }
}

TEST_CASE("sharp example: p = 2, q = 2, mu = 0") {
    const auto ex = build_sharp_example(2.0, 2.0, 0.0);
    CHECK(ex.params.lambda() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(compute_C0(ex.params)).epsilon(1e-12));
    CHECK(ex.s0 == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-15));
    CHECK(ex.t0 == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
    CHECK_FALSE(ex.critical());
}

TEST_CASE("sharp example: p = 2, q = 2, mu = 2") {
    const auto ex = build_sharp_example(2.0, 2.0, 2.0);
    CHECK(ex.critical());
    CHECK(ex.params.lambda() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ex.theorem_bound() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(ex.s0 == 2.0);
    CHECK(ex.t0 == doctest::Approx(2.0).epsilon(1e-15));
    // g = t, v = t
    CHECK(ex.model.warp.value(3.0) == doctest::Approx(3.0));
    CHECK(ex.profile.value(3.0) == doctest::Approx(3.0));
}

TEST_CASE("sharp example: p = 2, q = 3, mu = 0") {
    const auto ex = build_sharp_example(2.0, 3.0, 0.0);
    CHECK(ex.a == 1.0);
    CHECK(ex.c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ex.params.lambda() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(4.0).epsilon(1e-15));
    // 2 sqrt(q-1) sqrt(lambda)
    CHECK(2.0 * std::sqrt(2.0) * std::sqrt(ex.params.lambda()) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("sharp example invariants on the branch grid") {
    for (const auto& [p, q] : branch_grid) {
        for (double mu : {0.0, p / 2.0, p}) {
            CAPTURE(p);
            CAPTURE(q);
            CAPTURE(mu);
            const auto ex = build_sharp_example(p, q, mu);
            CHECK(ex.t0 > 1.0);
            CHECK(std::abs(ex.profile.value(ex.t0) - ex.s0) <= 1e-12 * ex.s0);
            CHECK(ex.c > 0.0);
            CHECK((p - 1.0) * ex.c + ex.a > 0.0);
            CHECK(std::abs(ac_relation_residual(p, q, ex.a, ex.c)) <= 1e-12);
            CHECK(std::abs((p - 1.0) * ex.a - (q - p * (p - 1.0)) * ex.c) <= 1e-12 * (1.0 + ex.c));

            // independent chain: lambda from the identity, C0 from its formula
            const double beta = 1.0 - mu / p;
            const double b = mu == p ? 1.0 : beta;
            const double lambda = std::pow(b, p) * std::pow(ex.c, p - 1.0) * ((p - 1.0) * ex.c + ex.a);
            CHECK(ex.params.lambda() == doctest::Approx(lambda).epsilon(1e-14));
            const double C0 = C0_formula(p, q, lambda);
            if (mu < p) {
                CHECK(std::abs(ex.expected_rate - C0) <= 1e-10 * C0);
                CHECK(ex.expected_rate == doctest::Approx((ex.a + q * ex.c) * beta).epsilon(1e-15));
            } else {
                CHECK(std::abs(ex.expected_rate - (C0 + p)) <= 1e-10 * (C0 + p));
            }
            CHECK(std::abs(ex.expected_rate - ex.theorem_bound()) <= 1e-10 * ex.theorem_bound());

            // declared asymptotics: r^mu V(r) -> lambda within the exact correction
            const double r = 1e6;
            const double err = std::abs(std::pow(r, mu) * ex.potential(r) - lambda) / lambda;
            const double bound = mu == p ? 0.0
                                         : 1.0 / (ex.c * std::pow(r, beta)) * (p - 1.0) * ex.c /
                                               ((p - 1.0) * ex.c + ex.a);
            CHECK(err <= bound + 1e-14);
            CHECK(ex.potential.lambda_asym == doctest::Approx(lambda).epsilon(1e-14));
        }
    }
}

TEST_CASE("sharp example errors") {
    CHECK_THROWS_AS(build_sharp_example(2.0, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_sharp_example(2.0, 2.0, 2.5), PreconditionError);
    CHECK_THROWS_AS(build_sharp_example(2.0, 2.0, -1.0), PreconditionError);
    CHECK_THROWS_AS(build_sharp_example(1.0, 2.0, 0.0), PreconditionError);
}

TEST_CASE("sharp example with an (a, c) override") {
    // p = 2, q = 4: line a = 2c; c = 1 gives a = 2
    const auto ex = build_sharp_example(2.0, 4.0, 2.0, AcChoice{2.0, 1.0});
    CHECK(ex.c == 1.0);
    CHECK(ex.a == 2.0);
    // lambda = c^p gamma/(p-1) = 3, rate = C0 + p with C0 = 2 sqrt(3 * 3)
    CHECK(ex.params.lambda() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(ex.expected_rate == doctest::Approx(ex.theorem_bound()).epsilon(1e-12));

    CHECK_THROWS_AS(build_sharp_example(2.0, 4.0, 2.0, AcChoice{1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(build_sharp_example(2.0, 4.0, 2.0, AcChoice{0.0, 0.0}), PreconditionError);
    // on the line (p-1)c + a = c gamma/(p-1) > 0, so any c > 0 is feasible
    CHECK_NOTHROW(build_sharp_example(2.0, 1.5, 0.0, AcChoice{-0.25, 0.5}));
    CHECK_THROWS_AS(build_sharp_example(2.0, 1.5, 0.0, AcChoice{-1.0, 0.5}), PreconditionError);
}

TEST_CASE("ac relation residual detects points off the relation") {
    CHECK(std::abs(ac_relation_residual(2.0, 3.0, 1.0, 1.0)) <= 1e-15);
    CHECK(std::abs(ac_relation_residual(2.0, 3.0, 1.5, 1.0)) > 1e-3);
}
