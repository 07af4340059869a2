#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rfde/bv_function.hpp"
#include "support/generators.hpp"
#include "support/rs_sum_oracle.hpp"

using namespace rfde;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("value semantics: base, jumps, density") {
    // alpha(t) = t on [0, 1] (pure density 1).
    const BVFunction lin = BVFunction::from_density(
        0.0, 1.0, PiecewisePoly::constant(0.0, 1.0, m1(1.0)));
    CHECK(lin.value(0.0)(0, 0) == doctest::Approx(0.0));
    CHECK(lin.value(0.7)(0, 0) == doctest::Approx(0.7));

    // Single atom at 0.5: right-continuous there.
    const BVFunction atom = BVFunction::from_atoms(0.0, 1.0, m1(0.0), {{0.5, m1(2.0)}});
    CHECK(atom.value(0.49)(0, 0) == 0.0);
    CHECK(atom.value(0.5)(0, 0) == 2.0);
    CHECK(atom.value(1.0)(0, 0) == 2.0);

    // Atom at the left endpoint sits immediately inside: value(lo) = base.
    const BVFunction left = BVFunction::from_atoms(0.0, 1.0, m1(3.0), {{0.0, m1(1.0)}});
    CHECK(left.value(0.0)(0, 0) == 3.0);
    CHECK(left.value(0.1)(0, 0) == 4.0);
}

TEST_CASE("variation function: monotone, pure jump, triangle") {
    // alpha(t) = t: V(t) = t.
    const BVFunction lin = BVFunction::from_density(
        0.0, 1.0, PiecewisePoly::constant(0.0, 1.0, m1(1.0)));
    const BVFunction v1 = lin.variation_function();
    CHECK(v1.value(0.0)(0, 0) == doctest::Approx(0.0));
    CHECK(v1.value(0.3)(0, 0) == doctest::Approx(0.3));
    CHECK(v1.value(1.0)(0, 0) == doctest::Approx(lin.total_variation()));

    // Single atom J at 0.5, base 0: V = 0 before, |J| from 0.5 on.
    const BVFunction atom = BVFunction::from_atoms(0.0, 1.0, m1(0.0), {{0.5, m1(-2.0)}});
    const BVFunction v2 = atom.variation_function();
    CHECK(v2.value(0.3)(0, 0) == 0.0);
    CHECK(v2.value(0.5)(0, 0) == 2.0);
    CHECK(v2.value(0.9)(0, 0) == 2.0);

    // Piecewise linear 0 -> 1 -> 0 (density +2 then -2): Var = 2.
    PiecewisePoly dens(0.0, 1.0,
                       {{0.0, 0.5, MatPoly(Poly({2.0}))}, {0.5, 1.0, MatPoly(Poly({-2.0}))}});
    const BVFunction updown = BVFunction::from_density(0.0, 1.0, std::move(dens));
    CHECK(updown.value(0.5)(0, 0) == doctest::Approx(1.0));
    CHECK(updown.value(1.0)(0, 0) == doctest::Approx(0.0));
    CHECK(updown.total_variation() == doctest::Approx(2.0));
    const BVFunction vt = updown.variation_function();
    CHECK(vt.value(1.0)(0, 0) == doctest::Approx(2.0));
    CHECK(vt.value(0.5)(0, 0) == doctest::Approx(1.0));
    CHECK(vt.variation_exact());
}

TEST_CASE("variation dominates increments; V(V) = V") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        testing::BvOptions opt;
        opt.allow_boundary_atoms = true;
        const BVFunction a = testing::random_scalar_bv(rng, -1.0, 0.5, opt);
        const BVFunction v = a.variation_function();
        CHECK(v.value(-1.0)(0, 0) == doctest::Approx(0.0));
        CHECK(v.value(0.5)(0, 0) == doctest::Approx(a.total_variation()).epsilon(1e-10));
        double prev = 0.0;
        for (int k = 0; k <= 20; ++k) {
            const double t = -1.0 + 1.5 * k / 20.0;
            const double vt = v.value(t)(0, 0);
            CHECK(vt >= prev - 1e-12);  // monotone
            prev = vt;
        }
        for (int k = 0; k < 10; ++k) {
            const double c = rng.uniform(-1.0, 0.5), d = rng.uniform(-1.0, 0.5);
            const double lo = std::min(c, d), hi = std::max(c, d);
            const double dv = v.value(hi)(0, 0) - v.value(lo)(0, 0);
            const double da = op_norm(a.value(hi) - a.value(lo));
            CHECK(da <= dv + 1e-10);
        }
        // Total variation of a monotone V is V itself.
        const BVFunction vv = v.variation_function();
        for (int k = 0; k < 8; ++k) {
            const double t = rng.uniform(-1.0, 0.5);
            CHECK(vv.value(t)(0, 0) == doctest::Approx(v.value(t)(0, 0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("matrix variation is flagged approximate but dominates increments") {
    Rng rng(5);
    const BVFunction a = testing::random_bv(rng, 0.0, 1.0, 2);
    const BVFunction v = a.variation_function();
    CHECK(v.variation_exact() == !a.has_density());
    for (int k = 0; k < 10; ++k) {
        const double c = rng.uniform(0.0, 1.0), d = rng.uniform(0.0, 1.0);
        const double lo = std::min(c, d), hi = std::max(c, d);
        CHECK(op_norm(a.value(hi) - a.value(lo)) <= v.value(hi)(0, 0) - v.value(lo)(0, 0) + 1e-9);
    }
}

TEST_CASE("total variation against refinement oracle (mixed atom + density)") {
    // Scalar: atom 0.7 at -0.4 plus density 2t on [-1, 0].
    const BVFunction a(-1.0, 0.0, m1(0.1), {{-0.4, m1(0.7)}},
                       PiecewisePoly::single(-1.0, 0.0, MatPoly(Poly({0.0, 2.0}))));
    // Var = |0.7| + int_{-1}^0 |2t| dt = 0.7 + 1.0
    CHECK(a.total_variation() == doctest::Approx(1.7));
    double prev_err = 1e9;
    for (int m : {64, 128, 256, 512}) {
        const double err = std::abs(testing::variation_sum(a, m) - a.total_variation());
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
    }
    CHECK(prev_err < 2e-2);
}
