#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rfde/rfde_model.hpp"
#include "support/generators.hpp"

using namespace rfde;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
Vector v1(double v) { return Vector::Constant(1, v); }

Kernel single_delay(double a, double tau, double r) {
    return Kernel(r, BVFunction(-r, 0.0, m1(0.0), {{-tau, m1(a)}}));
}

History const_history(double c, double r, double p = 1.0) {
    History phi;
    phi.r = r;
    phi.pieces = PiecewisePoly::constant(-r, 0.0, m1(c));
    phi.value_at_zero = v1(c);
    phi.p = p;
    return phi;
}

History indicator_history(double r, double p = 1.0) {
    // 1 on [-r, -r/2], 0 after, phi(0) = 0.
    History phi;
    phi.r = r;
    phi.pieces = PiecewisePoly(
        -r, 0.0,
        {{-r, -r / 2, MatPoly::constant(m1(1.0))}, {-r / 2, 0.0, MatPoly::constant(m1(0.0))}});
    phi.value_at_zero = v1(0.0);
    phi.p = p;
    return phi;
}

}  // namespace

TEST_CASE("apply_L: single delay, distributed, mixed") {
    // Atom A at theta = -tau picks psi(-tau); delay exactly r included.
    const Kernel k1 = single_delay(2.0, 0.6, 1.0);
    const PiecewisePoly psi = PiecewisePoly::single(-1.0, 0.0, MatPoly(Poly({0.5, 1.0})));
    CHECK(apply_L(k1, psi)(0) == doctest::Approx(2.0 * psi.scalar(-0.6)));
    const Kernel kr = single_delay(2.0, 1.0, 1.0);
    CHECK(apply_L(kr, psi)(0) == doctest::Approx(2.0 * psi.scalar(-1.0)));

    // Pure density 1: L psi = int psi.
    const Kernel kd(1.0, BVFunction::from_density(-1.0, 0.0,
                                                  PiecewisePoly::constant(-1.0, 0.0, m1(1.0))));
    CHECK(apply_L(kd, psi)(0) == doctest::Approx(psi.integrate(-1.0, 0.0)(0, 0)));

    // Atom a at -1 plus density b, psi = 1 -> a + b.
    const double a = -0.7, b = 0.4;
    const Kernel km(1.0, BVFunction(-1.0, 0.0, m1(0.0), {{-1.0, m1(a)}},
                                    PiecewisePoly::constant(-1.0, 0.0, m1(b))));
    CHECK(apply_L(km, PiecewisePoly::constant(-1.0, 0.0, m1(1.0)))(0) == doctest::Approx(a + b));
}

TEST_CASE("apply_L linearity and variation bound") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        testing::KernelOptions ko;
        ko.n = 1 + rng.uniform_int(2);
        ko.allow_instant = true;
        const Kernel k = testing::random_kernel(rng, ko);
        const PiecewisePoly p1 = testing::random_continuous_pieces(rng, -k.r(), 0.0, k.n(), 2, 3);
        const PiecewisePoly p2 = testing::random_continuous_pieces(rng, -k.r(), 0.0, k.n(), 2, 3);
        const double c1 = rng.uniform(-2.0, 2.0), c2 = rng.uniform(-2.0, 2.0);
        const Vector lhs = apply_L(k, p1 * c1 + p2 * c2);
        const Vector rhs = c1 * apply_L(k, p1) + c2 * apply_L(k, p2);
        CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        CHECK(apply_L(k, p1).norm() <= k.variation() * p1.sup_norm() * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("reflect_kernel reproduces the delayed action") {
    // Atom A at -tau: (d(check) * f)(t) = A f(t - tau) for t > tau.
    const double tau = 0.6, A = 1.7;
    const Kernel k = single_delay(A, tau, 1.0);
    const BVFunction chk = k.reflected();
    const PiecewisePoly f = PiecewisePoly::single(0.0, 3.0, MatPoly(Poly({0.3, -1.0, 0.25})));
    for (double t : {0.2, 0.59}) CHECK(rs_convolution(chk, f, t)(0, 0) == doctest::Approx(0.0));
    for (double t : {0.61, 1.5, 2.9})
        CHECK(rs_convolution(chk, f, t)(0, 0) == doctest::Approx(A * f.scalar(t - tau)));

    // Constant eta: nothing happens.
    const Kernel kc(1.0, BVFunction::constant(-1.0, 0.0, m1(3.0)));
    CHECK(rs_convolution(kc.reflected(), f, 2.0)(0, 0) == doctest::Approx(0.0));

    // Variation is preserved, including boundary atoms.
    Rng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        testing::KernelOptions ko;
        ko.n = 1 + rng.uniform_int(2);
        ko.allow_instant = true;
        const Kernel kr = testing::random_kernel(rng, ko);
        CHECK(kr.reflected().total_variation() ==
              doctest::Approx(kr.variation()).epsilon(1e-10));
    }
}

TEST_CASE("reflected convolution equals the truncated kernel integral") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        testing::KernelOptions ko;
        ko.allow_instant = true;
        const Kernel k = testing::random_kernel(rng, ko);
        const BVFunction chk = k.reflected();
        const PiecewisePoly f =
            testing::random_continuous_pieces(rng, 0.0, 2.0 * k.r(), 1, 2, 3);
        // t away from atom delays: both endpoint conventions agree.
        for (int s = 0; s < 8; ++s) {
            double t = rng.uniform(0.05, 2.0 * k.r() - 0.05);
            bool near = false;
            for (double tau : k.atom_delays())
                if (std::abs(t - tau) < 2e-2) near = true;
            if (near) continue;
            const double conv = rs_convolution(chk, f, t)(0, 0);
            const double direct =
                rs_integral(k.eta(), f.shifted_arg(t), std::max(-k.r(), -t), 0.0)(0, 0);
            CHECK(conv == doctest::Approx(direct).epsilon(1e-9));
        }
    }
}

TEST_CASE("kernel_variation") {
    const Kernel two(1.0, BVFunction(-1.0, 0.0, m1(0.0), {{-0.8, m1(-2.0)}, {-0.3, m1(1.5)}}));
    CHECK(two.variation() == doctest::Approx(3.5));
    const Kernel dens(2.0, BVFunction::from_density(
                               -2.0, 0.0, PiecewisePoly::constant(-2.0, 0.0, m1(0.7))));
    CHECK(dens.variation() == doctest::Approx(1.4));
    const Kernel mixed(1.0, BVFunction(-1.0, 0.0, m1(0.0), {{-0.4, m1(0.7)}},
                                       PiecewisePoly::single(-1.0, 0.0, MatPoly(Poly({0.0, 2.0})))));
    CHECK(mixed.variation() == doctest::Approx(0.7 + 1.0));
}

TEST_CASE("lp_norm of histories") {
    CHECK(lp_norm(const_history(-3.0, 1.0), 2.0) == doctest::Approx(3.0));
    CHECK(lp_norm(indicator_history(1.0), 1.0) == doctest::Approx(0.5));
    const History xi = instantaneous_input(v1(4.0), 1.0);
    CHECK(lp_norm(xi, 1.0) == doctest::Approx(0.0));
    CHECK(lp_norm(xi, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("instantaneous input and static prolongation") {
    const Vector e1 = (Vector(2) << 1.0, 0.0).finished();
    const History xi = instantaneous_input(e1, 1.5);
    CHECK((static_prolongation(xi, 5.0) - e1).norm() == 0.0);
    CHECK(static_prolongation(xi, -0.7).norm() == 0.0);
    CHECK((static_prolongation(xi, 0.0) - e1).norm() == 0.0);

    const History ind = indicator_history(1.0);
    CHECK(static_prolongation(ind, -0.75)(0) == 1.0);
    CHECK(static_prolongation(ind, 0.2)(0) == 0.0);
    // At the jump the class has no canonical value: signalled.
    CHECK_FALSE(static_prolongation_checked(ind, -0.5).has_value());
    CHECK(static_prolongation_checked(ind, -0.3).has_value());
    // The unchecked evaluation resolves by the left-limit convention.
    CHECK(static_prolongation(ind, -0.5)(0) == 1.0);
}

TEST_CASE("segment assembly") {
    const History phi = const_history(0.0, 1.0);
    Trajectory x;
    for (int k = 0; k <= 40; ++k) {
        x.grid.push_back(2.0 * k / 40.0);
        x.values.push_back(v1(x.grid.back()));  // x(t) = t
    }
    // t = 1.5 >= r: pure trajectory restriction, segment(theta) = 1.5 + theta.
    const PiecewisePoly s1 = segment(x, phi, 1.5);
    for (double th : {-1.0, -0.4, 0.0})
        CHECK(s1.scalar(th) == doctest::Approx(1.5 + th).epsilon(1e-12));

    // t = 0: the history itself with phi(0) at 0.
    const History ind = indicator_history(1.0);
    const PiecewisePoly s0 = segment(x, ind, 0.0);
    CHECK(s0.scalar(-0.75) == 1.0);
    CHECK(s0.scalar(0.0) == 0.0);

    // Mixed: t = 0.25, history left of -0.25, trajectory right of it.
    const PiecewisePoly sm = segment(x, ind, 0.25);
    CHECK(sm.scalar(-0.9) == doctest::Approx(1.0));   // phi(0.25 - 0.9)
    CHECK(sm.scalar(-0.1) == doctest::Approx(0.15));  // x(0.15)
}

TEST_CASE("segment of a continuous history is continuous") {
    Rng rng(3);
    const double r = 1.0;
    const History phi = testing::random_continuous_history(rng, r, 1);
    Trajectory x;
    for (int k = 0; k <= 50; ++k) {
        x.grid.push_back(2.0 * k / 50.0);
        x.values.push_back(phi.value_at_zero + v1(0.3 * x.grid.back()));
    }
    for (double t : {0.0, 0.3, 0.77, 1.0, 1.9}) {
        const PiecewisePoly s = segment(x, phi, t);
        for (double b : s.breakpoints())
            CHECK((s.value(b, Side::Left) - s.value(b, Side::Right)).norm() <= 1e-9);
    }
}
