#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rfde/piecewise.hpp"
#include "rfde/quadrature.hpp"
#include "rfde/rng.hpp"
#include "support/generators.hpp"

using namespace rfde;

namespace {

PiecewisePoly step_function() {
    // 1 on [-1, -0.5], 0 on (-0.5, 0]
    std::vector<PiecewisePoly::Piece> pieces{
        {-1.0, -0.5, MatPoly::constant(Matrix::Constant(1, 1, 1.0))},
        {-0.5, 0.0, MatPoly::constant(Matrix::Zero(1, 1))}};
    return PiecewisePoly(-1.0, 0.0, std::move(pieces));
}

}  // namespace

TEST_CASE("evaluation sides and point values") {
    PiecewisePoly f = step_function();
    CHECK(f.scalar(-0.75) == 1.0);
    CHECK(f.scalar(-0.25) == 0.0);
    // Left-limit convention at the jump; sides give the two limits.
    CHECK(f.scalar(-0.5) == 1.0);
    CHECK(f.scalar(-0.5, Side::Left) == 1.0);
    CHECK(f.scalar(-0.5, Side::Right) == 0.0);
    CHECK(f.has_jump_at(-0.5));
    CHECK(f.jump_points().size() == 1);

    PiecewisePoly g(-1.0, 0.0, f.pieces(), {{-0.5, Matrix::Constant(1, 1, 7.0)}});
    CHECK(g.scalar(-0.5) == 7.0);
    CHECK(g.scalar(-0.5, Side::Left) == 1.0);  // sides ignore point values
}

TEST_CASE("restrict, shift, antiderivative") {
    PiecewisePoly f = step_function();
    const PiecewisePoly g = f.restrict_to(-0.8, -0.2);
    CHECK(g.lo() == doctest::Approx(-0.8));
    CHECK(g.scalar(-0.6) == 1.0);
    CHECK(g.scalar(-0.3) == 0.0);

    // shifted_arg: q(u) = f(u + s)
    const PiecewisePoly s = f.shifted_arg(-0.25);
    CHECK(s.scalar(-0.5) == 1.0);  // f(-0.75)
    CHECK(s.lo() == doctest::Approx(-0.75));

    const PiecewisePoly F = f.antiderivative();
    CHECK(F.scalar(-1.0) == doctest::Approx(0.0));
    CHECK(F.scalar(-0.5) == doctest::Approx(0.5));
    CHECK(F.scalar(0.0) == doctest::Approx(0.5));
    CHECK(f.integrate(-1.0, 0.0)(0, 0) == doctest::Approx(0.5));
    CHECK(f.integrate(-0.6, -0.4)(0, 0) == doctest::Approx(0.1));
}

TEST_CASE("reversal keeps values") {
    Rng rng(3);
    const PiecewisePoly f = testing::random_pieces(rng, -1.0, 0.5, 1, 1, 3, 3);
    const PiecewisePoly rev = f.compose_affine_arg(0.2, -1.0);  // rev(u) = f(0.2 - u)
    for (double u : {-0.25, 0.0, 0.33, 1.1})
        CHECK(rev.scalar(u) == doctest::Approx(f.scalar(0.2 - u)).epsilon(1e-12));
}

TEST_CASE("lp norms") {
    PiecewisePoly f = step_function();
    CHECK(f.lp_norm(1.0) == doctest::Approx(0.5));
    CHECK(f.lp_norm(2.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(f.sup_norm() == doctest::Approx(1.0));

    // |t| on [-1, 1] via two pieces.
    PiecewisePoly absf(-1.0, 1.0,
                       {{-1.0, 0.0, MatPoly(Poly({0.0, -1.0}))}, {0.0, 1.0, MatPoly(Poly({0.0, 1.0}))}});
    CHECK(absf.lp_norm(1.0) == doctest::Approx(1.0));
    CHECK(absf.lp_norm(3.0) == doctest::Approx(std::pow(0.5, 1.0 / 3.0)));
    CHECK(absf.sup_norm() == doctest::Approx(1.0));

    // Quadrature fallback (vector values, odd p) against a hand integral:
    // phi = (t, 1)^T on [0, 1], |phi| = sqrt(t^2+1), p = 3.
    PiecewisePoly vec(0.0, 1.0,
                      {{0.0, 1.0, MatPoly(std::vector<Matrix>{(Matrix(2, 1) << 0.0, 1.0).finished(),
                                                              (Matrix(2, 1) << 1.0, 0.0).finished()})}});
    const double expect = std::pow(
        gauss_integrate([](double t) { return std::pow(t * t + 1.0, 1.5); }, 0.0, 1.0, {}, 32),
        1.0 / 3.0);
    CHECK(vec.lp_norm(3.0) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(vec.sup_norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("piecewise product matches pointwise product") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const PiecewisePoly a = testing::random_pieces(rng, 0.0, 1.0, 2, 2, 3, 2);
        const PiecewisePoly b = testing::random_pieces(rng, 0.0, 1.0, 2, 1, 3, 2);
        const PiecewisePoly ab = a.matmul(b);
        for (int k = 0; k < 7; ++k) {
            const double t = rng.uniform(0.01, 0.99);
            CHECK((ab.value(t) - a.value(t) * b.value(t)).norm() ==
                  doctest::Approx(0.0).epsilon(1e-11));
        }
    }
}
