#pragma once

#include <functional>
#include <stdexcept>

#include "rfde/bv_function.hpp"
#include "rfde/trajectory.hpp"

namespace rfde {

/// Thrown when an atom of the integrator falls on a genuine jump of the
/// integrand (the Riemann–Stieltjes sums have no limit there).
class SharedDiscontinuityError : public std::runtime_error {
public:
    SharedDiscontinuityError(double loc)
        : std::runtime_error("shared discontinuity of integrator and integrand"), location(loc) {}
    double location;
};

/// lhs/rhs pair of a numerically certified identity or estimate, together
/// with the tolerance the computation supports. Callers decide what passing
/// means (tests pin their own thresholds, the CLI applies a scale).
struct CheckResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
};

struct QuadOptions {
    int order = 12;
    std::vector<double> extra_splits;
};

/// Riemann–Stieltjes integral of f against d(alpha) over [c, d] within
/// alpha's domain. Atoms in (c, d] contribute jump * f(loc); an atom at the
/// left endpoint of alpha's domain also contributes when c == lo and d > c
/// (the jump sits immediately inside the interval). A degenerate range
/// (c == d) integrates to zero.
///
/// Exact path: f piecewise polynomial. If an atom hits an f-breakpoint, a
/// point value of f at that location is used when present (the coincidence is
/// appended to `coincidences` if given); a genuine jump without a point value
/// throws SharedDiscontinuityError.
Matrix rs_integral(const BVFunction& alpha, const PiecewisePoly& f, double c, double d,
                   std::vector<double>* coincidences = nullptr);

/// Quadrature path for a general continuous integrand.
Matrix rs_integral(const BVFunction& alpha, const std::function<Matrix(double)>& f, double c,
                   double d, const QuadOptions& opt = {});

/// Riemann–Stieltjes convolution (d(alpha) * f)(t) = int_0^t d(alpha)(u) f(t-u)
/// for alpha on [0, R]. Atoms with location u <= t contribute (so the atom at
/// u = 0, when present, acts instantaneously for every t >= 0).
Matrix rs_convolution(const BVFunction& alpha, const PiecewisePoly& f, double t);
Matrix rs_convolution(const BVFunction& alpha, const std::function<Matrix(double)>& f, double t,
                      const QuadOptions& opt = {});

/// Volterra operator: exact cumulative integral of a piecewise polynomial.
PiecewisePoly volterra(const PiecewisePoly& h);

/// Volterra operator on a sampled trajectory: cumulative integral of its
/// interpolant, returned on the same grid.
Trajectory volterra(const Trajectory& x);

/// Bivariate polynomial sum_ij c(i, j) x^i y^j used by the iterated-integral
/// checkers.
class BiPoly {
public:
    explicit BiPoly(Eigen::MatrixXd coef) : c_(std::move(coef)) {}
    static BiPoly zero() { return BiPoly(Eigen::MatrixXd::Zero(1, 1)); }

    double operator()(double x, double y) const;
    Poly at_x(double x) const;  // polynomial in y
    Poly at_y(double y) const;  // polynomial in x
    BiPoly square() const;
    const Eigen::MatrixXd& coef() const { return c_; }

private:
    Eigen::MatrixXd c_;  // c_(i, j): coefficient of x^i y^j
};

/// |int_a^b d(alpha) f| <= int_a^b |f| dV_alpha over alpha's full domain.
CheckResult check_sharp_estimate(const BVFunction& alpha, const PiecewisePoly& f);

/// Iterated Riemann–Stieltjes integrals of a continuous f(x, y) against
/// scalar alpha (in x) and beta (in y) agree in either order.
CheckResult check_fubini(const BiPoly& f, const BVFunction& alpha, const BVFunction& beta);

/// Minkowski-type inequality for monotone alpha, beta and p > 1:
/// ( int |int f d(alpha)|^p d(beta) )^(1/p) <= int ( int |f|^p d(beta) )^(1/p) d(alpha).
CheckResult check_minkowski(const BiPoly& f, const BVFunction& alpha, const BVFunction& beta,
                            double p);

/// Shifted interchange identity: for continuous f on [-r, 0], scalar BV alpha
/// on [-r, 0] and Riemann-integrable g on [0, r],
/// int_0^r ( int_{-r}^{-t} f(t+th) d(alpha)(th) ) g(t) dt
///   = int_{-r}^0 ( int_0^{-th} f(t+th) g(t) dt ) d(alpha)(th).
CheckResult check_shifted_fubini(const PiecewisePoly& f, const BVFunction& alpha,
                                 const PiecewisePoly& g);

}  // namespace rfde
