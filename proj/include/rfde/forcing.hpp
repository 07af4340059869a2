#pragma once

#include "rfde/rfde_model.hpp"

namespace rfde {

/// g(t; phi) = int_{-r}^{-t} d(eta)(theta) prolongation(phi)(t + theta).
/// Uses phi(0) at the argument 0, so an atom meeting the moving endpoint
/// evaluates through the point value (and is appended to `coincidences`).
/// Zero for t >= r.
Vector g_forcing(const Kernel& kernel, const History& phi, double t,
                 std::vector<double>* coincidences = nullptr);

/// G(t; phi) = int_{-r}^0 d(eta) (int_theta^0 phi)
///           + int_{-r}^{-t} d(eta) (int_0^{t+theta} prolongation(phi)).
/// Constant on [r, infinity) because the second term's range empties out.
Vector G_forcing(const Kernel& kernel, const History& phi, double t);

/// Pointwise a.e. value int_{-r}^{-t} d(eta)(theta) phi(t + theta) computed
/// from the a.e. representative of phi (left limits at breakpoints, no point
/// values). Empty exactly when an atom of eta lands on a shifted jump of phi,
/// where the class has no value. Zero for t >= r.
std::optional<Vector> f_forcing(const Kernel& kernel, const History& phi, double t);

/// One-sided limits of the forcing, defined for every t in [0, r].
Vector f_forcing_sided(const Kernel& kernel, const History& phi, double t, Side side);

/// Exact piecewise-polynomial representations of the forcing on [0, r]:
/// `profile` carries g (equivalently the a.e. forcing f; the two differ only
/// on a null set) and `G` its cumulative form.
struct ForcingSet {
    PiecewisePoly profile;
    PiecewisePoly G;
    std::vector<double> breakpoints;
};
ForcingSet build_forcing(const Kernel& kernel, const History& phi);

/// Forcing term as the solver consumes it: a.e. values with explicit
/// one-sided limits at its breakpoints.
struct ForcingFunction {
    std::function<Vector(double, Side)> eval;
    std::vector<double> breakpoints;
    int n = 1;
};
ForcingFunction make_forcing_function(const Kernel& kernel, const History& phi);
ForcingFunction zero_forcing(int n);

/// Continuous approximant: linear ramps of half-width eps replace each jump
/// of the class, plus a terminal ramp onto phi(0) when the class does not
/// reach it. Requires 2*eps below the minimal piece width.
History mollify_history(const History& phi, double eps);

/// lhs = L^p norm of g(.; phi) on [0, r], rhs = Var(eta) * lp_norm(phi, p)
/// for continuous phi and p in [1, infinity).
CheckResult check_lp_bound(const Kernel& kernel, const History& phi, double p);

/// Sampled forcing summary: grids of g/G/f, the [r, t_max] tails, and the
/// constancy defect of G past r. Atom-versus-moving-endpoint coincidence
/// times are listed rather than resolved.
struct ForcingReport {
    std::vector<double> grid;
    std::vector<Vector> g_values;
    std::vector<Vector> G_values;
    std::vector<Vector> f_values;  // sided-right value at a.e.-undefined points
    double tail_max_g = 0.0;
    double tail_max_f = 0.0;
    double constancy_defect = 0.0;
    std::vector<double> coincidences;
};
ForcingReport forcing_report(const Kernel& kernel, const History& phi, double t_max, int samples);

/// Exact polynomial through deg+1 Chebyshev samples of fn on [lo, hi]
/// (columns stacked); intended for functions known to be polynomial there.
MatPoly fit_polynomial(const std::function<Vector(double)>& fn, double lo, double hi, int deg);

}  // namespace rfde
