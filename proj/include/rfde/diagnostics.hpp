#pragma once

#include "rfde/solver.hpp"

namespace rfde {

/// One row of the absolute-continuity table: the worst sum of increment
/// norms over disjoint grid cells of total length at most delta.
struct AcEntry {
    double delta;
    double sum;
};

/// Grid-scale absolute-continuity modulus: for each delta a greedy
/// adversarial selection of disjoint cells (sorted by |dx|/dt, fractional
/// last cell) maximizing the total increment.
std::vector<AcEntry> ac_modulus(const Trajectory& x, const std::vector<double>& deltas);

/// Max difference quotient over adjacent grid nodes.
double lipschitz_estimate(const Trajectory& x);

/// L^p norm of the difference-quotient derivative at successive coarsening
/// levels (level j keeps every 2^j-th node; entry 0 is the coarsest).
/// Boundedness across levels is the grid surrogate of an L^p derivative.
std::vector<double> derivative_lp(const Trajectory& x, double p, int levels);

enum class ResidualMode { Truncated, Full };

struct ResidualStats {
    double max_abs = 0.0;
    double l1 = 0.0;
    int samples = 0;
};

/// Residual xdot(t) - int_{-t}^0 d(eta) x(t+theta) - f(t) sampled at grid
/// nodes away from flagged breakpoints (guard band of twice the local step;
/// second-order one-sided-free difference quotients). Full mode checks
/// xdot = L x_t on [r, T] and ignores f.
ResidualStats de_residual(const Kernel& kernel, const Trajectory& x, const ForcingFunction* f,
                          ResidualMode mode);

struct RegularityReport {
    std::vector<AcEntry> ac_table;
    double lip_estimate = 0.0;
    std::vector<double> deriv_lp_norms;
    ResidualStats residual;
};

RegularityReport regularity_report(const Kernel& kernel, const Trajectory& x,
                                   const ForcingFunction* f, const std::vector<double>& deltas,
                                   double p, int levels);

}  // namespace rfde
