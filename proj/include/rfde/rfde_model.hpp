#pragma once

#include <optional>

#include "rfde/rs_calculus.hpp"

namespace rfde {

/// Kernel of the right-hand side functional: a bounded-variation matrix
/// function eta on [-r, 0], treated as constant to the left of -r. Atoms
/// encode discrete delays (an atom at theta = -tau acts with delay tau, an
/// atom at -r with the full delay r); the density encodes distributed delay.
class Kernel {
public:
    Kernel(double r, BVFunction eta);

    double r() const { return r_; }
    int n() const { return n_; }
    const BVFunction& eta() const { return eta_; }

    /// Var(eta) over [-r, 0].
    double variation() const { return eta_.total_variation(); }

    /// Reflected kernel on [0, r]: check(t) = -eta(-t). Atoms of eta at -tau
    /// become atoms at tau with the same increment; the density mirrors.
    BVFunction reflected() const;

    /// Delays tau = -theta of the atoms, ascending, deduplicated.
    std::vector<double> atom_delays() const;
    /// Delays -theta of interior density piece edges.
    std::vector<double> density_edge_delays() const;
    /// All feature delays in (0, r] that generate solution breakpoints.
    std::vector<double> breakpoint_offsets() const;

private:
    double r_;
    int n_;
    BVFunction eta_;
};

/// L(psi) = int_{-r}^0 d(eta)(theta) psi(theta) for continuous psi.
Vector apply_L(const Kernel& kernel, const PiecewisePoly& psi);

/// Element of M^p: an L^p class on [-r, 0] plus a mandatory value at 0 and
/// the exponent tag. Pieces follow the left-limit convention at breakpoints,
/// overridable by point values.
struct History {
    double r;
    PiecewisePoly pieces;  // n-by-1 values on [-r, 0]
    Vector value_at_zero;
    double p = 1.0;  // in [1, inf]

    int n() const { return static_cast<int>(value_at_zero.size()); }
    void validate() const;
    /// Pieces continuous and matching value_at_zero at 0 (membership in C).
    bool is_continuous(double tol = 1e-10) const;
};

/// History that is 0 a.e. with value xi at 0.
History instantaneous_input(const Vector& xi, double r, double p = 1.0);

/// L^p norm of the a.e. class of phi on [-r, 0]; point values are invisible.
double lp_norm(const History& phi, double p);

/// Static prolongation: phi(t) for t < 0 (a.e. representative), phi(0) for
/// t >= 0.
Vector static_prolongation(const History& phi, double t);
/// As above, but empty exactly at an interior jump of the class that no point
/// value covers.
std::optional<Vector> static_prolongation_checked(const History& phi, double t);

/// The prolongation as a piecewise object on [-r, up_to] with the point value
/// phi(0) at 0.
PiecewisePoly prolonged_pieces(const History& phi, double up_to);

/// The history segment x_t on [-r, 0], assembled from the history (t + theta
/// < 0) and the trajectory interpolant (t + theta >= 0).
PiecewisePoly segment(const Trajectory& x, const History& phi, double t);

}  // namespace rfde
