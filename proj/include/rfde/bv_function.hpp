#pragma once

#include <optional>
#include <vector>

#include "rfde/piecewise.hpp"

namespace rfde {

/// Matrix- or scalar-valued function of bounded variation on [lo, hi],
/// represented as base value + finitely many jumps + piecewise-polynomial
/// density:
///
///   alpha(t) = base + sum_{jumps inside (lo, t]} J + integral_lo^t density.
///
/// The function is right-continuous at interior and right-endpoint atoms. An
/// atom listed at the left endpoint sits immediately inside the interval:
/// alpha(lo) = base, and integrals over the full domain pick the jump up.
/// (This is how a delay of exactly r enters a kernel that is constant to the
/// left of -r.)
class BVFunction {
public:
    struct Atom {
        double loc;
        Matrix jump;
    };

    BVFunction(double lo, double hi, Matrix base, std::vector<Atom> atoms,
               std::optional<PiecewisePoly> density = std::nullopt, bool density_is_norm = false);

    static BVFunction constant(double lo, double hi, const Matrix& v) {
        return BVFunction(lo, hi, v, {});
    }
    static BVFunction from_atoms(double lo, double hi, const Matrix& base, std::vector<Atom> atoms) {
        return BVFunction(lo, hi, base, std::move(atoms));
    }
    static BVFunction from_density(double lo, double hi, PiecewisePoly density) {
        Matrix base = Matrix::Zero(density.rows(), density.cols());
        return BVFunction(lo, hi, base, {}, std::move(density));
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Matrix& base() const { return base_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool has_density() const { return density_.has_value(); }
    const PiecewisePoly& density() const { return *density_; }
    bool density_is_norm() const { return density_is_norm_; }

    /// alpha(t); see the class comment for the convention at atoms.
    Matrix value(double t) const;

    /// Pointwise density value with the norm wrap applied when flagged.
    Matrix density_value(double t) const;
    /// Integral of the density over [a, b] (exact for plain pieces,
    /// quadrature for norm-wrapped ones).
    Matrix density_integral(double a, double b) const;

    /// Var(alpha) over [lo, hi]. Atoms contribute the operator norm of their
    /// jump wherever they sit, including the endpoints.
    double total_variation() const;

    /// The total variation function V: V(lo) = 0, monotone nondecreasing,
    /// V(hi) = total_variation(). Exact for scalar densities (sign-split);
    /// matrix densities yield norm-wrapped pieces, flagged approximate.
    BVFunction variation_function() const;

    /// False when total variation of a matrix density is quadrature-based.
    bool variation_exact() const;

    /// Locations where evaluating an integrand matters (atom locations).
    std::vector<double> atom_locations() const;

private:
    double lo_, hi_;
    int rows_, cols_;
    Matrix base_;
    std::vector<Atom> atoms_;
    std::optional<PiecewisePoly> density_;
    bool density_is_norm_ = false;
    std::optional<PiecewisePoly> density_antideriv_;  // cached for plain densities
};

}  // namespace rfde
