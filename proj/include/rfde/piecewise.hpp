#pragma once

#include <optional>
#include <vector>

#include "rfde/polynomial.hpp"

namespace rfde {

/// Evaluation side at a breakpoint of a piecewise function.
enum class Side { AE, Left, Right };

/// Piecewise matrix-polynomial function on a closed interval. Pieces tile the
/// domain; polynomials are stored in the global coordinate. Isolated point
/// values may override the a.e. class at specific points.
///
/// Breakpoint convention (Side::AE): a point value wins if present, otherwise
/// the left piece (left-limit), matching the a.e. representative used for
/// histories.
class PiecewisePoly {
public:
    struct Piece {
        double lo, hi;
        MatPoly poly;
    };
    struct PointValue {
        double t;
        Matrix v;
    };

    /// Zero scalar function on [0, 1]; placeholder for containers.
    PiecewisePoly() : PiecewisePoly(0.0, 1.0, {Piece{0.0, 1.0, MatPoly()}}) {}
    PiecewisePoly(double lo, double hi, std::vector<Piece> pieces,
                  std::vector<PointValue> point_values = {});

    static PiecewisePoly constant(double lo, double hi, const Matrix& v);
    static PiecewisePoly single(double lo, double hi, MatPoly p);
    static PiecewisePoly zero(double lo, double hi, int rows, int cols);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::vector<PointValue>& point_values() const { return point_values_; }

    Matrix value(double t, Side side = Side::AE) const;
    double scalar(double t, Side side = Side::AE) const { return value(t, side)(0, 0); }
    /// Allocation-free piece evaluation (point values ignored).
    template <typename Dst>
    void eval_into(double t, Dst& out) const {
        const auto& pc = pieces_[static_cast<std::size_t>(piece_index(t, Side::AE))];
        pc.poly.eval_into(t < lo_ ? lo_ : (t > hi_ ? hi_ : t), out);
    }

    /// Interior piece edges, ascending.
    std::vector<double> breakpoints() const;
    /// Interior edges where the left/right limits genuinely differ.
    std::vector<double> jump_points(double tol = 1e-12) const;
    bool has_jump_at(double t, double tol = 1e-12) const;
    std::optional<Matrix> point_value_at(double t) const;

    PiecewisePoly restrict_to(double a, double b) const;
    /// q(u) = p(c0 + c1 * u). c1 must be nonzero; c1 < 0 reverses the domain.
    PiecewisePoly compose_affine_arg(double c0, double c1) const;
    /// q(u) = p(u + s) on [lo - s, hi - s].
    PiecewisePoly shifted_arg(double s) const { return compose_affine_arg(s, 1.0); }

    /// Continuous antiderivative with F(lo) = 0.
    PiecewisePoly antiderivative() const;
    /// Exact integral over [a, b] within the domain.
    Matrix integrate(double a, double b) const;

    /// Piecewise matrix product this(t) * rhs(t) on the common domain.
    PiecewisePoly matmul(const PiecewisePoly& rhs) const;
    PiecewisePoly operator+(const PiecewisePoly& rhs) const;
    PiecewisePoly operator-(const PiecewisePoly& rhs) const;
    PiecewisePoly operator*(double s) const;

    /// L^p norm over the domain with the Euclidean norm on values
    /// (Frobenius for matrix values). p = inf gives the essential supremum;
    /// point values are excluded throughout. Exact for scalar values and for
    /// even integer p; composite Gauss quadrature otherwise.
    double lp_norm(double p) const;
    double sup_norm() const;  // = lp_norm(inf)

    /// Index of the piece whose closed interval contains t (edge ties go left).
    int piece_index(double t, Side side = Side::AE) const;

private:
    double lo_, hi_;
    int rows_, cols_;
    std::vector<Piece> pieces_;
    std::vector<PointValue> point_values_;
};

/// Merged, deduplicated sorted union of two breakpoint lists.
std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b,
                                      double tol = 1e-12);

}  // namespace rfde
