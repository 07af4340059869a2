#pragma once

#include <vector>

#include "rfde/piecewise.hpp"

namespace rfde {

/// Grid-sampled solution on [0, T]. Nodes carry vector values; breakpoints
/// flag nodes where lower regularity is expected (history discontinuities
/// propagated by the delays). interp_order 1 evaluates the piecewise-linear
/// interpolant, 3 a piecewise-cubic Hermite one with stencils that do not
/// reach across breakpoints.
struct Trajectory {
    std::vector<double> grid;
    std::vector<Vector> values;
    std::vector<double> breakpoints;
    int interp_order = 1;

    int dim() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
    double t_end() const { return grid.empty() ? 0.0 : grid.back(); }

    /// Index of the cell [grid[i], grid[i+1]] containing t.
    int cell_index(double t) const;

    Vector eval(double t) const;

    /// Exact piecewise-polynomial representation of the interpolant.
    PiecewisePoly interpolant() const;

    void validate() const;
};

/// n-by-n matrix trajectory (the fundamental matrix). Stored column-wise.
struct MatrixTrajectory {
    std::vector<double> grid;
    std::vector<Matrix> values;
    std::vector<double> breakpoints;

    Matrix eval(double t) const;
    Trajectory column(int j) const;
};

}  // namespace rfde
