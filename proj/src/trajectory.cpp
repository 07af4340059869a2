#include "rfde/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;

bool near_any(const std::vector<double>& pts, double t) {
    for (double p : pts)
        if (std::abs(p - t) <= kEdgeTol) return true;
    return false;
}
}  // namespace

void Trajectory::validate() const {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("Trajectory: grid/value size mismatch");
    if (std::abs(grid.front()) > kEdgeTol)
        throw std::invalid_argument("Trajectory: grid must start at 0");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i + 1] > grid[i])) throw std::invalid_argument("Trajectory: grid not increasing");
    if (interp_order != 1 && interp_order != 3)
        throw std::invalid_argument("Trajectory: interp_order must be 1 or 3");
}

int Trajectory::cell_index(double t) const {
    if (t < grid.front() - kEdgeTol || t > grid.back() + kEdgeTol)
        throw std::out_of_range("Trajectory: evaluation outside [0, T]");
    const double tc = std::clamp(t, grid.front(), grid.back());
    auto it = std::upper_bound(grid.begin(), grid.end(), tc);
    int idx = static_cast<int>(it - grid.begin()) - 1;
    idx = std::clamp(idx, 0, static_cast<int>(grid.size()) - 2);
    return idx;
}

Vector Trajectory::eval(double t) const {
    const int i = cell_index(t);
    const double t0 = grid[static_cast<std::size_t>(i)], t1 = grid[static_cast<std::size_t>(i) + 1];
    const double h = t1 - t0;
    const double s = (std::clamp(t, grid.front(), grid.back()) - t0) / h;
    const Vector& v0 = values[static_cast<std::size_t>(i)];
    const Vector& v1 = values[static_cast<std::size_t>(i) + 1];
    if (interp_order == 1) return (1.0 - s) * v0 + s * v1;

    // Cubic Hermite with difference-quotient slopes; one-sided next to
    // breakpoints and at the ends of the grid.
    auto slope = [&](int k) -> Vector {
        const std::size_t ku = static_cast<std::size_t>(k);
        const bool at_break = near_any(breakpoints, grid[ku]);
        if (k > 0 && k + 1 < static_cast<int>(grid.size()) && !at_break)
            return (values[ku + 1] - values[ku - 1]) / (grid[ku + 1] - grid[ku - 1]);
        if (k + 1 < static_cast<int>(grid.size()))
            return (values[ku + 1] - values[ku]) / (grid[ku + 1] - grid[ku]);
        return (values[ku] - values[ku - 1]) / (grid[ku] - grid[ku - 1]);
    };
    const Vector m0 = slope(i) * h, m1 = slope(i + 1) * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * v1 +
           (s3 - s2) * m1;
}

PiecewisePoly Trajectory::interpolant() const {
    std::vector<PiecewisePoly::Piece> pieces;
    const int n = dim();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t0 = grid[i], t1 = grid[i + 1];
        if (interp_order == 1) {
            const Vector slope = (values[i + 1] - values[i]) / (t1 - t0);
            // x(t) = v0 + slope * (t - t0), expanded in the global coordinate.
            std::vector<Matrix> coef{values[i] - slope * t0, slope};
            pieces.push_back({t0, t1, MatPoly(std::move(coef))});
        } else {
            // Sample the Hermite interpolant at four points and fit the cubic.
            std::vector<double> ts{t0, t0 + (t1 - t0) / 3.0, t0 + 2.0 * (t1 - t0) / 3.0, t1};
            Eigen::MatrixXd V(4, 4);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) V(r, c) = std::pow(ts[static_cast<std::size_t>(r)], c);
            Eigen::MatrixXd rhs(4, n);
            for (int r = 0; r < 4; ++r) rhs.row(r) = eval(ts[static_cast<std::size_t>(r)]).transpose();
            const Eigen::MatrixXd sol = V.fullPivLu().solve(rhs);
            std::vector<Matrix> coef;
            for (int c = 0; c < 4; ++c) coef.push_back(sol.row(c).transpose());
            pieces.push_back({t0, t1, MatPoly(std::move(coef))});
        }
    }
    return PiecewisePoly(grid.front(), grid.back(), std::move(pieces));
}

Matrix MatrixTrajectory::eval(double t) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    int idx = static_cast<int>(it - grid.begin()) - 1;
    idx = std::clamp(idx, 0, static_cast<int>(grid.size()) - 2);
    const std::size_t i = static_cast<std::size_t>(idx);
    const double s = (t - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - s) * values[i] + s * values[i + 1];
}

Trajectory MatrixTrajectory::column(int j) const {
    Trajectory out;
    out.grid = grid;
    out.breakpoints = breakpoints;
    for (const Matrix& m : values) out.values.push_back(m.col(j));
    return out;
}

}  // namespace rfde
