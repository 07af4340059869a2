#include "rfde/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;
}

std::vector<AcEntry> ac_modulus(const Trajectory& x, const std::vector<double>& deltas) {
    x.validate();
    struct Cell {
        double dt;
        double dx;
        double ratio;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i + 1 < x.grid.size(); ++i) {
        const double dt = x.grid[i + 1] - x.grid[i];
        const double dx = (x.values[i + 1] - x.values[i]).norm();
        cells.push_back({dt, dx, dx / dt});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.ratio > b.ratio; });

    std::vector<AcEntry> table;
    for (double delta : deltas) {
        double budget = delta, sum = 0.0;
        for (const Cell& c : cells) {
            if (budget <= 0.0) break;
            if (c.dt <= budget) {
                sum += c.dx;
                budget -= c.dt;
            } else {
                sum += c.dx * (budget / c.dt);
                budget = 0.0;
            }
        }
        table.push_back({delta, sum});
    }
    return table;
}

double lipschitz_estimate(const Trajectory& x) {
    x.validate();
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < x.grid.size(); ++i)
        lip = std::max(lip,
                       (x.values[i + 1] - x.values[i]).norm() / (x.grid[i + 1] - x.grid[i]));
    return lip;
}

std::vector<double> derivative_lp(const Trajectory& x, double p, int levels) {
    x.validate();
    if (levels < 1) throw std::invalid_argument("derivative_lp: need at least one level");
    std::vector<double> norms;
    for (int level = levels - 1; level >= 0; --level) {
        const std::size_t stride = static_cast<std::size_t>(1) << level;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < x.grid.size(); i += stride) idx.push_back(i);
        if (idx.back() != x.grid.size() - 1) idx.push_back(x.grid.size() - 1);
        if (idx.size() < 2) {
            norms.push_back(0.0);
            continue;
        }
        if (std::isinf(p)) {
            double m = 0.0;
            for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
                const double dt = x.grid[idx[k + 1]] - x.grid[idx[k]];
                m = std::max(m, (x.values[idx[k + 1]] - x.values[idx[k]]).norm() / dt);
            }
            norms.push_back(m);
        } else {
            double acc = 0.0;
            for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
                const double dt = x.grid[idx[k + 1]] - x.grid[idx[k]];
                const double q = (x.values[idx[k + 1]] - x.values[idx[k]]).norm() / dt;
                acc += std::pow(q, p) * dt;
            }
            norms.push_back(std::pow(acc, 1.0 / p));
        }
    }
    return norms;
}

ResidualStats de_residual(const Kernel& kernel, const Trajectory& x, const ForcingFunction* f,
                          ResidualMode mode) {
    x.validate();
    ResidualStats stats;
    const double t_lo = (mode == ResidualMode::Full) ? kernel.r() : 0.0;
    for (std::size_t k = 1; k + 1 < x.grid.size(); ++k) {
        const double t = x.grid[k];
        const double h1 = x.grid[k] - x.grid[k - 1];
        const double h2 = x.grid[k + 1] - x.grid[k];
        const double guard = 2.0 * std::max(h1, h2);
        if (t < t_lo + guard) continue;
        bool near_break = false;
        for (double b : x.breakpoints)
            if (std::abs(t - b) < guard) near_break = true;
        if (near_break) continue;

        // Second-order three-point derivative on a possibly nonuniform grid.
        const Vector dx = -h2 / (h1 * (h1 + h2)) * x.values[k - 1] +
                          (h2 - h1) / (h1 * h2) * x.values[k] +
                          h1 / (h2 * (h1 + h2)) * x.values[k + 1];

        Vector rhs = (mode == ResidualMode::Full)
                         ? full_kernel_term(kernel, x, t)
                         : truncated_kernel_term(kernel, x, t, Side::Right);
        if (mode == ResidualMode::Truncated && f) rhs += f->eval(t, Side::Right);

        const double res = (dx - rhs).norm();
        stats.max_abs = std::max(stats.max_abs, res);
        stats.l1 += res * 0.5 * (h1 + h2);
        stats.samples += 1;
    }
    return stats;
}

RegularityReport regularity_report(const Kernel& kernel, const Trajectory& x,
                                   const ForcingFunction* f, const std::vector<double>& deltas,
                                   double p, int levels) {
    RegularityReport rep;
    rep.ac_table = ac_modulus(x, deltas);
    rep.lip_estimate = lipschitz_estimate(x);
    rep.deriv_lp_norms = derivative_lp(x, p, levels);
    rep.residual = de_residual(kernel, x, f, ResidualMode::Truncated);
    return rep;
}

}  // namespace rfde
