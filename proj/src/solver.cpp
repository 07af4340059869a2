#include "rfde/solver.hpp"

#include <algorithm>
#include <cmath>

#include "rfde/quadrature.hpp"

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;
}

void SolverConfig::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("SolverConfig: h must be positive");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picardTol must be positive");
    if (picard_max < 1) throw std::invalid_argument("SolverConfig: picardMax must be at least 1");
    if (quad_order < 1 || quad_order > 32)
        throw std::invalid_argument("SolverConfig: quadOrder out of range");
}

namespace {

// Closure of the seed set under repeated addition of the offsets, clipped to
// (0, T]. Positive seeds are themselves breakpoints.
std::vector<double> breakpoint_closure(const std::vector<double>& seeds,
                                       const std::vector<double>& offsets, double T, double r) {
    std::vector<double> all;
    auto seen = [&](double q) {
        for (double a : all)
            if (std::abs(a - q) <= 1e-11) return true;
        return false;
    };
    for (double s : seeds)
        if (s > kEdgeTol && s <= T + kEdgeTol && !seen(s)) all.push_back(s);
    std::vector<double> frontier = seeds;
    const int depth = std::min<int>(64, static_cast<int>(std::ceil(T / r)) + 2);
    for (int gen = 0; gen < depth && !frontier.empty(); ++gen) {
        std::vector<double> next;
        for (double p : frontier)
            for (double o : offsets) {
                const double q = p + o;
                if (q > kEdgeTol && q <= T + kEdgeTol && !seen(q)) {
                    all.push_back(q);
                    next.push_back(q);
                    if (all.size() > 20000) {
                        std::sort(all.begin(), all.end());
                        return all;
                    }
                }
            }
        frontier = std::move(next);
    }
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

std::vector<double> propagated_breakpoints(const Kernel& kernel, const History& phi, double T) {
    std::vector<double> offsets = kernel.breakpoint_offsets();
    offsets.push_back(kernel.r());
    offsets = merge_breakpoints(offsets, {});
    std::vector<double> seeds = phi.pieces.breakpoints();
    seeds.push_back(0.0);
    return breakpoint_closure(seeds, offsets, T, kernel.r());
}

std::vector<double> build_grid(double T, const SolverConfig& cfg, const std::vector<double>& breaks) {
    if (!(T > 0.0)) throw std::invalid_argument("build_grid: horizon must be positive");
    const double n_real = T / cfg.h;
    if (n_real > 5e6) throw std::invalid_argument("build_grid: grid too fine for the horizon");
    const int n = std::max(1, static_cast<int>(std::ceil(n_real - 1e-9)));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + breaks.size() + 1);
    for (int k = 0; k <= n; ++k) grid.push_back(std::min(T, k * cfg.h));
    grid.back() = T;
    if (cfg.align_breakpoints) {
        std::vector<double> keep;
        for (double b : breaks)
            if (b > kEdgeTol && b < T - kEdgeTol) keep.push_back(b);
        // Drop uniform nodes that nearly collide with a forced breakpoint.
        const double snap = cfg.h * 1e-6;
        std::vector<double> merged;
        for (double g : grid) {
            bool collides = false;
            for (double b : keep)
                if (std::abs(g - b) < snap && std::abs(g) > kEdgeTol && std::abs(g - T) > kEdgeTol)
                    collides = true;
            if (!collides) merged.push_back(g);
        }
        merged.insert(merged.end(), keep.begin(), keep.end());
        std::sort(merged.begin(), merged.end());
        grid.clear();
        for (double g : merged)
            if (grid.empty() || g - grid.back() > kEdgeTol) grid.push_back(g);
    }
    return grid;
}

namespace {

struct EtaCheckView {
    BVFunction chk;                                // the reflected kernel on [0, r]
    std::vector<std::pair<double, Matrix>> atoms;  // (tau, jump), ascending tau
    std::vector<double> density_edges;             // interior edges in u
    int gauss_order = 3;

    const PiecewisePoly* density() const { return chk.has_density() ? &chk.density() : nullptr; }
};

EtaCheckView make_view(const Kernel& kernel, const SolverConfig& cfg) {
    EtaCheckView v{kernel.reflected(), {}, {}, 3};
    for (const auto& a : v.chk.atoms()) v.atoms.push_back({a.loc, a.jump});
    if (v.chk.has_density()) {
        v.density_edges = v.chk.density().breakpoints();
        int deg = 0;
        for (const auto& pc : v.chk.density().pieces()) deg = std::max(deg, pc.poly.degree());
        // Integrand degree: density degree + quadratic interpolant of Vx.
        v.gauss_order = std::clamp((deg + 2) / 2 + 2, 3, std::max(3, cfg.quad_order));
    }
    return v;
}

struct ConvScratch {
    explicit ConvScratch(int n) : D(n, n), arg(n), prod(n) {}
    Matrix D;
    Vector arg;
    Vector prod;
};

// out += int_lo^hi density(t - s) * arg(s) ds with the given splits;
// allocation-free in the inner loop.
template <typename ArgFun>
void accumulate_density(const EtaCheckView& view, double t, double lo, double hi,
                        const std::vector<double>& splits, ArgFun&& argfun, Vector& out,
                        ConvScratch& scr) {
    const PiecewisePoly& dens = view.chk.density();
    gauss_composite(
        [&](double s) -> const Vector& {
            dens.eval_into(t - s, scr.D);
            argfun(s, scr.arg);
            scr.prod.noalias() = scr.D * scr.arg;
            return scr.prod;
        },
        lo, hi, splits, view.gauss_order,
        [&](double w, const Vector& v) { out.noalias() += w * v; });
}

void reject_unaligned_atoms(const std::vector<double>& grid, const std::vector<double>& taus) {
    for (double t : grid)
        for (double tau : taus)
            if (std::abs(t - tau) <= 1e-11 && tau > kEdgeTol) throw StepRejectionError(t);
}

}  // namespace

Trajectory solve_mild(const Kernel& kernel, const History& phi, double T, const SolverConfig& cfg) {
    cfg.validate();
    phi.validate();
    if (phi.n() != kernel.n()) throw std::invalid_argument("solve_mild: dimension mismatch");
    const int n = kernel.n();
    const double r = kernel.r();

    const std::vector<double> breaks = propagated_breakpoints(kernel, phi, T);
    const std::vector<double> grid = build_grid(T, cfg, breaks);
    const int N = static_cast<int>(grid.size());

    // The reflected kernel lives on [0, r]; density values are needed at
    // u = t - s for s in [max(0, t-r), t].
    const EtaCheckView view = make_view(kernel, cfg);

    const ForcingSet fs = build_forcing(kernel, phi);
    auto G_at = [&](double t) -> Vector { return fs.G.value(std::min(t, r)).col(0); };

    std::vector<Vector> x(static_cast<std::size_t>(N), Vector::Zero(n));
    std::vector<Vector> y(static_cast<std::size_t>(N), Vector::Zero(n));  // cumulative integral
    x[0] = phi.value_at_zero;

    // Quadratic-in-cell evaluation of the cumulative integral of the linear
    // interpolant; valid for s up to grid[filled]. Allocation-free.
    auto y_interp_into = [&](double s, int filled, Vector& out) {
        auto it = std::upper_bound(grid.begin(), grid.begin() + filled + 1, s);
        int j = static_cast<int>(it - grid.begin()) - 1;
        j = std::clamp(j, 0, filled - 1);
        const std::size_t ju = static_cast<std::size_t>(j);
        const double dj = grid[ju + 1] - grid[ju];
        const double sg = s - grid[ju];
        const double q = sg * sg / (2.0 * dj);
        out = y[ju];
        out.noalias() += (sg - q) * x[ju];
        out.noalias() += q * x[ju + 1];
    };

    ConvScratch scr(n);
    std::vector<double> splits;
    Vector conv_old(n), conv_new(n), x_new(n), next(n);

    for (int k = 0; k + 1 < N; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const double tk = grid[ku];
        const double t = grid[ku + 1];
        const double dt = t - tk;
        const Vector base = phi.value_at_zero + G_at(t);

        conv_old.setZero();
        for (const auto& [tau, jump] : view.atoms) {
            if (tau > t + kEdgeTol) break;
            const double s = t - tau;
            if (s <= tk + kEdgeTol) {
                y_interp_into(std::max(0.0, s), k, scr.arg);
                conv_old.noalias() += jump * scr.arg;
            }
        }
        if (view.density()) {
            const double s_lo = std::max(0.0, t - r);
            if (tk > s_lo + kEdgeTol) {
                splits.clear();
                for (int j = 0; j <= k; ++j) {
                    const double g = grid[static_cast<std::size_t>(j)];
                    if (g > s_lo && g < tk) splits.push_back(g);
                }
                for (double e : view.density_edges) {
                    const double s = t - e;
                    if (s > s_lo && s < tk) splits.push_back(s);
                }
                accumulate_density(
                    view, t, s_lo, tk, splits,
                    [&](double s, Vector& out) { y_interp_into(s, k, out); }, conv_old, scr);
            }
        }

        x_new = x[ku];
        double res = 0.0;
        bool converged = false;
        for (int it = 0; it < cfg.picard_max; ++it) {
            // Candidate cumulative integral on (tk, t].
            auto y_new_into = [&](double s, Vector& out) {
                const double sg = s - tk;
                const double q = sg * sg / (2.0 * dt);
                out = y[ku];
                out.noalias() += (sg - q) * x[ku];
                out.noalias() += q * x_new;
            };
            conv_new.setZero();
            for (const auto& [tau, jump] : view.atoms) {
                if (tau > t + kEdgeTol) break;
                const double s = t - tau;
                if (s > tk + kEdgeTol) {
                    y_new_into(s, scr.arg);
                    conv_new.noalias() += jump * scr.arg;
                }
            }
            if (view.density()) {
                const double lo = std::max(tk, t - r);
                if (t > lo + kEdgeTol) {
                    splits.clear();
                    for (double e : view.density_edges) {
                        const double s = t - e;
                        if (s > lo && s < t) splits.push_back(s);
                    }
                    accumulate_density(view, t, lo, t, splits, y_new_into, conv_new, scr);
                }
            }
            next = base;
            next += conv_old;
            next += conv_new;
            res = (next - x_new).cwiseAbs().maxCoeff();
            x_new = next;
            if (res <= cfg.picard_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw PicardError(k + 1, res);
        x[ku + 1] = x_new;
        y[ku + 1] = y[ku] + 0.5 * dt * (x[ku] + x_new);
    }

    Trajectory out;
    out.grid = grid;
    out.values = std::move(x);
    out.breakpoints = breaks;
    out.interp_order = 1;
    return out;
}

namespace {

// Shared implicit-trapezoid driver for the differentiated routes. The
// right-hand side is R(t, side, xt) where xt evaluates the trajectory built
// so far (plus the current step candidate).
struct SteppedSolve {
    const std::vector<double>& grid;
    std::vector<Vector>& x;
    const SolverConfig& cfg;

    template <typename Rhs>
    void run(Rhs&& rhs, int n) {
        const int N = static_cast<int>(grid.size());
        for (int k = 0; k + 1 < N; ++k) {
            const double tk = grid[static_cast<std::size_t>(k)];
            const double t = grid[static_cast<std::size_t>(k) + 1];
            const double dt = t - tk;
            Vector x_new = x[static_cast<std::size_t>(k)];
            const Vector r_left = rhs(tk, Side::Right, k, x_new, t);
            double res = 0.0;
            bool converged = false;
            for (int it = 0; it < cfg.picard_max; ++it) {
                const Vector r_right = rhs(t, Side::Left, k, x_new, t);
                const Vector next = x[static_cast<std::size_t>(k)] + 0.5 * dt * (r_left + r_right);
                res = (next - x_new).cwiseAbs().maxCoeff();
                x_new = next;
                if (res <= cfg.picard_tol) {
                    converged = true;
                    break;
                }
            }
            if (!converged) throw PicardError(k + 1, res);
            x[static_cast<std::size_t>(k) + 1] = x_new;
            (void)n;
        }
    }
};

}  // namespace

Trajectory solve_forced_dde(const Kernel& kernel, const ForcingFunction& f, const Vector& x0,
                            double T, const SolverConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(x0.size()) != kernel.n())
        throw std::invalid_argument("solve_forced_dde: dimension mismatch");
    const int n = kernel.n();
    const double r = kernel.r();

    std::vector<double> offsets = kernel.breakpoint_offsets();
    offsets.push_back(r);
    offsets = merge_breakpoints(offsets, {});
    std::vector<double> seeds = {0.0};
    for (double b : f.breakpoints)
        if (b > kEdgeTol && b <= T + kEdgeTol) seeds.push_back(b);
    const std::vector<double> breaks = breakpoint_closure(seeds, offsets, T, r);

    const std::vector<double> grid = build_grid(T, cfg, breaks);
    if (!cfg.align_breakpoints) reject_unaligned_atoms(grid, kernel.atom_delays());

    const EtaCheckView view = make_view(kernel, cfg);

    std::vector<Vector> x(grid.size(), Vector::Zero(n));
    x[0] = x0;

    ConvScratch scr(n);
    std::vector<double> splits;
    auto x_interp_into = [&](double s, int k, const Vector& cand, double t_new, Vector& out) {
        if (s >= t_new - kEdgeTol) {
            out = cand;
            return;
        }
        const double tk = grid[static_cast<std::size_t>(k)];
        if (s > tk) {
            const double w = (s - tk) / (t_new - tk);
            out = (1.0 - w) * x[static_cast<std::size_t>(k)];
            out.noalias() += w * cand;
            return;
        }
        auto it = std::upper_bound(grid.begin(), grid.begin() + k + 1, s);
        int j = static_cast<int>(it - grid.begin()) - 1;
        j = std::clamp(j, 0, std::max(0, k - 1));
        const std::size_t ju = static_cast<std::size_t>(j);
        const double w = (s - grid[ju]) / (grid[ju + 1] - grid[ju]);
        out = (1.0 - w) * x[ju];
        out.noalias() += w * x[ju + 1];
    };

    auto rhs = [&](double t, Side side, int k, const Vector& cand, double t_new) -> Vector {
        Vector sum = f.eval(t, side);
        for (const auto& [tau, jump] : view.atoms) {
            const bool active =
                (tau < t - kEdgeTol) || (std::abs(tau - t) <= kEdgeTol && side == Side::Right);
            if (!active) continue;
            x_interp_into(std::max(0.0, t - tau), k, cand, t_new, scr.arg);
            sum.noalias() += jump * scr.arg;
        }
        if (view.density()) {
            const double lo = std::max(0.0, t - r);
            if (t > lo + kEdgeTol) {
                splits.clear();
                for (double g : grid) {
                    if (g <= lo) continue;
                    if (g >= t) break;
                    splits.push_back(g);
                }
                for (double e : view.density_edges) {
                    const double s = t - e;
                    if (s > lo && s < t) splits.push_back(s);
                }
                accumulate_density(
                    view, t, lo, t, splits,
                    [&](double s, Vector& out) { x_interp_into(s, k, cand, t_new, out); }, sum,
                    scr);
            }
        }
        return sum;
    };

    SteppedSolve driver{grid, x, cfg};
    driver.run(rhs, n);

    Trajectory out;
    out.grid = grid;
    out.values = std::move(x);
    out.breakpoints = breaks;
    out.interp_order = 1;
    return out;
}

Trajectory solve_classical(const Kernel& kernel, const History& phi, double T,
                           const SolverConfig& cfg) {
    cfg.validate();
    phi.validate();
    if (!phi.is_continuous())
        throw std::invalid_argument("solve_classical: continuous history required");
    if (phi.n() != kernel.n()) throw std::invalid_argument("solve_classical: dimension mismatch");
    const int n = kernel.n();
    const double r = kernel.r();

    const std::vector<double> breaks = propagated_breakpoints(kernel, phi, T);
    const std::vector<double> grid = build_grid(T, cfg, breaks);
    if (!cfg.align_breakpoints) reject_unaligned_atoms(grid, kernel.atom_delays());

    const EtaCheckView view = make_view(kernel, cfg);

    std::vector<Vector> x(grid.size(), Vector::Zero(n));
    x[0] = phi.value_at_zero;

    ConvScratch scr(n);
    std::vector<double> splits;
    auto x_bar_into = [&](double s, int k, const Vector& cand, double t_new, Vector& out) {
        if (s < -kEdgeTol) {
            phi.pieces.eval_into(std::max(s, -r), out);
            return;
        }
        if (s >= t_new - kEdgeTol) {
            out = cand;
            return;
        }
        const double tk = grid[static_cast<std::size_t>(k)];
        if (s > tk) {
            const double w = (s - tk) / (t_new - tk);
            out = (1.0 - w) * x[static_cast<std::size_t>(k)];
            out.noalias() += w * cand;
            return;
        }
        auto it = std::upper_bound(grid.begin(), grid.begin() + k + 1, s);
        int j = static_cast<int>(it - grid.begin()) - 1;
        j = std::clamp(j, 0, std::max(0, k - 1));
        const std::size_t ju = static_cast<std::size_t>(j);
        const double w = (s - grid[ju]) / (grid[ju + 1] - grid[ju]);
        out = (1.0 - w) * x[ju];
        out.noalias() += w * x[ju + 1];
    };

    auto rhs = [&](double t, Side /*side*/, int k, const Vector& cand, double t_new) -> Vector {
        // Full memory: continuous history makes the side irrelevant.
        Vector sum = Vector::Zero(n);
        for (const auto& [tau, jump] : view.atoms) {
            x_bar_into(t - tau, k, cand, t_new, scr.arg);
            sum.noalias() += jump * scr.arg;
        }
        if (view.density()) {
            const double lo = t - r;
            splits.clear();
            for (double g : grid) {
                if (g <= lo || g <= 0.0) continue;
                if (g >= t) break;
                splits.push_back(g);
            }
            if (lo < 0.0 && t > 0.0) splits.push_back(0.0);
            for (double pb : phi.pieces.breakpoints())
                if (pb + t > lo && pb + t < std::min(t, 0.0)) splits.push_back(pb + t);
            for (double e : view.density_edges) {
                const double s = t - e;
                if (s > lo && s < t) splits.push_back(s);
            }
            accumulate_density(
                view, t, lo, t, splits,
                [&](double s, Vector& out) { x_bar_into(s, k, cand, t_new, out); }, sum, scr);
        }
        return sum;
    };

    SteppedSolve driver{grid, x, cfg};
    driver.run(rhs, n);

    Trajectory out;
    out.grid = grid;
    out.values = std::move(x);
    out.breakpoints = breaks;
    out.interp_order = 1;
    return out;
}

MatrixTrajectory fundamental_matrix(const Kernel& kernel, double T, const SolverConfig& cfg) {
    const int n = kernel.n();
    std::vector<Trajectory> cols;
    for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        cols.push_back(solve_mild(kernel, instantaneous_input(e, kernel.r()), T, cfg));
    }
    MatrixTrajectory out;
    out.grid = cols[0].grid;
    out.breakpoints = cols[0].breakpoints;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        Matrix m(n, n);
        for (int j = 0; j < n; ++j) m.col(j) = cols[static_cast<std::size_t>(j)].values[i];
        out.values.push_back(std::move(m));
    }
    return out;
}

Vector truncated_kernel_term(const Kernel& kernel, const Trajectory& x, double t, Side side) {
    const int n = kernel.n();
    const double r = kernel.r();
    Vector sum = Vector::Zero(n);
    const EtaCheckView view = [&] {
        SolverConfig cfg;
        return make_view(kernel, cfg);
    }();
    for (const auto& [tau, jump] : view.atoms) {
        const bool active =
            (tau < t - kEdgeTol) || (std::abs(tau - t) <= kEdgeTol && side == Side::Right);
        if (active) sum += jump * x.eval(std::max(0.0, t - tau));
    }
    if (view.density()) {
        const double lo = std::max(0.0, t - r);
        if (t > lo + kEdgeTol) {
            std::vector<double> splits;
            for (double g : x.grid) {
                if (g <= lo) continue;
                if (g >= t) break;
                splits.push_back(g);
            }
            for (double e : view.density_edges) {
                const double s = t - e;
                if (s > lo && s < t) splits.push_back(s);
            }
            gauss_composite([&](double s) -> Vector { return view.density()->value(t - s) * x.eval(s); },
                            lo, t, splits, std::max(3, view.gauss_order),
                            [&](double w, const Vector& v) { sum += w * v; });
        }
    }
    return sum;
}

Vector full_kernel_term(const Kernel& kernel, const Trajectory& x, double t) {
    if (t < kernel.r() - kEdgeTol)
        throw std::invalid_argument("full_kernel_term: needs t >= r");
    return truncated_kernel_term(kernel, x, t, Side::Right);
}

}  // namespace rfde
