#pragma once

#include "rfde/forcing.hpp"

namespace rfde {

struct SolverConfig {
    double h = 1e-3;
    int quad_order = 5;
    double picard_tol = 1e-12;
    int picard_max = 50;
    bool align_breakpoints = true;

    void validate() const;
};

/// Fixed-point iteration at a step failed to contract.
class PicardError : public std::runtime_error {
public:
    PicardError(int step_, double residual_)
        : std::runtime_error("Picard iteration did not converge"), step(step_), residual(residual_) {}
    int step;
    double residual;
};

/// A grid node coincides with an atom activation time while breakpoint
/// alignment is disabled.
class StepRejectionError : public std::runtime_error {
public:
    explicit StepRejectionError(double t)
        : std::runtime_error("grid node coincides with an atom activation time"), time(t) {}
    double time;
};

/// Discontinuity/kink times in (0, T] induced by the history breakpoints and
/// the kernel feature delays (closed under repeated shifts, r included).
std::vector<double> propagated_breakpoints(const Kernel& kernel, const History& phi, double T);

/// Uniform grid of step cfg.h on [0, T], with the breakpoints merged in when
/// cfg.align_breakpoints is set.
std::vector<double> build_grid(double T, const SolverConfig& cfg, const std::vector<double>& breaks);

/// Mild solution via the Volterra fixed-point form
/// x(t) = phi(0) + (d(check) * Vx)(t) + G(t; phi),
/// advanced by implicit trapezoidal quadrature with Picard iteration.
Trajectory solve_mild(const Kernel& kernel, const History& phi, double T, const SolverConfig& cfg);

/// Truncated-memory forced route: xdot(t) = int_{-t}^0 d(eta) x(t+theta) + f(t),
/// breakpoint-aware implicit trapezoid.
Trajectory solve_forced_dde(const Kernel& kernel, const ForcingFunction& f, const Vector& x0,
                            double T, const SolverConfig& cfg);

/// Classical method of steps for continuous histories: xdot(t) = L x_t with
/// the full-memory right-hand side assembled from the history and the
/// already-computed trajectory.
Trajectory solve_classical(const Kernel& kernel, const History& phi, double T,
                           const SolverConfig& cfg);

/// Columns are the mild solutions under the instantaneous inputs e_i.
MatrixTrajectory fundamental_matrix(const Kernel& kernel, double T, const SolverConfig& cfg);

/// int_{-min(t,r)}^0 d(eta)(theta) x(t+theta) from the trajectory
/// interpolant. `side` resolves atom activation exactly at t.
Vector truncated_kernel_term(const Kernel& kernel, const Trajectory& x, double t, Side side);

/// L x_t for t >= r (no history needed).
Vector full_kernel_term(const Kernel& kernel, const Trajectory& x, double t);

}  // namespace rfde
