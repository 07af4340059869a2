#include "rfde/rfde_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;
}

Kernel::Kernel(double r, BVFunction eta) : r_(r), eta_(std::move(eta)) {
    if (!(r_ > 0.0)) throw std::invalid_argument("Kernel: delay horizon must be positive");
    if (eta_.rows() != eta_.cols()) throw std::invalid_argument("Kernel: eta must be square-valued");
    if (std::abs(eta_.lo() + r_) > 1e-9 || std::abs(eta_.hi()) > 1e-9)
        throw std::invalid_argument("Kernel: eta must live on [-r, 0]");
    if (eta_.density_is_norm()) throw std::invalid_argument("Kernel: eta cannot be norm-wrapped");
    n_ = eta_.rows();
}

BVFunction Kernel::reflected() const {
    std::vector<BVFunction::Atom> atoms;
    for (const auto& a : eta_.atoms()) atoms.push_back({-a.loc, a.jump});
    std::optional<PiecewisePoly> density;
    if (eta_.has_density()) density = eta_.density().compose_affine_arg(0.0, -1.0);
    return BVFunction(0.0, r_, -eta_.value(0.0), std::move(atoms), std::move(density));
}

std::vector<double> Kernel::atom_delays() const {
    std::vector<double> out;
    for (const auto& a : eta_.atoms()) out.push_back(-a.loc);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> Kernel::density_edge_delays() const {
    std::vector<double> out;
    if (eta_.has_density())
        for (double e : eta_.density().breakpoints()) out.push_back(-e);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> Kernel::breakpoint_offsets() const {
    std::vector<double> out = atom_delays();
    const auto edges = density_edge_delays();
    out.insert(out.end(), edges.begin(), edges.end());
    std::vector<double> positive;
    for (double d : out)
        if (d > kEdgeTol && d <= r_ + kEdgeTol) positive.push_back(d);
    return merge_breakpoints(positive, {});
}

Vector apply_L(const Kernel& kernel, const PiecewisePoly& psi) {
    return rs_integral(kernel.eta(), psi, kernel.eta().lo(), kernel.eta().hi()).col(0);
}

void History::validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("History: r must be positive");
    if (std::abs(pieces.lo() + r) > 1e-9 || std::abs(pieces.hi()) > 1e-9)
        throw std::invalid_argument("History: pieces must live on [-r, 0]");
    if (pieces.cols() != 1) throw std::invalid_argument("History: vector-valued pieces required");
    if (pieces.rows() != value_at_zero.size())
        throw std::invalid_argument("History: dimension mismatch with valueAtZero");
    if (!(p >= 1.0)) throw std::invalid_argument("History: p must be in [1, inf]");
}

bool History::is_continuous(double tol) const {
    if (!pieces.jump_points(tol).empty()) return false;
    return (pieces.value(0.0, Side::Left).col(0) - value_at_zero).norm() <= tol;
}

History instantaneous_input(const Vector& xi, double r, double p) {
    History phi;
    phi.r = r;
    phi.pieces = PiecewisePoly::zero(-r, 0.0, static_cast<int>(xi.size()), 1);
    phi.value_at_zero = xi;
    phi.p = p;
    return phi;
}

double lp_norm(const History& phi, double p) { return phi.pieces.lp_norm(p); }

Vector static_prolongation(const History& phi, double t) {
    if (t >= -kEdgeTol) return phi.value_at_zero;
    if (t < -phi.r - kEdgeTol)
        throw std::out_of_range("static_prolongation: t below -r");
    return phi.pieces.value(t).col(0);
}

std::optional<Vector> static_prolongation_checked(const History& phi, double t) {
    if (t >= -kEdgeTol) return phi.value_at_zero;
    if (t < -phi.r - kEdgeTol)
        throw std::out_of_range("static_prolongation: t below -r");
    if (phi.pieces.has_jump_at(t) && !phi.pieces.point_value_at(t)) return std::nullopt;
    return phi.pieces.value(t).col(0);
}

PiecewisePoly prolonged_pieces(const History& phi, double up_to) {
    if (!(up_to > 0.0)) throw std::invalid_argument("prolonged_pieces: up_to must be positive");
    std::vector<PiecewisePoly::Piece> pieces = phi.pieces.pieces();
    pieces.push_back({0.0, up_to, MatPoly::constant(phi.value_at_zero)});
    std::vector<PiecewisePoly::PointValue> pvs = phi.pieces.point_values();
    pvs.push_back({0.0, phi.value_at_zero});
    return PiecewisePoly(-phi.r, up_to, std::move(pieces), std::move(pvs));
}

PiecewisePoly segment(const Trajectory& x, const History& phi, double t) {
    if (t < -kEdgeTol || t > x.t_end() + kEdgeTol)
        throw std::out_of_range("segment: t outside [0, T]");
    const double r = phi.r;
    const PiecewisePoly interp = x.interpolant();
    if (t >= r - kEdgeTol) {
        // Pure trajectory restriction.
        return interp.restrict_to(t - r, t).shifted_arg(t);
    }
    // History part on [-r, -t), trajectory part on [-t, 0].
    std::vector<PiecewisePoly::Piece> pieces;
    std::vector<PiecewisePoly::PointValue> pvs;
    if (t > kEdgeTol) {
        const PiecewisePoly hist = phi.pieces.restrict_to(t - r, 0.0).shifted_arg(t);
        for (const auto& pc : hist.pieces()) pieces.push_back(pc);
        for (const auto& pv : hist.point_values())
            if (pv.t < -t - kEdgeTol) pvs.push_back(pv);
        const PiecewisePoly traj = interp.restrict_to(0.0, t).shifted_arg(t);
        for (const auto& pc : traj.pieces()) pieces.push_back(pc);
    } else {
        for (const auto& pc : phi.pieces.pieces()) pieces.push_back(pc);
        for (const auto& pv : phi.pieces.point_values())
            if (pv.t < -kEdgeTol) pvs.push_back(pv);
    }
    pvs.push_back({-t, Matrix(phi.value_at_zero)});
    return PiecewisePoly(-r, 0.0, std::move(pieces), std::move(pvs));
}

}  // namespace rfde
