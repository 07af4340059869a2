#include "rfde/forcing.hpp"
#include <memory>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfde {

namespace {

constexpr double kEdgeTol = 1e-12;

Vector as_vector(const Matrix& m) { return m.col(0); }

// Shifted a.e. class of phi: q(theta) = phi(t + theta), no point values.
PiecewisePoly shifted_class(const History& phi, double t) {
    return PiecewisePoly(phi.pieces.lo(), phi.pieces.hi(), phi.pieces.pieces()).shifted_arg(t);
}

}  // namespace

Vector g_forcing(const Kernel& kernel, const History& phi, double t,
                 std::vector<double>* coincidences) {
    if (t < -kEdgeTol) throw std::invalid_argument("g_forcing: t must be nonnegative");
    const double r = kernel.r();
    if (t >= r) return Vector::Zero(kernel.n());
    const PiecewisePoly bar = prolonged_pieces(phi, std::max(t, r) + 1.0).shifted_arg(t);
    return as_vector(rs_integral(kernel.eta(), bar, -r, -t, coincidences));
}

Vector G_forcing(const Kernel& kernel, const History& phi, double t) {
    if (t < -kEdgeTol) throw std::invalid_argument("G_forcing: t must be nonnegative");
    const double r = kernel.r();
    const PiecewisePoly A = phi.pieces.antiderivative();
    const Matrix A0 = A.value(0.0);
    const PiecewisePoly big_phi = PiecewisePoly::constant(-r, 0.0, A0) - A;  // int_theta^0 phi
    Vector sum = as_vector(rs_integral(kernel.eta(), big_phi, -r, 0.0));
    if (t < r) {
        // W(s) = int_0^s prolongation(phi): A(s) - A(0) left of 0, s * phi(0) after.
        const double up = std::max(t, r) + 1.0;
        std::vector<PiecewisePoly::Piece> wp;
        for (const auto& pc : A.pieces())
            wp.push_back({pc.lo, pc.hi, pc.poly + MatPoly::constant(-A0)});
        wp.push_back({0.0, up, MatPoly({Matrix::Zero(kernel.n(), 1), Matrix(phi.value_at_zero)})});
        const PiecewisePoly W(-r, up, std::move(wp));
        sum += as_vector(rs_integral(kernel.eta(), W.shifted_arg(t), -r, -t));
    }
    return sum;
}

std::optional<Vector> f_forcing(const Kernel& kernel, const History& phi, double t) {
    if (t < -kEdgeTol) throw std::invalid_argument("f_forcing: t must be nonnegative");
    const double r = kernel.r();
    if (t >= r) return Vector::Zero(kernel.n());
    try {
        return as_vector(rs_integral(kernel.eta(), shifted_class(phi, t), -r, -t));
    } catch (const SharedDiscontinuityError&) {
        return std::nullopt;
    }
}

Vector f_forcing_sided(const Kernel& kernel, const History& phi, double t, Side side) {
    const double r = kernel.r();
    if (t < -kEdgeTol || t > r + kEdgeTol)
        throw std::invalid_argument("f_forcing_sided: t must lie in [0, r]");
    Vector sum = Vector::Zero(kernel.n());
    for (const auto& atom : kernel.eta().atoms()) {
        const double tau = -atom.loc;
        const bool active = (side == Side::Right) ? (tau > t + kEdgeTol) : (tau >= t - kEdgeTol);
        if (!active) continue;
        const double arg = std::clamp(t + atom.loc, -r, 0.0);
        sum += atom.jump * phi.pieces.value(arg, side).col(0);
    }
    if (kernel.eta().has_density() && t < r - kEdgeTol) {
        const PiecewisePoly q = shifted_class(phi, t);
        for (const auto& dp : kernel.eta().density().pieces()) {
            const double lo = std::max(dp.lo, -r), hi = std::min(dp.hi, -t);
            if (!(hi > lo)) continue;
            for (const auto& fp : q.pieces()) {
                const double l2 = std::max(lo, fp.lo), h2 = std::min(hi, fp.hi);
                if (h2 > l2) sum += as_vector((dp.poly * fp.poly).integrate(l2, h2));
            }
        }
    }
    return sum;
}

MatPoly fit_polynomial(const std::function<Vector(double)>& fn, double lo, double hi, int deg) {
    const int m = deg + 1;
    std::vector<double> xs(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        xs[static_cast<std::size_t>(k)] =
            0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * m));
    std::vector<Vector> dd;
    for (double x : xs) dd.push_back(fn(x));
    // Newton divided differences, then expansion to the monomial basis.
    for (int level = 1; level < m; ++level)
        for (int i = m - 1; i >= level; --i)
            dd[static_cast<std::size_t>(i)] =
                (dd[static_cast<std::size_t>(i)] - dd[static_cast<std::size_t>(i - 1)]) /
                (xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(i - level)]);
    MatPoly result = MatPoly::constant(Matrix(dd[static_cast<std::size_t>(m - 1)]));
    for (int k = m - 2; k >= 0; --k)
        result = result.scale_by(Poly({-xs[static_cast<std::size_t>(k)], 1.0})) +
                 MatPoly::constant(Matrix(dd[static_cast<std::size_t>(k)]));
    return result;
}

namespace {

// Window edges inside (0, r) where the forcing changes its polynomial form.
std::vector<double> forcing_windows(const Kernel& kernel, const History& phi) {
    const double r = kernel.r();
    std::vector<double> features = kernel.eta().atom_locations();
    if (kernel.eta().has_density())
        for (double e : kernel.eta().density().breakpoints()) features.push_back(e);
    features.push_back(-r);
    features.push_back(0.0);

    std::vector<double> phi_marks = phi.pieces.breakpoints();
    phi_marks.push_back(-r);
    phi_marks.push_back(0.0);

    std::vector<double> edges;
    for (double f : features) {
        edges.push_back(-f);
        for (double b : phi_marks) edges.push_back(b - f);
    }
    std::vector<double> out;
    for (double e : edges)
        if (e > kEdgeTol && e < r - kEdgeTol) out.push_back(e);
    return merge_breakpoints(out, {});
}

int forcing_degree_bound(const Kernel& kernel, const History& phi) {
    int deg = 0;
    for (const auto& pc : phi.pieces.pieces()) deg = std::max(deg, pc.poly.degree());
    if (kernel.eta().has_density())
        for (const auto& pc : kernel.eta().density().pieces())
            deg += pc.poly.degree();  // product with phi raises the degree once
    return deg + 2;                   // one integration + slack
}

PiecewisePoly fit_windows(const std::function<Vector(double)>& fn, double lo, double hi,
                          const std::vector<double>& inner_edges, int deg, int n) {
    std::vector<double> edges = inner_edges;
    edges.insert(edges.begin(), lo);
    edges.push_back(hi);
    std::vector<PiecewisePoly::Piece> pieces;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        if (!(b - a > kEdgeTol)) continue;
        MatPoly p = fit_polynomial(fn, a, b, deg);
        // The sampled function is polynomial on the window, so the fit must
        // reproduce an independent interior sample.
        const double probe = a + 0.37 * (b - a);
        const Vector ref = fn(probe);
        if ((p(probe).col(0) - ref).norm() > 1e-7 * (1.0 + ref.norm()))
            throw std::logic_error("build_forcing: window fit failed validation");
        pieces.push_back({a, b, std::move(p)});
    }
    if (pieces.empty())
        pieces.push_back({lo, hi, MatPoly::zero(n, 1)});
    return PiecewisePoly(lo, hi, std::move(pieces));
}

}  // namespace

ForcingSet build_forcing(const Kernel& kernel, const History& phi) {
    phi.validate();
    const double r = kernel.r();
    const std::vector<double> edges = forcing_windows(kernel, phi);
    const int deg = forcing_degree_bound(kernel, phi);

    auto f_interior = [&](double t) -> Vector {
        try {
            return as_vector(rs_integral(kernel.eta(), shifted_class(phi, t), -r, -t));
        } catch (const SharedDiscontinuityError&) {
            // Interior samples cannot sit on induced breakpoints except by a
            // freak collision; nudge off it.
            return as_vector(rs_integral(kernel.eta(), shifted_class(phi, t + 1e-11), -r,
                                         -(t + 1e-11)));
        }
    };
    ForcingSet out{
        fit_windows(f_interior, 0.0, r, edges, deg, kernel.n()),
        fit_windows([&](double t) { return G_forcing(kernel, phi, t); }, 0.0, r, edges, deg + 1,
                    kernel.n()),
        edges};
    return out;
}

ForcingFunction make_forcing_function(const Kernel& kernel, const History& phi) {
    ForcingSet fs = build_forcing(kernel, phi);
    const double r = kernel.r();
    auto profile = std::make_shared<PiecewisePoly>(std::move(fs.profile));
    ForcingFunction out;
    out.n = kernel.n();
    out.breakpoints = fs.breakpoints;
    out.breakpoints.push_back(r);
    out.eval = [profile, r, n = kernel.n()](double t, Side side) -> Vector {
        if (t > r + kEdgeTol || (t >= r - kEdgeTol && side != Side::Left))
            return Vector::Zero(n);
        return profile->value(std::min(t, r), side).col(0);
    };
    return out;
}

ForcingFunction zero_forcing(int n) {
    ForcingFunction out;
    out.n = n;
    out.eval = [n](double, Side) { return Vector::Zero(n); };
    return out;
}

History mollify_history(const History& phi, double eps) {
    phi.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("mollify_history: eps must be positive");
    double min_width = phi.r;
    for (const auto& pc : phi.pieces.pieces()) min_width = std::min(min_width, pc.hi - pc.lo);
    if (2.0 * eps > min_width + kEdgeTol)
        throw std::invalid_argument("mollify_history: eps too large for the piece structure");

    std::vector<std::pair<double, double>> zones;  // ramp intervals
    std::vector<std::pair<Vector, Vector>> ends;   // ramp endpoint values
    for (double b : phi.pieces.jump_points(1e-12)) {
        zones.push_back({b - eps, b + eps});
        ends.push_back({phi.pieces.value(b - eps).col(0), phi.pieces.value(b + eps).col(0)});
    }
    const Vector left_of_zero = phi.pieces.value(0.0, Side::Left).col(0);
    if ((left_of_zero - phi.value_at_zero).norm() > 1e-12) {
        zones.push_back({-eps, 0.0});
        ends.push_back({phi.pieces.value(-eps).col(0), phi.value_at_zero});
    }

    std::vector<PiecewisePoly::Piece> pieces;
    for (const auto& pc : phi.pieces.pieces()) {
        // Subtract every zone from this piece.
        std::vector<std::pair<double, double>> keep{{pc.lo, pc.hi}};
        for (const auto& z : zones) {
            std::vector<std::pair<double, double>> next;
            for (const auto& k : keep) {
                if (z.second <= k.first + kEdgeTol || z.first >= k.second - kEdgeTol) {
                    next.push_back(k);
                    continue;
                }
                if (z.first > k.first + kEdgeTol) next.push_back({k.first, z.first});
                if (z.second < k.second - kEdgeTol) next.push_back({z.second, k.second});
            }
            keep = std::move(next);
        }
        for (const auto& k : keep) pieces.push_back({k.first, k.second, pc.poly});
    }
    for (std::size_t i = 0; i < zones.size(); ++i) {
        const auto [a, b] = zones[i];
        const Vector v0 = ends[i].first, v1 = ends[i].second;
        const Vector slope = (v1 - v0) / (b - a);
        pieces.push_back({a, b, MatPoly({Matrix(v0 - slope * a), Matrix(slope)})});
    }
    History out;
    out.r = phi.r;
    out.pieces = PiecewisePoly(-phi.r, 0.0, std::move(pieces));
    out.value_at_zero = phi.value_at_zero;
    out.p = phi.p;
    return out;
}

CheckResult check_lp_bound(const Kernel& kernel, const History& phi, double p) {
    if (!(p >= 1.0) || std::isinf(p))
        throw std::invalid_argument("check_lp_bound: p must be in [1, infinity)");
    if (!phi.is_continuous())
        throw std::invalid_argument("check_lp_bound: continuous history required");
    const ForcingSet fs = build_forcing(kernel, phi);
    const double lhs = fs.profile.lp_norm(p);
    const double rhs = kernel.variation() * lp_norm(phi, p);
    return CheckResult{lhs, rhs, 1e-9 * (1.0 + rhs)};
}

ForcingReport forcing_report(const Kernel& kernel, const History& phi, double t_max, int samples) {
    if (samples < 2) throw std::invalid_argument("forcing_report: need at least two samples");
    ForcingReport rep;
    const double r = kernel.r();
    const Vector G_r = G_forcing(kernel, phi, r);
    for (int k = 0; k < samples; ++k) {
        const double t = t_max * static_cast<double>(k) / (samples - 1);
        rep.grid.push_back(t);
        rep.g_values.push_back(g_forcing(kernel, phi, t));
        rep.G_values.push_back(G_forcing(kernel, phi, t));
        const auto fv = f_forcing(kernel, phi, t);
        rep.f_values.push_back(fv ? *fv : f_forcing_sided(kernel, phi, std::min(t, r), Side::Right));
        // The vanishing claims hold on [r, infinity); a sample a rounding
        // error below r legitimately sees the left limit.
        if (t >= r) {
            rep.tail_max_g = std::max(rep.tail_max_g, rep.g_values.back().norm());
            rep.tail_max_f = std::max(rep.tail_max_f, rep.f_values.back().norm());
            rep.constancy_defect =
                std::max(rep.constancy_defect, (rep.G_values.back() - G_r).norm());
        }
    }
    for (double tau : kernel.atom_delays())
        if (tau > kEdgeTol && tau <= r + kEdgeTol) rep.coincidences.push_back(tau);
    return rep;
}

}  // namespace rfde
