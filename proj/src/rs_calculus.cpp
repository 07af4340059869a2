#include "rfde/rs_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "rfde/quadrature.hpp"

namespace rfde {

namespace {

constexpr double kEdgeTol = 1e-12;

// Result shape of d(alpha) acting on f values.
std::pair<int, int> product_shape(const BVFunction& a, int f_rows, int f_cols) {
    if (a.rows() == 1 && a.cols() == 1) return {f_rows, f_cols};
    if (a.cols() != f_rows) throw std::invalid_argument("rs_integral: shape mismatch");
    return {a.rows(), f_cols};
}

Matrix apply_jump(const Matrix& jump, const Matrix& fval) {
    if (jump.rows() == 1 && jump.cols() == 1) return jump(0, 0) * fval;
    return jump * fval;
}

// Atom inclusion for the range [c, d] inside alpha's domain: (c, d], plus an
// atom at the left endpoint of the *domain* when c == lo and the range has
// positive length.
bool atom_included(double loc, double c, double d, double domain_lo) {
    if (loc > c + kEdgeTol && loc <= d + kEdgeTol) return true;
    if (std::abs(loc - c) <= kEdgeTol && std::abs(c - domain_lo) <= kEdgeTol && d > c) return true;
    return false;
}

// Integrand value at an atom of the integrator. A point value of f wins when
// present; a genuine jump without one has no Riemann–Stieltjes limit.
Matrix integrand_at_atom(const PiecewisePoly& f, double loc, std::vector<double>* coincidences) {
    const auto pv = f.point_value_at(loc);
    const bool jump = f.has_jump_at(loc);
    if (pv) {
        if (coincidences && (jump || !approx_equal(*pv, f.value(loc, Side::Left), 1e-10)))
            coincidences->push_back(loc);
        return *pv;
    }
    if (jump) throw SharedDiscontinuityError(loc);
    return f.value(loc);
}

void check_range(const BVFunction& alpha, double c, double d) {
    if (c < alpha.lo() - kEdgeTol || d > alpha.hi() + kEdgeTol || d < c - kEdgeTol)
        throw std::invalid_argument("rs_integral: range outside the integrator domain");
}

}  // namespace

Matrix rs_integral(const BVFunction& alpha, const PiecewisePoly& f, double c, double d,
                   std::vector<double>* coincidences) {
    check_range(alpha, c, d);
    const auto [rr, rc] = product_shape(alpha, f.rows(), f.cols());
    Matrix sum = Matrix::Zero(rr, rc);
    if (!(d > c)) return sum;

    for (const auto& atom : alpha.atoms())
        if (atom_included(atom.loc, c, d, alpha.lo()))
            sum += apply_jump(atom.jump, integrand_at_atom(f, atom.loc, coincidences));

    if (alpha.has_density()) {
        if (!alpha.density_is_norm()) {
            for (const auto& dp : alpha.density().pieces()) {
                const double lo = std::max(dp.lo, c), hi = std::min(dp.hi, d);
                if (!(hi > lo)) continue;
                for (const auto& fp : f.pieces()) {
                    const double l2 = std::max(lo, fp.lo), h2 = std::min(hi, fp.hi);
                    if (!(h2 > l2)) continue;
                    if (alpha.rows() == 1 && alpha.cols() == 1)
                        sum += fp.poly.scale_by(dp.poly.entry(0, 0)).integrate(l2, h2);
                    else
                        sum += (dp.poly * fp.poly).integrate(l2, h2);
                }
            }
        } else {
            // Norm-wrapped density: quadrature on f's breakpoints.
            gauss_composite(
                [&](double t) -> Matrix { return alpha.density_value(t)(0, 0) * f.value(t); }, c, d,
                merge_breakpoints(alpha.density().breakpoints(), f.breakpoints()), 24,
                [&](double w, const Matrix& v) { sum += w * v; });
        }
    }
    return sum;
}

Matrix rs_integral(const BVFunction& alpha, const std::function<Matrix(double)>& f, double c,
                   double d, const QuadOptions& opt) {
    check_range(alpha, c, d);
    Matrix sum;
    bool have_shape = false;
    auto add = [&](const Matrix& m) {
        if (!have_shape) {
            sum = m;
            have_shape = true;
        } else {
            sum += m;
        }
    };

    if (d > c) {
        for (const auto& atom : alpha.atoms())
            if (atom_included(atom.loc, c, d, alpha.lo())) add(apply_jump(atom.jump, f(atom.loc)));

        if (alpha.has_density()) {
            std::vector<double> splits = opt.extra_splits;
            const auto edges = alpha.density().breakpoints();
            splits.insert(splits.end(), edges.begin(), edges.end());
            gauss_composite(
                [&](double t) -> Matrix {
                    const Matrix dv = alpha.density_value(t);
                    if (dv.rows() == 1 && dv.cols() == 1) return dv(0, 0) * f(t);
                    return dv * f(t);
                },
                c, d, splits, opt.order, [&](double w, const Matrix& v) {
                    if (!have_shape) {
                        sum = w * v;
                        have_shape = true;
                    } else {
                        sum += w * v;
                    }
                });
        }
    }
    if (!have_shape) {
        const Matrix probe = f(0.5 * (std::max(alpha.lo(), c) + std::min(alpha.hi(), d)));
        const auto [rr, rc] = product_shape(alpha, static_cast<int>(probe.rows()),
                                            static_cast<int>(probe.cols()));
        return Matrix::Zero(rr, rc);
    }
    return sum;
}

Matrix rs_convolution(const BVFunction& alpha, const PiecewisePoly& f, double t) {
    if (std::abs(alpha.lo()) > kEdgeTol)
        throw std::invalid_argument("rs_convolution: integrator must live on [0, R]");
    if (t < f.lo() - kEdgeTol || t > f.hi() + kEdgeTol)
        throw std::out_of_range("rs_convolution: t outside the domain of f");
    const auto [rr, rc] = product_shape(alpha, f.rows(), f.cols());
    Matrix sum = Matrix::Zero(rr, rc);

    for (const auto& atom : alpha.atoms())
        if (atom.loc <= t + kEdgeTol)
            sum += apply_jump(atom.jump, integrand_at_atom(f, t - std::min(atom.loc, t), nullptr));

    if (alpha.has_density() && t > kEdgeTol) {
        const PiecewisePoly rev = f.compose_affine_arg(t, -1.0);  // rev(u) = f(t - u)
        const double hi = std::min(t, alpha.hi());
        for (const auto& dp : alpha.density().pieces()) {
            const double lo = std::max(dp.lo, 0.0), h1 = std::min(dp.hi, hi);
            if (!(h1 > lo)) continue;
            for (const auto& fp : rev.pieces()) {
                const double l2 = std::max(lo, fp.lo), h2 = std::min(h1, fp.hi);
                if (!(h2 > l2)) continue;
                if (alpha.rows() == 1 && alpha.cols() == 1)
                    sum += fp.poly.scale_by(dp.poly.entry(0, 0)).integrate(l2, h2);
                else
                    sum += (dp.poly * fp.poly).integrate(l2, h2);
            }
        }
    }
    return sum;
}

Matrix rs_convolution(const BVFunction& alpha, const std::function<Matrix(double)>& f, double t,
                      const QuadOptions& opt) {
    if (std::abs(alpha.lo()) > kEdgeTol)
        throw std::invalid_argument("rs_convolution: integrator must live on [0, R]");
    Matrix sum;
    bool have_shape = false;
    for (const auto& atom : alpha.atoms())
        if (atom.loc <= t + kEdgeTol) {
            const Matrix v = apply_jump(atom.jump, f(t - std::min(atom.loc, t)));
            if (!have_shape) {
                sum = v;
                have_shape = true;
            } else {
                sum += v;
            }
        }
    if (alpha.has_density() && t > kEdgeTol) {
        std::vector<double> splits = opt.extra_splits;
        const auto edges = alpha.density().breakpoints();
        splits.insert(splits.end(), edges.begin(), edges.end());
        gauss_composite(
            [&](double u) -> Matrix {
                const Matrix dv = alpha.density_value(u);
                if (dv.rows() == 1 && dv.cols() == 1) return dv(0, 0) * f(t - u);
                return dv * f(t - u);
            },
            0.0, std::min(t, alpha.hi()), splits, opt.order, [&](double w, const Matrix& v) {
                if (!have_shape) {
                    sum = w * v;
                    have_shape = true;
                } else {
                    sum += w * v;
                }
            });
    }
    if (!have_shape) return Matrix::Zero(alpha.rows(), alpha.cols());
    return sum;
}

PiecewisePoly volterra(const PiecewisePoly& h) {
    if (std::abs(h.lo()) > kEdgeTol)
        throw std::invalid_argument("volterra: function must live on [0, T]");
    return h.antiderivative();
}

Trajectory volterra(const Trajectory& x) {
    x.validate();
    const PiecewisePoly anti = x.interpolant().antiderivative();
    Trajectory out;
    out.grid = x.grid;
    out.breakpoints = x.breakpoints;
    out.interp_order = x.interp_order;
    for (double t : x.grid) out.values.push_back(anti.value(t));
    return out;
}

double BiPoly::operator()(double x, double y) const { return at_x(x)(y); }

Poly BiPoly::at_x(double x) const {
    std::vector<double> cy(static_cast<std::size_t>(c_.cols()), 0.0);
    double xp = 1.0;
    for (int i = 0; i < c_.rows(); ++i) {
        for (int j = 0; j < c_.cols(); ++j) cy[static_cast<std::size_t>(j)] += c_(i, j) * xp;
        xp *= x;
    }
    return Poly(std::move(cy));
}

Poly BiPoly::at_y(double y) const {
    std::vector<double> cx(static_cast<std::size_t>(c_.rows()), 0.0);
    double yp = 1.0;
    for (int j = 0; j < c_.cols(); ++j) {
        for (int i = 0; i < c_.rows(); ++i) cx[static_cast<std::size_t>(i)] += c_(i, j) * yp;
        yp *= y;
    }
    return Poly(std::move(cx));
}

BiPoly BiPoly::square() const {
    const int nr = static_cast<int>(c_.rows()), nc = static_cast<int>(c_.cols());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * nr - 1, 2 * nc - 1);
    for (int i1 = 0; i1 < nr; ++i1)
        for (int j1 = 0; j1 < nc; ++j1)
            for (int i2 = 0; i2 < nr; ++i2)
                for (int j2 = 0; j2 < nc; ++j2) out(i1 + i2, j1 + j2) += c_(i1, j1) * c_(i2, j2);
    return BiPoly(std::move(out));
}

namespace {

void require_scalar(const BVFunction& a, const char* who) {
    if (a.rows() != 1 || a.cols() != 1) throw std::invalid_argument(std::string(who) + ": scalar integrator required");
}

// Polynomial in y obtained by integrating f(x, y) d(alpha)(x) over alpha's
// full domain; exact.
Poly inner_against(const BiPoly& f, const BVFunction& alpha) {
    const int ny = static_cast<int>(f.coef().cols());
    std::vector<double> cy(static_cast<std::size_t>(ny), 0.0);
    for (const auto& atom : alpha.atoms()) {
        const Poly fy = f.at_x(atom.loc);
        for (int j = 0; j <= fy.degree(); ++j) cy[static_cast<std::size_t>(j)] += atom.jump(0, 0) * fy.coef()[static_cast<std::size_t>(j)];
    }
    if (alpha.has_density()) {
        for (const auto& dp : alpha.density().pieces()) {
            const Poly dens = dp.poly.entry(0, 0);
            // Moments m_i = int dens(x) x^i dx over the piece.
            std::vector<double> m(static_cast<std::size_t>(f.coef().rows()), 0.0);
            Poly xpow = Poly::constant(1.0);
            for (int i = 0; i < f.coef().rows(); ++i) {
                m[static_cast<std::size_t>(i)] = (dens * xpow).integrate(dp.lo, dp.hi);
                xpow = xpow * Poly({0.0, 1.0});
            }
            for (int i = 0; i < f.coef().rows(); ++i)
                for (int j = 0; j < ny; ++j)
                    cy[static_cast<std::size_t>(j)] += f.coef()(i, j) * m[static_cast<std::size_t>(i)];
        }
    }
    return Poly(std::move(cy));
}

double stieltjes_of_poly(const BVFunction& beta, const Poly& q) {
    const PiecewisePoly qp = PiecewisePoly::single(beta.lo(), beta.hi(), MatPoly(q));
    return rs_integral(beta, qp, beta.lo(), beta.hi())(0, 0);
}

// int |q(y)|^p d(beta)(y) over beta's full domain for monotone beta.
double stieltjes_abs_pow(const BVFunction& beta, const Poly& q, double p) {
    double sum = 0.0;
    for (const auto& atom : beta.atoms())
        sum += atom.jump(0, 0) * std::pow(std::abs(q(atom.loc)), p);
    // Left-endpoint atom mass is part of the closed-interval measure and the
    // loop above already counts it; nothing else to do here.
    if (beta.has_density()) {
        const bool int_p = std::abs(p - std::round(p)) < 1e-12;
        const int ip = static_cast<int>(std::round(p));
        for (const auto& dp : beta.density().pieces()) {
            const Poly dens = dp.poly.entry(0, 0);
            std::vector<double> cuts = sign_change_roots(q, dp.lo, dp.hi);
            cuts.insert(cuts.begin(), dp.lo);
            cuts.push_back(dp.hi);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double lo = cuts[i], hi = cuts[i + 1];
                if (int_p) {
                    const double mid = 0.5 * (lo + hi);
                    Poly s = q(mid) < 0.0 ? -q : q;
                    Poly pw = Poly::constant(1.0);
                    for (int k = 0; k < ip; ++k) pw = pw * s;
                    sum += (pw * dens).integrate(lo, hi);
                } else {
                    sum += gauss_integrate(
                        [&](double y) { return std::pow(std::abs(q(y)), p) * dens(y); }, lo, hi, {},
                        24);
                }
            }
        }
    }
    return sum;
}

void require_monotone(const BVFunction& a, const char* who) {
    require_scalar(a, who);
    for (const auto& atom : a.atoms())
        if (atom.jump(0, 0) < -1e-12)
            throw std::invalid_argument(std::string(who) + ": negative jump in a monotone integrator");
    if (a.has_density() && !a.density_is_norm()) {
        for (const auto& dp : a.density().pieces()) {
            const Poly q = dp.poly.entry(0, 0);
            std::vector<double> cuts = sign_change_roots(q, dp.lo, dp.hi);
            cuts.insert(cuts.begin(), dp.lo);
            cuts.push_back(dp.hi);
            for (double c : cuts)
                if (q(c) < -1e-9)
                    throw std::invalid_argument(std::string(who) + ": negative density in a monotone integrator");
        }
    }
}

}  // namespace

CheckResult check_sharp_estimate(const BVFunction& alpha, const PiecewisePoly& f) {
    const double lhs = op_norm(rs_integral(alpha, f, alpha.lo(), alpha.hi()));
    const BVFunction V = alpha.variation_function();

    // Splits for |f|: breakpoints, plus sign-change roots for scalar f so the
    // quadrature is exact piecewise.
    std::vector<double> splits = f.breakpoints();
    if (f.rows() == 1 && f.cols() == 1)
        for (const auto& fp : f.pieces()) {
            const auto roots = sign_change_roots(fp.poly.entry(0, 0), fp.lo, fp.hi);
            splits.insert(splits.end(), roots.begin(), roots.end());
        }
    QuadOptions opt;
    opt.order = 24;
    opt.extra_splits = std::move(splits);
    const double rhs =
        rs_integral(V, [&](double t) { return Matrix::Constant(1, 1, op_norm(f.value(t))); },
                    V.lo(), V.hi(), opt)(0, 0);
    return CheckResult{lhs, rhs, 1e-9 * (1.0 + std::abs(rhs))};
}

CheckResult check_fubini(const BiPoly& f, const BVFunction& alpha, const BVFunction& beta) {
    require_scalar(alpha, "check_fubini");
    require_scalar(beta, "check_fubini");
    // d(alpha) first, then d(beta):
    const double lhs = stieltjes_of_poly(beta, inner_against(f, alpha));
    // d(beta) first, then d(alpha): swap the roles by transposing coefficients.
    const BiPoly ft(f.coef().transpose());
    const double rhs = stieltjes_of_poly(alpha, inner_against(ft, beta));
    return CheckResult{lhs, rhs, 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs))};
}

CheckResult check_minkowski(const BiPoly& f, const BVFunction& alpha, const BVFunction& beta,
                            double p) {
    require_monotone(alpha, "check_minkowski");
    require_monotone(beta, "check_minkowski");
    if (!(p >= 1.0)) throw std::invalid_argument("check_minkowski: p must be >= 1");

    const Poly inner = inner_against(f, alpha);  // int f(x, y) d(alpha)(x), poly in y
    const double lhs = std::pow(std::max(stieltjes_abs_pow(beta, inner, p), 0.0), 1.0 / p);

    auto inner_p = [&](double x) { return std::pow(std::max(stieltjes_abs_pow(beta, f.at_x(x), p), 0.0), 1.0 / p); };
    double rhs = 0.0;
    for (const auto& atom : alpha.atoms()) rhs += atom.jump(0, 0) * inner_p(atom.loc);
    if (alpha.has_density())
        for (const auto& dp : alpha.density().pieces()) {
            const Poly dens = dp.poly.entry(0, 0);
            rhs += gauss_integrate([&](double x) { return dens(x) * inner_p(x); }, dp.lo, dp.hi, {},
                                   24);
        }
    return CheckResult{lhs, rhs, 1e-9 * (1.0 + std::abs(rhs))};
}

CheckResult check_shifted_fubini(const PiecewisePoly& f, const BVFunction& alpha,
                                 const PiecewisePoly& g) {
    require_scalar(alpha, "check_shifted_fubini");
    if (f.rows() != 1 || f.cols() != 1 || g.rows() != 1 || g.cols() != 1)
        throw std::invalid_argument("check_shifted_fubini: scalar f and g required");
    const double r = g.hi();
    if (std::abs(f.lo() + r) > 1e-9 || std::abs(f.hi()) > 1e-9 || std::abs(g.lo()) > 1e-9 ||
        std::abs(alpha.lo() + r) > 1e-9 || std::abs(alpha.hi()) > 1e-9)
        throw std::invalid_argument("check_shifted_fubini: domains must be [-r, 0] and [0, r]");

    // Locations where either integrand changes its polynomial description.
    std::vector<double> feat;  // features of alpha in theta
    for (double a : alpha.atom_locations()) feat.push_back(a);
    if (alpha.has_density()) {
        feat.push_back(alpha.density().lo());
        feat.push_back(alpha.density().hi());
        for (double e : alpha.density().breakpoints()) feat.push_back(e);
    }
    std::vector<double> fb = f.breakpoints();
    fb.push_back(f.lo());
    fb.push_back(f.hi());

    std::vector<double> splits_t = g.breakpoints();
    for (double e : feat) splits_t.push_back(-e);
    for (double b : fb)
        for (double e : feat) splits_t.push_back(b - e);

    const double lhs = gauss_integrate(
        [&](double t) {
            const PiecewisePoly ft = f.shifted_arg(t);  // ft(theta) = f(t + theta)
            return rs_integral(alpha, ft, -r, -t)(0, 0) * g.scalar(t);
        },
        0.0, r, splits_t, 12);

    std::vector<double> splits_th;
    const auto gb = [&]() {
        std::vector<double> v = g.breakpoints();
        v.push_back(0.0);
        v.push_back(r);
        return v;
    }();
    for (double b : fb) splits_th.push_back(b);
    for (double bg : gb) splits_th.push_back(-bg);
    for (double b : fb)
        for (double bg : gb) splits_th.push_back(b - bg);

    auto H = [&](double theta) -> Matrix {
        if (-theta < 1e-10) return Matrix::Zero(1, 1);
        const PiecewisePoly fth = f.shifted_arg(theta).restrict_to(0.0, -theta);
        const PiecewisePoly gth = g.restrict_to(0.0, -theta);
        return fth.matmul(gth).integrate(0.0, -theta);
    };
    QuadOptions opt;
    opt.order = 12;
    opt.extra_splits = std::move(splits_th);
    const double rhs = rs_integral(alpha, H, -r, 0.0, opt)(0, 0);
    return CheckResult{lhs, rhs, 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs))};
}

}  // namespace rfde
