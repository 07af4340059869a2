#include "rfde/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfde/quadrature.hpp"

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;
}

PiecewisePoly::PiecewisePoly(double lo, double hi, std::vector<Piece> pieces,
                             std::vector<PointValue> point_values)
    : lo_(lo), hi_(hi), pieces_(std::move(pieces)), point_values_(std::move(point_values)) {
    if (!(hi_ > lo_)) throw std::invalid_argument("PiecewisePoly: empty domain");
    if (pieces_.empty()) throw std::invalid_argument("PiecewisePoly: no pieces");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    if (std::abs(pieces_.front().lo - lo_) > kEdgeTol || std::abs(pieces_.back().hi - hi_) > kEdgeTol)
        throw std::invalid_argument("PiecewisePoly: pieces do not cover the domain");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
        if (std::abs(pieces_[i].hi - pieces_[i + 1].lo) > kEdgeTol)
            throw std::invalid_argument("PiecewisePoly: pieces overlap or leave a gap");
    rows_ = pieces_[0].poly.rows();
    cols_ = pieces_[0].poly.cols();
    for (const Piece& p : pieces_)
        if (p.poly.rows() != rows_ || p.poly.cols() != cols_)
            throw std::invalid_argument("PiecewisePoly: piece shape mismatch");
    for (const PointValue& pv : point_values_)
        if (pv.v.rows() != rows_ || pv.v.cols() != cols_)
            throw std::invalid_argument("PiecewisePoly: point value shape mismatch");
    std::sort(point_values_.begin(), point_values_.end(),
              [](const PointValue& a, const PointValue& b) { return a.t < b.t; });
    // Snap piece edges exactly together.
    pieces_.front().lo = lo_;
    pieces_.back().hi = hi_;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) pieces_[i + 1].lo = pieces_[i].hi;
}

PiecewisePoly PiecewisePoly::constant(double lo, double hi, const Matrix& v) {
    return PiecewisePoly(lo, hi, {Piece{lo, hi, MatPoly::constant(v)}});
}

PiecewisePoly PiecewisePoly::single(double lo, double hi, MatPoly p) {
    return PiecewisePoly(lo, hi, {Piece{lo, hi, std::move(p)}});
}

PiecewisePoly PiecewisePoly::zero(double lo, double hi, int rows, int cols) {
    return constant(lo, hi, Matrix::Zero(rows, cols));
}

int PiecewisePoly::piece_index(double t, Side side) const {
    if (t < lo_ - kEdgeTol || t > hi_ + kEdgeTol)
        throw std::out_of_range("PiecewisePoly: evaluation outside the domain");
    const double tc = std::clamp(t, lo_, hi_);
    // First piece whose hi >= t.
    int idx = 0;
    int lo = 0, hi = static_cast<int>(pieces_.size()) - 1;
    while (lo <= hi) {
        const int mid = (lo + hi) / 2;
        if (pieces_[static_cast<std::size_t>(mid)].hi < tc) {
            lo = mid + 1;
        } else {
            idx = mid;
            hi = mid - 1;
        }
    }
    const auto& pc = pieces_[static_cast<std::size_t>(idx)];
    // At an interior edge: Side::Right selects the following piece; AE and
    // Left keep the piece that ends here (left-limit convention).
    if (side == Side::Right && std::abs(tc - pc.hi) <= kEdgeTol &&
        idx + 1 < static_cast<int>(pieces_.size()))
        return idx + 1;
    if ((side == Side::AE || side == Side::Left) && std::abs(tc - pc.lo) <= kEdgeTol && idx > 0)
        return idx - 1;
    return idx;
}

Matrix PiecewisePoly::value(double t, Side side) const {
    if (side == Side::AE) {
        if (auto pv = point_value_at(t)) return *pv;
    }
    const auto& pc = pieces_[static_cast<std::size_t>(piece_index(t, side))];
    return pc.poly(std::clamp(t, lo_, hi_));
}

std::optional<Matrix> PiecewisePoly::point_value_at(double t) const {
    for (const PointValue& pv : point_values_)
        if (std::abs(pv.t - t) <= kEdgeTol) return pv.v;
    return std::nullopt;
}

std::vector<double> PiecewisePoly::breakpoints() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi);
    return out;
}

bool PiecewisePoly::has_jump_at(double t, double tol) const {
    if (t <= lo_ + kEdgeTol || t >= hi_ - kEdgeTol) return false;
    return !approx_equal(value(t, Side::Left), value(t, Side::Right), tol);
}

std::vector<double> PiecewisePoly::jump_points(double tol) const {
    std::vector<double> out;
    for (double b : breakpoints())
        if (has_jump_at(b, tol)) out.push_back(b);
    return out;
}

PiecewisePoly PiecewisePoly::restrict_to(double a, double b) const {
    if (a < lo_ - kEdgeTol || b > hi_ + kEdgeTol || !(b > a))
        throw std::invalid_argument("PiecewisePoly: bad restriction interval");
    std::vector<Piece> out;
    for (const Piece& p : pieces_) {
        const double lo = std::max(p.lo, a), hi = std::min(p.hi, b);
        if (hi - lo > kEdgeTol) out.push_back(Piece{lo, hi, p.poly});
    }
    std::vector<PointValue> pvs;
    for (const PointValue& pv : point_values_)
        if (pv.t >= a - kEdgeTol && pv.t <= b + kEdgeTol) pvs.push_back(pv);
    return PiecewisePoly(a, b, std::move(out), std::move(pvs));
}

PiecewisePoly PiecewisePoly::compose_affine_arg(double c0, double c1) const {
    if (c1 == 0.0) throw std::invalid_argument("PiecewisePoly: degenerate affine reparametrization");
    auto map_back = [&](double t) { return (t - c0) / c1; };
    std::vector<Piece> out;
    for (const Piece& p : pieces_) {
        double a = map_back(p.lo), b = map_back(p.hi);
        if (a > b) std::swap(a, b);
        out.push_back(Piece{a, b, p.poly.compose_affine(c0, c1)});
    }
    std::vector<PointValue> pvs;
    for (const PointValue& pv : point_values_) pvs.push_back(PointValue{map_back(pv.t), pv.v});
    double a = map_back(lo_), b = map_back(hi_);
    if (a > b) std::swap(a, b);
    return PiecewisePoly(a, b, std::move(out), std::move(pvs));
}

PiecewisePoly PiecewisePoly::antiderivative() const {
    std::vector<Piece> out;
    Matrix offset = Matrix::Zero(rows_, cols_);
    for (const Piece& p : pieces_) {
        MatPoly F = p.poly.antiderivative();
        // Shift so the antiderivative is continuous and vanishes at lo_.
        const Matrix shift = offset - F(p.lo);
        F = F + MatPoly::constant(shift);
        offset = F(p.hi);
        out.push_back(Piece{p.lo, p.hi, std::move(F)});
    }
    return PiecewisePoly(lo_, hi_, std::move(out));
}

Matrix PiecewisePoly::integrate(double a, double b) const {
    if (!(b >= a)) throw std::invalid_argument("PiecewisePoly: inverted integration range");
    Matrix sum = Matrix::Zero(rows_, cols_);
    if (b - a <= 0.0) return sum;
    for (const Piece& p : pieces_) {
        const double lo = std::max(p.lo, a), hi = std::min(p.hi, b);
        if (hi > lo) sum += p.poly.integrate(lo, hi);
    }
    return sum;
}

namespace {

std::vector<double> merged_edges(const PiecewisePoly& a, const PiecewisePoly& b) {
    std::vector<double> edges = merge_breakpoints(a.breakpoints(), b.breakpoints());
    edges.insert(edges.begin(), a.lo());
    edges.push_back(a.hi());
    return edges;
}

}  // namespace

PiecewisePoly PiecewisePoly::matmul(const PiecewisePoly& rhs) const {
    if (std::abs(lo_ - rhs.lo()) > kEdgeTol || std::abs(hi_ - rhs.hi()) > kEdgeTol)
        throw std::invalid_argument("PiecewisePoly: matmul domain mismatch");
    const auto edges = merged_edges(*this, rhs);
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        if (hi - lo <= kEdgeTol) continue;
        const double mid = 0.5 * (lo + hi);
        const auto& pl = pieces_[static_cast<std::size_t>(piece_index(mid))];
        const auto& pr = rhs.pieces()[static_cast<std::size_t>(rhs.piece_index(mid))];
        out.push_back(Piece{lo, hi, pl.poly * pr.poly});
    }
    return PiecewisePoly(lo_, hi_, std::move(out));
}

PiecewisePoly PiecewisePoly::operator+(const PiecewisePoly& rhs) const {
    if (std::abs(lo_ - rhs.lo()) > kEdgeTol || std::abs(hi_ - rhs.hi()) > kEdgeTol)
        throw std::invalid_argument("PiecewisePoly: sum domain mismatch");
    const auto edges = merged_edges(*this, rhs);
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        if (hi - lo <= kEdgeTol) continue;
        const double mid = 0.5 * (lo + hi);
        const auto& pl = pieces_[static_cast<std::size_t>(piece_index(mid))];
        const auto& pr = rhs.pieces()[static_cast<std::size_t>(rhs.piece_index(mid))];
        out.push_back(Piece{lo, hi, pl.poly + pr.poly});
    }
    return PiecewisePoly(lo_, hi_, std::move(out));
}

PiecewisePoly PiecewisePoly::operator-(const PiecewisePoly& rhs) const {
    return (*this) + rhs * -1.0;
}

PiecewisePoly PiecewisePoly::operator*(double s) const {
    std::vector<Piece> out = pieces_;
    for (Piece& p : out) p.poly = p.poly * s;
    std::vector<PointValue> pvs = point_values_;
    for (PointValue& pv : pvs) pv.v *= s;
    return PiecewisePoly(lo_, hi_, std::move(out), std::move(pvs));
}

double PiecewisePoly::lp_norm(double p) const {
    if (std::isinf(p)) return sup_norm();
    if (!(p >= 1.0)) throw std::invalid_argument("PiecewisePoly: p must be in [1, inf]");
    const bool integer_p = std::abs(p - std::round(p)) < 1e-12;
    const int ip = static_cast<int>(std::round(p));

    double total = 0.0;
    for (const Piece& pc : pieces_) {
        if (rows_ == 1 && cols_ == 1 && integer_p) {
            // |q|^p integrated exactly: split at sign changes.
            const Poly q = pc.poly.entry(0, 0);
            std::vector<double> cuts = sign_change_roots(q, pc.lo, pc.hi);
            cuts.insert(cuts.begin(), pc.lo);
            cuts.push_back(pc.hi);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                Poly pw = Poly::constant(1.0);
                for (int k = 0; k < ip; ++k) pw = pw * q;
                total += std::abs(pw.integrate(cuts[i], cuts[i + 1]));
            }
        } else if (integer_p && ip % 2 == 0) {
            // (|q|_F^2)^(p/2) is a polynomial.
            const Poly f2 = pc.poly.frobenius_squared();
            Poly pw = Poly::constant(1.0);
            for (int k = 0; k < ip / 2; ++k) pw = pw * f2;
            total += pw.integrate(pc.lo, pc.hi);
        } else {
            const Poly f2 = pc.poly.frobenius_squared();
            total += gauss_integrate(
                [&](double t) { return std::pow(std::max(f2(t), 0.0), 0.5 * p); }, pc.lo, pc.hi,
                sign_change_roots(f2, pc.lo, pc.hi), 24);
        }
    }
    return std::pow(total, 1.0 / p);
}

double PiecewisePoly::sup_norm() const {
    double m = 0.0;
    for (const Piece& pc : pieces_) {
        const Poly f2 = pc.poly.frobenius_squared();
        m = std::max(m, poly_sup_abs(f2, pc.lo, pc.hi));
    }
    return std::sqrt(m);
}

std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b,
                                      double tol) {
    std::vector<double> all = a;
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double t : all)
        if (out.empty() || t - out.back() > tol) out.push_back(t);
    return out;
}

}  // namespace rfde
