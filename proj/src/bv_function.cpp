#include "rfde/bv_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfde/quadrature.hpp"

namespace rfde {

namespace {
constexpr double kEdgeTol = 1e-12;
}

BVFunction::BVFunction(double lo, double hi, Matrix base, std::vector<Atom> atoms,
                       std::optional<PiecewisePoly> density, bool density_is_norm)
    : lo_(lo),
      hi_(hi),
      base_(std::move(base)),
      atoms_(std::move(atoms)),
      density_(std::move(density)),
      density_is_norm_(density_is_norm) {
    if (!(hi_ > lo_)) throw std::invalid_argument("BVFunction: empty domain");
    rows_ = static_cast<int>(base_.rows());
    cols_ = static_cast<int>(base_.cols());
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.loc < b.loc; });
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].loc < lo_ - kEdgeTol || atoms_[i].loc > hi_ + kEdgeTol)
            throw std::invalid_argument("BVFunction: atom outside the domain");
        if (atoms_[i].jump.rows() != rows_ || atoms_[i].jump.cols() != cols_)
            throw std::invalid_argument("BVFunction: atom shape mismatch");
        if (i > 0 && !(atoms_[i].loc - atoms_[i - 1].loc > kEdgeTol))
            throw std::invalid_argument("BVFunction: atom locations must be strictly increasing");
    }
    if (density_) {
        if (std::abs(density_->lo() - lo_) > kEdgeTol || std::abs(density_->hi() - hi_) > kEdgeTol)
            throw std::invalid_argument("BVFunction: density domain mismatch");
        if (!density_is_norm_ && (density_->rows() != rows_ || density_->cols() != cols_))
            throw std::invalid_argument("BVFunction: density shape mismatch");
        if (density_is_norm_ && (rows_ != 1 || cols_ != 1))
            throw std::invalid_argument("BVFunction: norm-wrapped density requires scalar values");
        if (!density_is_norm_) density_antideriv_ = density_->antiderivative();
    }
}

Matrix BVFunction::density_value(double t) const {
    if (!density_) return Matrix::Zero(rows_, cols_);
    const Matrix v = density_->value(t);
    if (!density_is_norm_) return v;
    return Matrix::Constant(1, 1, op_norm(v));
}

Matrix BVFunction::density_integral(double a, double b) const {
    if (!density_ || !(b > a)) return Matrix::Zero(rows_, cols_);
    if (!density_is_norm_) return density_antideriv_->value(b) - density_antideriv_->value(a);
    double sum = 0.0;
    for (const auto& pc : density_->pieces()) {
        const double lo = std::max(pc.lo, a), hi = std::min(pc.hi, b);
        if (hi - lo <= 0.0) continue;
        sum += gauss_integrate([&](double t) { return op_norm(pc.poly(t)); }, lo, hi, {}, 24);
    }
    return Matrix::Constant(1, 1, sum);
}

Matrix BVFunction::value(double t) const {
    if (t < lo_ - kEdgeTol || t > hi_ + kEdgeTol)
        throw std::out_of_range("BVFunction: evaluation outside the domain");
    const double tc = std::clamp(t, lo_, hi_);
    Matrix v = base_;
    for (const Atom& a : atoms_) {
        if (a.loc > tc + kEdgeTol) break;
        // Right-continuous at interior atoms; an atom at the left endpoint is
        // not yet included in alpha(lo).
        if (std::abs(a.loc - lo_) <= kEdgeTol && tc <= lo_ + kEdgeTol) continue;
        v += a.jump;
    }
    v += density_integral(lo_, tc);
    return v;
}

double BVFunction::total_variation() const {
    double var = 0.0;
    for (const Atom& a : atoms_) var += op_norm(a.jump);
    if (density_) {
        if (density_is_norm_) {
            var += density_integral(lo_, hi_)(0, 0);
        } else if (rows_ == 1 && cols_ == 1) {
            for (const auto& pc : density_->pieces()) {
                const Poly q = pc.poly.entry(0, 0);
                std::vector<double> cuts = sign_change_roots(q, pc.lo, pc.hi);
                cuts.insert(cuts.begin(), pc.lo);
                cuts.push_back(pc.hi);
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                    var += std::abs(q.integrate(cuts[i], cuts[i + 1]));
            }
        } else {
            for (const auto& pc : density_->pieces())
                var += gauss_integrate([&](double t) { return op_norm(pc.poly(t)); }, pc.lo, pc.hi,
                                       {}, 24);
        }
    }
    return var;
}

BVFunction BVFunction::variation_function() const {
    std::vector<Atom> vatoms;
    for (const Atom& a : atoms_) vatoms.push_back(Atom{a.loc, Matrix::Constant(1, 1, op_norm(a.jump))});

    std::optional<PiecewisePoly> vdensity;
    bool vnorm = false;
    if (density_) {
        if (!density_is_norm_ && rows_ == 1 && cols_ == 1) {
            // Exact: split each piece at sign changes and flip the sign.
            std::vector<PiecewisePoly::Piece> out;
            for (const auto& pc : density_->pieces()) {
                const Poly q = pc.poly.entry(0, 0);
                std::vector<double> cuts = sign_change_roots(q, pc.lo, pc.hi);
                cuts.insert(cuts.begin(), pc.lo);
                cuts.push_back(pc.hi);
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
                    const Poly s = q(mid) < 0.0 ? -q : q;
                    out.push_back({cuts[i], cuts[i + 1], MatPoly(s)});
                }
            }
            vdensity = PiecewisePoly(lo_, hi_, std::move(out));
        } else {
            vdensity = density_;  // same pieces, evaluated through the norm
            vnorm = true;
        }
    }
    return BVFunction(lo_, hi_, Matrix::Zero(1, 1), std::move(vatoms), std::move(vdensity), vnorm);
}

bool BVFunction::variation_exact() const {
    return !density_ || (!density_is_norm_ && rows_ == 1 && cols_ == 1);
}

std::vector<double> BVFunction::atom_locations() const {
    std::vector<double> out;
    for (const Atom& a : atoms_) out.push_back(a.loc);
    return out;
}

}  // namespace rfde
