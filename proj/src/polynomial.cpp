#include "rfde/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfde {

Poly::Poly(std::vector<double> coef) : coef_(std::move(coef)) {
    if (coef_.empty()) coef_ = {0.0};
    while (coef_.size() > 1 && coef_.back() == 0.0) coef_.pop_back();
}

bool Poly::is_zero(double tol) const {
    for (double c : coef_)
        if (std::abs(c) > tol) return false;
    return true;
}

double Poly::operator()(double t) const {
    double v = 0.0;
    for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) v = v * t + *it;
    return v;
}

Poly Poly::derivative() const {
    if (coef_.size() <= 1) return Poly();
    std::vector<double> d(coef_.size() - 1);
    for (std::size_t k = 1; k < coef_.size(); ++k) d[k - 1] = coef_[k] * static_cast<double>(k);
    return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
    std::vector<double> a(coef_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coef_.size(); ++k) a[k + 1] = coef_[k] / static_cast<double>(k + 1);
    return Poly(std::move(a));
}

double Poly::integrate(double a, double b) const {
    const Poly F = antiderivative();
    return F(b) - F(a);
}

Poly Poly::compose_affine(double c0, double c1) const {
    // Horner in polynomial space: p(c0 + c1 t).
    Poly result = Poly::constant(coef_.back());
    const Poly lin({c0, c1});
    for (int k = static_cast<int>(coef_.size()) - 2; k >= 0; --k)
        result = result * lin + Poly::constant(coef_[static_cast<std::size_t>(k)]);
    return result;
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<double> c(std::max(coef_.size(), o.coef_.size()), 0.0);
    for (std::size_t k = 0; k < coef_.size(); ++k) c[k] += coef_[k];
    for (std::size_t k = 0; k < o.coef_.size(); ++k) c[k] += o.coef_[k];
    return Poly(std::move(c));
}

Poly Poly::operator-(const Poly& o) const { return (*this) + o * -1.0; }

Poly Poly::operator*(const Poly& o) const {
    std::vector<double> c(coef_.size() + o.coef_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coef_.size(); ++i)
        for (std::size_t j = 0; j < o.coef_.size(); ++j) c[i + j] += coef_[i] * o.coef_[j];
    return Poly(std::move(c));
}

Poly Poly::operator*(double s) const {
    std::vector<double> c = coef_;
    for (double& x : c) x *= s;
    return Poly(std::move(c));
}

namespace {

double bisect_root(const Poly& p, double lo, double hi) {
    double flo = p(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = p(mid);
        if (fmid == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) return mid;
        if ((flo < 0.0) != (fmid < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> sign_change_roots(const Poly& p, double a, double b) {
    std::vector<double> roots;
    if (!(b > a)) return roots;
    // Coefficient scale for the zero cutoff.
    double scale = 0.0;
    for (double c : p.coef()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return roots;

    const int deg = p.degree();
    if (deg <= 0) return roots;

    // Monotonicity brackets from the derivative's sign-change roots (recursive).
    std::vector<double> marks = {a, b};
    if (deg >= 2) {
        const auto crit = sign_change_roots(p.derivative(), a, b);
        marks.insert(marks.end() - 1, crit.begin(), crit.end());
        std::sort(marks.begin(), marks.end());
    }
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        const double lo = marks[i], hi = marks[i + 1];
        const double flo = p(lo), fhi = p(hi);
        if ((flo < 0.0 && fhi > 0.0) || (flo > 0.0 && fhi < 0.0))
            roots.push_back(bisect_root(p, lo, hi));
    }
    // Drop near-duplicates and endpoints.
    std::vector<double> out;
    for (double r : roots) {
        if (r <= a + 1e-14 || r >= b - 1e-14) continue;
        if (out.empty() || r - out.back() > 1e-13) out.push_back(r);
    }
    return out;
}

double poly_sup_abs(const Poly& p, double a, double b) {
    double m = std::max(std::abs(p(a)), std::abs(p(b)));
    for (double c : sign_change_roots(p.derivative(), a, b)) m = std::max(m, std::abs(p(c)));
    return m;
}

MatPoly::MatPoly(std::vector<Matrix> coef) : coef_(std::move(coef)) {
    if (coef_.empty()) throw std::invalid_argument("MatPoly: empty coefficient list");
    for (const Matrix& c : coef_)
        if (c.rows() != coef_[0].rows() || c.cols() != coef_[0].cols())
            throw std::invalid_argument("MatPoly: coefficient shape mismatch");
    trim();
}

MatPoly::MatPoly(const Poly& p) {
    for (double c : p.coef()) coef_.push_back(Matrix::Constant(1, 1, c));
    trim();
}

void MatPoly::trim() {
    while (coef_.size() > 1 && coef_.back().cwiseAbs().maxCoeff() == 0.0) coef_.pop_back();
}

bool MatPoly::is_zero(double tol) const {
    for (const Matrix& c : coef_)
        if (c.cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

Matrix MatPoly::operator()(double t) const {
    Matrix v = coef_.back();
    for (int k = static_cast<int>(coef_.size()) - 2; k >= 0; --k)
        v = v * t + coef_[static_cast<std::size_t>(k)];
    return v;
}

MatPoly MatPoly::derivative() const {
    if (coef_.size() <= 1) return MatPoly::zero(rows(), cols());
    std::vector<Matrix> d;
    for (std::size_t k = 1; k < coef_.size(); ++k) d.push_back(coef_[k] * static_cast<double>(k));
    return MatPoly(std::move(d));
}

MatPoly MatPoly::antiderivative() const {
    std::vector<Matrix> a;
    a.push_back(Matrix::Zero(rows(), cols()));
    for (std::size_t k = 0; k < coef_.size(); ++k) a.push_back(coef_[k] / static_cast<double>(k + 1));
    return MatPoly(std::move(a));
}

Matrix MatPoly::integrate(double a, double b) const {
    const MatPoly F = antiderivative();
    return F(b) - F(a);
}

MatPoly MatPoly::compose_affine(double c0, double c1) const {
    MatPoly result = MatPoly::constant(coef_.back());
    for (int k = static_cast<int>(coef_.size()) - 2; k >= 0; --k) {
        // result <- result * (c0 + c1 t) + coef[k]
        std::vector<Matrix> next(result.coef_.size() + 1, Matrix::Zero(rows(), cols()));
        for (std::size_t i = 0; i < result.coef_.size(); ++i) {
            next[i] += result.coef_[i] * c0;
            next[i + 1] += result.coef_[i] * c1;
        }
        next[0] += coef_[static_cast<std::size_t>(k)];
        result = MatPoly(std::move(next));
    }
    return result;
}

Poly MatPoly::entry(int i, int j) const {
    std::vector<double> c;
    for (const Matrix& m : coef_) c.push_back(m(i, j));
    return Poly(std::move(c));
}

Poly MatPoly::frobenius_squared() const {
    Poly sum;
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < cols(); ++j) {
            const Poly e = entry(i, j);
            sum = sum + e * e;
        }
    return sum;
}

MatPoly MatPoly::operator+(const MatPoly& o) const {
    std::vector<Matrix> c(std::max(coef_.size(), o.coef_.size()), Matrix::Zero(rows(), cols()));
    for (std::size_t k = 0; k < coef_.size(); ++k) c[k] += coef_[k];
    for (std::size_t k = 0; k < o.coef_.size(); ++k) c[k] += o.coef_[k];
    return MatPoly(std::move(c));
}

MatPoly MatPoly::operator-(const MatPoly& o) const { return (*this) + o * -1.0; }

MatPoly MatPoly::operator*(const MatPoly& o) const {
    if (cols() != o.rows()) throw std::invalid_argument("MatPoly: product shape mismatch");
    std::vector<Matrix> c(coef_.size() + o.coef_.size() - 1, Matrix::Zero(rows(), o.cols()));
    for (std::size_t i = 0; i < coef_.size(); ++i)
        for (std::size_t j = 0; j < o.coef_.size(); ++j) c[i + j] += coef_[i] * o.coef_[j];
    return MatPoly(std::move(c));
}

MatPoly MatPoly::operator*(double s) const {
    std::vector<Matrix> c = coef_;
    for (Matrix& m : c) m *= s;
    return MatPoly(std::move(c));
}

MatPoly MatPoly::scale_by(const Poly& p) const {
    std::vector<Matrix> c(coef_.size() + p.coef().size() - 1, Matrix::Zero(rows(), cols()));
    for (std::size_t i = 0; i < coef_.size(); ++i)
        for (std::size_t j = 0; j < p.coef().size(); ++j) c[i + j] += coef_[i] * p.coef()[j];
    return MatPoly(std::move(c));
}

}  // namespace rfde
