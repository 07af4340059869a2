#pragma once

#include <vector>

#include "rfde/linalg.hpp"

namespace rfde {

/// Scalar polynomial, coefficients in ascending order of degree.
class Poly {
public:
    Poly() : coef_{0.0} {}
    explicit Poly(std::vector<double> coef);
    static Poly constant(double c) { return Poly({c}); }

    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<double>& coef() const { return coef_; }
    bool is_zero(double tol = 0.0) const;

    double operator()(double t) const;

    Poly derivative() const;
    Poly antiderivative() const;  // constant term 0
    double integrate(double a, double b) const;

    /// q(t) = p(c0 + c1 * t)
    Poly compose_affine(double c0, double c1) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;
    Poly operator-() const { return (*this) * -1.0; }

private:
    std::vector<double> coef_;
};

/// Real roots of p in the open interval (a, b) at which p changes sign,
/// sorted ascending. Roots of even multiplicity (no sign change) are not
/// reported; that is what piecewise |p| splitting needs.
std::vector<double> sign_change_roots(const Poly& p, double a, double b);

/// max over [a, b] of |p|, via endpoints and sign-change roots of p'.
double poly_sup_abs(const Poly& p, double a, double b);

/// Matrix-valued polynomial: P(t) = sum_k coef[k] * t^k.
class MatPoly {
public:
    MatPoly() : coef_{Matrix::Zero(1, 1)} {}
    explicit MatPoly(std::vector<Matrix> coef);
    MatPoly(const Poly& p);  // 1x1 lift
    static MatPoly constant(const Matrix& c) { return MatPoly(std::vector<Matrix>{c}); }
    static MatPoly zero(int rows, int cols) { return constant(Matrix::Zero(rows, cols)); }

    int rows() const { return static_cast<int>(coef_[0].rows()); }
    int cols() const { return static_cast<int>(coef_[0].cols()); }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<Matrix>& coef() const { return coef_; }
    bool is_zero(double tol = 0.0) const;

    Matrix operator()(double t) const;
    /// Allocation-free Horner evaluation into a caller-owned matrix/vector.
    template <typename Dst>
    void eval_into(double t, Dst& out) const {
        out = coef_.back();
        for (int k = static_cast<int>(coef_.size()) - 2; k >= 0; --k) {
            out *= t;
            out += coef_[static_cast<std::size_t>(k)];
        }
    }

    MatPoly derivative() const;
    MatPoly antiderivative() const;
    Matrix integrate(double a, double b) const;
    MatPoly compose_affine(double c0, double c1) const;

    Poly entry(int i, int j) const;
    /// Sum of squares of all entries (squared Frobenius norm as a polynomial).
    Poly frobenius_squared() const;

    MatPoly operator+(const MatPoly& o) const;
    MatPoly operator-(const MatPoly& o) const;
    MatPoly operator*(const MatPoly& o) const;  // matrix product, degree adds
    MatPoly operator*(double s) const;
    MatPoly scale_by(const Poly& p) const;  // entrywise scalar-poly multiply

private:
    void trim();
    std::vector<Matrix> coef_;
};

}  // namespace rfde
