#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace rfde {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Operator norm induced by the Euclidean vector norm.
/// Exact (largest singular value) up to 4x4; Frobenius upper bound beyond.
inline double op_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    if (m.rows() == 1 || m.cols() == 1) return m.norm();  // vector: 2-norm
    if (m.rows() <= 4 && m.cols() <= 4) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    return m.norm();  // Frobenius, certified upper bound
}

inline Matrix zero_like(int rows, int cols) { return Matrix::Zero(rows, cols); }

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace rfde
