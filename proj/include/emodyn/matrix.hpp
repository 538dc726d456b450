#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include "emodyn/error.hpp"

namespace emodyn {

/// Dense row-major matrix of doubles. Sized for the small systems this
/// library deals with (state dimensions of a few, Gram matrices of a few
/// hundred); no BLAS, no views, plain loops.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Row-major initializer, e.g. Matrix(2, 2, {a, b, c, d}).
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values)
        : rows_(rows), cols_(cols), data_(values) {
        if (data_.size() != rows * cols)
            throw DimensionError("Matrix initializer has " + std::to_string(data_.size()) +
                                 " values for a " + shape_string(rows, cols) + " matrix");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// 1x1 convenience for the univariate models used throughout.
    static Matrix scalar(double v) { return Matrix(1, 1, {v}); }

    static Matrix column(const std::vector<double>& v) {
        Matrix m(v.size(), 1);
        m.data_ = v;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// Single element of a 1x1 matrix.
    double value() const {
        if (rows_ != 1 || cols_ != 1)
            throw DimensionError("value() on a " + shape_string(rows_, cols_) + " matrix");
        return data_[0];
    }

    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o, "+");
        Matrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o, "-");
        Matrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
        return out;
    }

    Matrix operator*(double s) const {
        Matrix out = *this;
        for (double& v : out.data_) v *= s;
        return out;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_)
            throw DimensionError("cannot multiply " + shape_string(rows_, cols_) + " by " +
                                 shape_string(o.rows_, o.cols_));
        Matrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
            }
        }
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Largest absolute asymmetry ||M - M^T||_inf; 0 for non-square.
    double max_asymmetry() const {
        if (rows_ != cols_) return 0.0;
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
        return worst;
    }

    static std::string shape_string(std::size_t r, std::size_t c) {
        return std::to_string(r) + "x" + std::to_string(c);
    }

private:
    void require_same_shape(const Matrix& o, const char* op) const {
        if (!same_shape(o))
            throw DimensionError(std::string("shape mismatch for '") + op + "': " +
                                 shape_string(rows_, cols_) + " vs " +
                                 shape_string(o.rows_, o.cols_));
    }

    std::size_t rows_, cols_;
    std::vector<double> data_;
};

inline Matrix operator*(double s, const Matrix& m) { return m * s; }

/// (M + M^T) / 2.
inline Matrix symmetrized(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
    return out;
}

struct InverseResult {
    Matrix inverse;
    double log_abs_det = 0.0;
    int det_sign = 1;          // sign of the determinant
    double condition = 1.0;    // max|pivot| / min|pivot| over the elimination
};

/// Gauss-Jordan inversion with partial pivoting. The condition estimate is
/// the ratio of the largest to smallest pivot magnitude; anything above
/// `condition_limit` (or an exactly zero pivot) throws NumericError.
inline InverseResult invert(const Matrix& m, double condition_limit = 1e12) {
    if (m.rows() != m.cols())
        throw DimensionError("cannot invert non-square " +
                             Matrix::shape_string(m.rows(), m.cols()) + " matrix");
    const std::size_t n = m.rows();
    Matrix work = m;
    Matrix inv = Matrix::identity(n);
    double max_pivot = 0.0;
    double min_pivot = std::numeric_limits<double>::infinity();
    double log_abs_det = 0.0;
    int det_sign = 1;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        double best = std::abs(work(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(work(r, col));
            if (cand > best) {
                best = cand;
                pivot_row = r;
            }
        }
        if (best == 0.0)
            throw NumericError("singular matrix: zero pivot at column " + std::to_string(col));
        if (pivot_row != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(col, j), work(pivot_row, j));
                std::swap(inv(col, j), inv(pivot_row, j));
            }
            det_sign = -det_sign;
        }
        const double pivot = work(col, col);
        max_pivot = std::max(max_pivot, std::abs(pivot));
        min_pivot = std::min(min_pivot, std::abs(pivot));
        log_abs_det += std::log(std::abs(pivot));
        if (pivot < 0.0) det_sign = -det_sign;

        const double inv_pivot = 1.0 / pivot;
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) *= inv_pivot;
            inv(col, j) *= inv_pivot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = work(r, col);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= factor * work(col, j);
                inv(r, j) -= factor * inv(col, j);
            }
        }
    }

    const double condition = max_pivot / min_pivot;
    if (!(condition <= condition_limit))
        throw NumericError("ill-conditioned matrix: pivot-ratio condition estimate " +
                           std::to_string(condition) + " exceeds " +
                           std::to_string(condition_limit));
    return InverseResult{std::move(inv), log_abs_det, det_sign, condition};
}

/// Lower-triangular Cholesky factor of a PSD matrix. Pivots within
/// `tolerance` of zero produce a zero column (rank-deficient input is fine);
/// pivots below -tolerance throw.
inline Matrix cholesky_psd(const Matrix& m, double tolerance = 1e-10) {
    if (m.rows() != m.cols())
        throw DimensionError("cholesky of non-square matrix");
    const std::size_t n = m.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d < -tolerance)
            throw NumericError("matrix not positive semi-definite: pivot " + std::to_string(d));
        if (d <= tolerance) {
            // treat as exactly zero: the whole column vanishes
            continue;
        }
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

/// Solves A X = B for symmetric positive definite A via Cholesky.
/// Used for the ridge normal equations, where A can be a few hundred wide.
inline Matrix solve_spd(const Matrix& a, const Matrix& b, double pivot_floor = 1e-12) {
    if (a.rows() != a.cols())
        throw DimensionError("solve_spd needs a square matrix");
    if (a.rows() != b.rows())
        throw DimensionError("solve_spd shape mismatch: " +
                             Matrix::shape_string(a.rows(), a.cols()) + " vs rhs " +
                             Matrix::shape_string(b.rows(), b.cols()));
    const std::size_t n = a.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= pivot_floor)
            throw NumericError("system not positive definite: pivot " + std::to_string(d) +
                               " at column " + std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    // forward then backward substitution, column by column of B
    Matrix x(b.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * y[k];
            y[i] = s / L(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * x(k, c);
            x(ii, c) = s / L(ii, ii);
        }
    }
    return x;
}

}  // namespace emodyn
