// Copyright 2026 The Curo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curo/errors.hpp"

// Dense real vectors and matrices plus the handful of factorizations the
// rest of the library needs. Everything here is value-semantic and sized for
// desk-scale problems (dimensions of a few dozen); there is deliberately no
// sparse or blocked machinery.

namespace curo {

using Vec = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const Vec& data() const { return data_; }
    Vec& data() { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vec row(int i) const {
        Vec r(cols_);
        for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    Vec data_;
};

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Euclidean norm, sqrt of the sum of squares.
inline double two_norm(const Vec& v) {
    return std::sqrt(dot(v, v));
}

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline void axpy(double alpha, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec matvec(const Matrix& m, const Vec& v) {
    if (m.cols() != static_cast<int>(v.size()))
        throw DimensionMismatch("matvec: " + std::to_string(m.cols()) + " cols vs vector of " +
                                std::to_string(v.size()));
    Vec r(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

/// m^T v without forming the transpose.
inline Vec matvec_t(const Matrix& m, const Vec& v) {
    if (m.rows() != static_cast<int>(v.size()))
        throw DimensionMismatch("matvec_t: " + std::to_string(m.rows()) + " rows vs vector of " +
                                std::to_string(v.size()));
    Vec r(m.cols(), 0.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[j] += m(i, j) * v[i];
    return r;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix add: shapes disagree");
    Matrix c = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

inline Matrix scaled(const Matrix& a, double s) {
    Matrix c = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) *= s;
    return c;
}

/// Outer product v v^T scaled by alpha.
inline Matrix outer(const Vec& v, double alpha = 1.0) {
    int n = static_cast<int>(v.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = alpha * v[i] * v[j];
    return m;
}

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) throw NotSquare(std::string(who) + ": matrix is not square");
}

inline void require_symmetric(const Matrix& m, const char* who, double rel_tol = 1e-10) {
    require_square(m, who);
    double scale = 1.0 + m.max_abs();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale)
                throw NotSymmetric(std::string(who) + ": matrix is not symmetric");
}

}  // namespace detail

/// Lower-triangular Cholesky factor L with L L^T == sigma.
///
/// Accepts singular positive semidefinite inputs: a pivot within tolerance of
/// zero is clamped to zero and the remainder of its column is zeroed, so
/// rank-deficient sample covariances factor cleanly. A pivot below
/// -1e-9 * (1 + max|sigma|) raises NotPsd. Callers with nearly-symmetric data
/// should symmetrize (M + M^T)/2 first; asymmetry beyond 1e-10 relative is
/// rejected.
inline Matrix cholesky(const Matrix& sigma) {
    detail::require_symmetric(sigma, "cholesky");
    if (!sigma.all_finite()) throw BadInput("cholesky: non-finite entries");
    int n = sigma.rows();
    double scale = 1.0 + sigma.max_abs();
    double tol = 1e-9 * scale;
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = sigma(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d < -tol) throw NotPsd("cholesky: pivot " + std::to_string(d) + " at column " +
                                   std::to_string(j));
        if (d <= tol) {
            // Singular direction: zero pivot, zero column.
            l(j, j) = 0.0;
            continue;
        }
        double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = sigma(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

struct EigenPair {
    double value = 0.0;
    Vec vector;
};

/// Smallest eigenvalue of a symmetric matrix with an associated unit
/// eigenvector, computed by cyclic Jacobi rotations. Intended for the small
/// blocks that appear in cut generation (dimension <= 64).
inline EigenPair min_eigenvalue(const Matrix& m) {
    detail::require_symmetric(m, "min_eigenvalue");
    if (!m.all_finite()) throw BadInput("min_eigenvalue: non-finite entries");
    int n = m.rows();
    if (n == 0) throw BadInput("min_eigenvalue: empty matrix");
    if (n == 1) return {m(0, 0), Vec{1.0}};

    Matrix a = m;
    // Symmetrize exactly so rotations see a(i,j) == a(j,i).
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    Matrix q = Matrix::identity(n);
    double scale = 1.0 + a.max_abs();

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-13 * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int r = p + 1; r < n; ++r) {
                double apr = a(p, r);
                if (std::abs(apr) <= 1e-15 * scale) continue;
                double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (int k = 0; k < n; ++k) {
                    double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }

    int arg = 0;
    for (int i = 1; i < n; ++i)
        if (a(i, i) < a(arg, arg)) arg = i;
    EigenPair out;
    out.value = a(arg, arg);
    out.vector.resize(n);
    for (int i = 0; i < n; ++i) out.vector[i] = q(i, arg);
    double nrm = two_norm(out.vector);
    if (nrm > 0.0)
        for (double& v : out.vector) v /= nrm;
    return out;
}

}  // namespace curo
