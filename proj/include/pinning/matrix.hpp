// Dense square matrices sized for finite chain state spaces (a handful of
// states, occasionally a few dozen). Row-major storage, value semantics.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pinning {

class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
    Matrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
        if (a_.size() != n * n) throw std::invalid_argument("Matrix: entry count != n*n");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    const double* row(std::size_t i) const { return a_.data() + i * n_; }
    double* row(std::size_t i) { return a_.data() + i * n_; }
    const std::vector<double>& data() const { return a_; }

    Matrix& operator+=(const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }
    // this += s * o
    void axpy(double s, const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += s * o.a_[k];
    }

    double row_sum(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    // max_i sum_j |a_ij|
    double inf_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    bool strictly_positive() const {
        for (double v : a_)
            if (!(v > 0.0)) return false;
        return !a_.empty();
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("Matrix multiply: size mismatch");
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

// row vector times matrix: (v^T M)
inline std::vector<double> mul_left(const std::vector<double>& v, const Matrix& m) {
    const std::size_t n = m.size();
    if (v.size() != n) throw std::invalid_argument("mul_left: size mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* mi = m.row(i);
        for (std::size_t j = 0; j < n; ++j) out[j] += vi * mi[j];
    }
    return out;
}

inline std::vector<double> mul_right(const Matrix& m, const std::vector<double>& v) {
    const std::size_t n = m.size();
    if (v.size() != n) throw std::invalid_argument("mul_right: size mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* mi = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += mi[j] * v[j];
        out[i] = s;
    }
    return out;
}

// M^k by repeated squaring; k = 0 gives the identity.
inline Matrix matrix_power(Matrix base, unsigned long long k) {
    Matrix result = Matrix::identity(base.size());
    while (k > 0) {
        if (k & 1ULL) result = result * base;
        k >>= 1ULL;
        if (k > 0) base = base * base;
    }
    return result;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws on (numerically) singular systems.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("solve_linear: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        const double d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            a(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace pinning
