#include "offsetsim/stats/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace offsetsim::stats {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

Matrix gram(const Matrix& x) {
    Matrix g(x.cols, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t a = 0; a < x.cols; ++a) {
            const double xa = x.at(i, a);
            if (xa == 0.0) continue;
            for (std::size_t b = a; b < x.cols; ++b) g.at(a, b) += xa * x.at(i, b);
        }
    for (std::size_t a = 0; a < x.cols; ++a)
        for (std::size_t b = 0; b < a; ++b) g.at(a, b) = g.at(b, a);
    return g;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& v) {
    if (a.cols != v.size()) throw std::invalid_argument("mat_vec: shape mismatch");
    std::vector<double> out(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> xt_y(const Matrix& x, const std::vector<double>& y) {
    if (x.rows != y.size()) throw std::invalid_argument("xt_y: shape mismatch");
    std::vector<double> out(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double yi = y[i];
        for (std::size_t j = 0; j < x.cols; ++j) out[j] += x.at(i, j) * yi;
    }
    return out;
}

Cholesky cholesky(const Matrix& a, double rel_tol) {
    if (a.rows != a.cols) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a.at(i, i)));
    const double tol = rel_tol * (max_diag > 0.0 ? max_diag : 1.0);

    Cholesky f;
    f.lower = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a.at(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= f.lower.at(j, k) * f.lower.at(j, k);
        if (d <= tol) {
            f.fail_index = static_cast<int>(j);
            return f;
        }
        const double ljj = std::sqrt(d);
        f.lower.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= f.lower.at(i, k) * f.lower.at(j, k);
            f.lower.at(i, j) = s / ljj;
        }
    }
    return f;
}

std::vector<double> chol_solve(const Cholesky& f, const std::vector<double>& b) {
    if (!f.ok()) throw std::runtime_error("chol_solve: factorization failed");
    const std::size_t n = f.lower.rows;
    if (b.size() != n) throw std::invalid_argument("chol_solve: shape mismatch");
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= f.lower.at(i, k) * y[k];
        y[i] = s / f.lower.at(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= f.lower.at(k, ii) * x[k];
        x[ii] = s / f.lower.at(ii, ii);
    }
    return x;
}

Matrix chol_inverse(const Cholesky& f) {
    if (!f.ok()) throw std::runtime_error("chol_inverse: factorization failed");
    const std::size_t n = f.lower.rows;
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::vector<double> col = chol_solve(f, e);
        for (std::size_t i = 0; i < n; ++i) inv.at(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

Matrix gauss_jordan_inverse(const Matrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("inverse: matrix not square");
    const std::size_t n = a.rows;
    Matrix work = a;
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) inv.at(i, i) = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(work.at(r, col)) > std::fabs(work.at(pivot, col))) pivot = r;
        if (std::fabs(work.at(pivot, col)) < 1e-12)
            throw std::runtime_error("inverse: singular matrix");
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work.at(pivot, j), work.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        const double p = work.at(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = work.at(r, col);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work.at(r, j) -= factor * work.at(col, j);
                inv.at(r, j) -= factor * inv.at(col, j);
            }
        }
    }
    return inv;
}

}  // namespace offsetsim::stats
