#pragma once

#include <cstddef>
#include <vector>

namespace offsetsim::stats {

// Row-major dense matrix, sized for regression designs (tens of columns).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix gram(const Matrix& x);                                       // X'X
std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& v);
std::vector<double> xt_y(const Matrix& x, const std::vector<double>& y);  // X'y

// Cholesky factorization of a symmetric positive-definite matrix.
// fail_index is the first pivot that is not safely positive (rank
// deficiency), or -1 on success.
struct Cholesky {
    Matrix lower;
    int fail_index = -1;

    bool ok() const { return fail_index < 0; }
};

Cholesky cholesky(const Matrix& a, double rel_tol = 1e-10);
std::vector<double> chol_solve(const Cholesky& f, const std::vector<double>& b);
Matrix chol_inverse(const Cholesky& f);

// Gauss-Jordan inverse with partial pivoting. Throws std::runtime_error on a
// singular matrix. Used where an explicit inverse is genuinely needed
// (covariance matrices, test oracles).
Matrix gauss_jordan_inverse(const Matrix& a);

}  // namespace offsetsim::stats
