#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rafm {

// Dense row-major matrix of doubles; rows are samples, columns coordinates.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t n, std::size_t d) : rows(n), cols(d), data(n * d, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool empty() const { return rows == 0; }
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);

// C = A * B^T (the shape used by X = Z A^T dataset mixing)
Matrix matmul_bt(const Matrix& a, const Matrix& b);

// Euclidean norm of each row.
std::vector<double> row_norms(const Matrix& a);

// A += alpha * B, elementwise.
void add_scaled(Matrix& a, double alpha, const Matrix& b);

// Ascending copy of column j.
std::vector<double> sort_column(const Matrix& a, std::size_t j);

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

// True when every entry is finite.
bool all_finite(const Matrix& a);
bool row_finite(const Matrix& a, std::size_t i);

} // namespace rafm
