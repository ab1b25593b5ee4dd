#include "rafm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rafm {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: inner dimensions disagree");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        double* ci = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = ai[k];
            const double* bk = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j)
                ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols)
        throw std::invalid_argument("matmul_bt: inner dimensions disagree");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.data.data() + j * b.cols;
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k)
                s += ai[k] * bj[k];
            c(i, j) = s;
        }
    }
    return c;
}

std::vector<double> row_norms(const Matrix& a) {
    std::vector<double> out(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j)
            s += ai[j] * ai[j];
        out[i] = std::sqrt(s);
    }
    return out;
}

void add_scaled(Matrix& a, double alpha, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("add_scaled: shapes disagree");
    for (std::size_t i = 0; i < a.data.size(); ++i)
        a.data[i] += alpha * b.data[i];
}

std::vector<double> sort_column(const Matrix& a, std::size_t j) {
    if (j >= a.cols)
        throw std::invalid_argument("sort_column: column out of range");
    std::vector<double> col(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        col[i] = a(i, j);
    std::sort(col.begin(), col.end());
    return col;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("dot: lengths disagree");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * y[i];
    return s;
}

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return std::sqrt(s);
}

bool all_finite(const Matrix& a) {
    for (double v : a.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool row_finite(const Matrix& a, std::size_t i) {
    const double* ai = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j)
        if (!std::isfinite(ai[j])) return false;
    return true;
}

} // namespace rafm
