#pragma once

#include "rafm/matrix.hpp"
#include "rafm/prng.hpp"

namespace rafm {

// Mixing matrix A with i.i.d. standard normal entries; shared bit-for-bit by
// the Student-t and Gaussian benchmarks at equal (d, matrix_seed).
Matrix mixing_matrix(std::size_t d, std::uint64_t matrix_seed);

// X = Z A^T with Z i.i.d. Student-t(nu).
Matrix gen_student_t(std::size_t d, double nu, std::size_t n, std::uint64_t matrix_seed,
                     std::uint64_t data_seed);
Matrix gen_student_t_mixed(const Matrix& a, double nu, std::size_t n,
                           std::uint64_t data_seed);

// X = Z A^T with Z i.i.d. standard normal.
Matrix gen_aniso_gauss(std::size_t d, std::size_t n, std::uint64_t matrix_seed,
                       std::uint64_t data_seed);
Matrix gen_aniso_gauss_mixed(const Matrix& a, std::size_t n, std::uint64_t data_seed);

// 2D rings: r = |t(3)| * scale, angle from a mixture of `modes` Gaussian bumps
// of width 1/sqrt(kappa) centered at 2*pi*k/modes, wrapped into [0, 2*pi).
Matrix gen_toy2d(std::size_t n, std::size_t modes, double kappa, double scale,
                 std::uint64_t data_seed);

struct DataSplit {
    Matrix train, valid, test;
};

// Deterministic permutation, then contiguous 60/20/20 slices.
DataSplit split(const Matrix& data, std::uint64_t split_seed);

} // namespace rafm
