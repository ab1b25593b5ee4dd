#include "rafm/datasets.hpp"

#include "rafm/samplers.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rafm {

Matrix mixing_matrix(std::size_t d, std::uint64_t matrix_seed) {
    Prng rng(matrix_seed);
    return sample_gaussian(rng, d, d);
}

Matrix gen_student_t_mixed(const Matrix& a, double nu, std::size_t n,
                           std::uint64_t data_seed) {
    // stream 1: keeps the latent draws disjoint from the mixing-matrix stream
    // even when the same seed is used for both
    Prng rng(data_seed, 1);
    Matrix z = sample_student_t(rng, n, a.rows, nu);
    return matmul_bt(z, a);
}

Matrix gen_student_t(std::size_t d, double nu, std::size_t n, std::uint64_t matrix_seed,
                     std::uint64_t data_seed) {
    return gen_student_t_mixed(mixing_matrix(d, matrix_seed), nu, n, data_seed);
}

Matrix gen_aniso_gauss_mixed(const Matrix& a, std::size_t n, std::uint64_t data_seed) {
    Prng rng(data_seed, 1);
    Matrix z = sample_gaussian(rng, n, a.rows);
    return matmul_bt(z, a);
}

Matrix gen_aniso_gauss(std::size_t d, std::size_t n, std::uint64_t matrix_seed,
                       std::uint64_t data_seed) {
    return gen_aniso_gauss_mixed(mixing_matrix(d, matrix_seed), n, data_seed);
}

Matrix gen_toy2d(std::size_t n, std::size_t modes, double kappa, double scale,
                 std::uint64_t data_seed) {
    if (n < 1 || modes < 1 || kappa <= 0.0)
        throw std::invalid_argument("gen_toy2d: bad parameters");
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    Prng rng(data_seed, 1);
    double sigma = 1.0 / std::sqrt(kappa);
    Matrix out(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(draw_student_t(rng, 3.0)) * scale;
        auto k = rng.next_below(modes);
        double theta = two_pi * static_cast<double>(k) / static_cast<double>(modes) +
                       sigma * rng.gaussian();
        theta = std::fmod(theta, two_pi);
        if (theta < 0.0) theta += two_pi;
        out(i, 0) = r * std::cos(theta);
        out(i, 1) = r * std::sin(theta);
    }
    return out;
}

DataSplit split(const Matrix& data, std::uint64_t split_seed) {
    std::size_t n = data.rows;
    if (n < 5)
        throw std::invalid_argument("split: need at least 5 rows");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Prng rng(split_seed);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(perm[i], perm[j]);
    }
    std::size_t n_train = n * 6 / 10;
    std::size_t n_valid = n * 2 / 10;
    auto take = [&](std::size_t begin, std::size_t count) {
        Matrix m(count, data.cols);
        for (std::size_t i = 0; i < count; ++i) {
            auto src = data.row(perm[begin + i]);
            std::copy(src.begin(), src.end(), m.row(i).begin());
        }
        return m;
    };
    DataSplit s;
    s.train = take(0, n_train);
    s.valid = take(n_train, n_valid);
    s.test = take(n_train + n_valid, n - n_train - n_valid);
    return s;
}

} // namespace rafm
