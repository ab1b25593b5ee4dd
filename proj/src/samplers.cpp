#include "rafm/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace rafm {

namespace {

// Shape >= 1 via Marsaglia-Tsang; shape < 1 boosted with the u^{1/shape} trick.
double gamma_marsaglia_tsang(Prng& rng, double shape) {
    if (shape < 1.0) {
        double u = rng.uniform_pos();
        return gamma_marsaglia_tsang(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = rng.uniform_pos();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace

double draw_gamma(Prng& rng, double shape) {
    if (shape <= 0.0)
        throw std::invalid_argument("draw_gamma: shape must be positive");
    return gamma_marsaglia_tsang(rng, shape);
}

double draw_student_t(Prng& rng, double nu) {
    if (nu <= 0.0)
        throw std::invalid_argument("draw_student_t: nu must be positive");
    double g = rng.gaussian();
    double chisq;
    double nu_round = std::floor(nu);
    if (nu == nu_round && nu <= 64.0) {
        // small integer nu: sum of nu squared gaussians
        chisq = 0.0;
        int k = static_cast<int>(nu_round);
        for (int i = 0; i < k; ++i) {
            double z = rng.gaussian();
            chisq += z * z;
        }
    } else {
        chisq = 2.0 * draw_gamma(rng, 0.5 * nu);
    }
    return g / std::sqrt(chisq / nu);
}

Matrix sample_gaussian(Prng& rng, std::size_t n, std::size_t d) {
    if (n < 1 || d < 1)
        throw std::invalid_argument("sample_gaussian: n and d must be >= 1");
    Matrix out(n, d);
    for (double& v : out.data)
        v = rng.gaussian();
    return out;
}

Matrix sample_student_t(Prng& rng, std::size_t n, std::size_t d, double nu) {
    if (n < 1 || d < 1)
        throw std::invalid_argument("sample_student_t: n and d must be >= 1");
    Matrix out(n, d);
    for (double& v : out.data)
        v = draw_student_t(rng, nu);
    return out;
}

void draw_unit_direction(Prng& rng, std::span<double> out) {
    for (;;) {
        double s = 0.0;
        for (double& v : out) {
            v = rng.gaussian();
            s += v * v;
        }
        double r = std::sqrt(s);
        if (r >= 1e-30) {
            for (double& v : out)
                v /= r;
            return;
        }
        // astronomically rare: resample rather than divide by ~0
    }
}

Matrix sample_uniform_sphere(Prng& rng, std::size_t n, std::size_t d) {
    if (d < 1)
        throw std::invalid_argument("sample_uniform_sphere: d must be >= 1");
    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i)
        draw_unit_direction(rng, out.row(i));
    return out;
}

} // namespace rafm
