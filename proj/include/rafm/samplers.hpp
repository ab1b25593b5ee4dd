#pragma once

#include "rafm/matrix.hpp"
#include "rafm/prng.hpp"

namespace rafm {

// n x d matrix of i.i.d. standard normal entries.
Matrix sample_gaussian(Prng& rng, std::size_t n, std::size_t d);

// n x d matrix of i.i.d. Student-t(nu) entries, N(0,1)/sqrt(ChiSq(nu)/nu).
Matrix sample_student_t(Prng& rng, std::size_t n, std::size_t d, double nu);

// n rows uniform on the unit sphere S^{d-1}.
Matrix sample_uniform_sphere(Prng& rng, std::size_t n, std::size_t d);

// Single draws, sharing the matrix samplers' streams.
double draw_student_t(Prng& rng, double nu);
void draw_unit_direction(Prng& rng, std::span<double> out);

// Gamma(shape, scale=1) draw; Marsaglia-Tsang for non-integer shapes.
double draw_gamma(Prng& rng, double shape);

} // namespace rafm
