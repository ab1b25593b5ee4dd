#pragma once

#include <functional>

namespace rafm {

// Adaptive Simpson on [a,b] with absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-10);

// Composite Simpson with n panels (n even); the independent cross-check rule.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           std::size_t n);

// Smallest r such that the pdf mass beyond r is below tail_mass, found by
// doubling from r0 and checking the remaining integral. pdf must be a density
// on [0, inf).
double find_tail_cutoff(const std::function<double(double)>& pdf, double r0 = 1.0,
                        double tail_mass = 1e-12);

} // namespace rafm
