#pragma once

#include <cstddef>

namespace rafm {

// Reference densities and the incomplete-gamma machinery behind them.

// Density of ||Z|| for Z ~ N(0, I_d):  r^{d-1} e^{-r^2/2} / (2^{d/2-1} Gamma(d/2)).
double chi_pdf(double r, std::size_t d);

// log chi_pdf, stable far into the tail where the density underflows.
double log_chi_pdf(double r, std::size_t d);

// CDF of the chi_d law, P(d/2, r^2/2).
double chi_cdf(double r, std::size_t d);

// Quantile of the chi_d law (bisection on the CDF).
double chi_quantile(double u, std::size_t d);

// Gamma(k, theta) density, shape-scale parametrization.
double gamma_pdf(double r, double k, double theta);

// Lower regularized incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
double reg_lower_gamma(double a, double x);

// log of the surface area of S^{d-1}: log(2 pi^{d/2} / Gamma(d/2)).
double log_sphere_area(std::size_t d);

// log density of N(0, I_d) at squared radius r2.
double log_gaussian_density(double r2, std::size_t d);

} // namespace rafm
