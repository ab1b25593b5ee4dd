#include "rafm/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rafm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

// Series expansion of P(a,x), converges fast for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), for x >= a+1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double reg_lower_gamma(double a, double x) {
    if (a <= 0.0)
        throw std::invalid_argument("reg_lower_gamma: a must be positive");
    if (x < 0.0)
        throw std::invalid_argument("reg_lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double log_chi_pdf(double r, std::size_t d) {
    if (r <= 0.0)
        throw std::invalid_argument("log_chi_pdf: r must be positive");
    if (d < 1)
        throw std::invalid_argument("log_chi_pdf: d must be >= 1");
    double hd = 0.5 * static_cast<double>(d);
    return (static_cast<double>(d) - 1.0) * std::log(r) - 0.5 * r * r
        - (hd - 1.0) * kLn2 - std::lgamma(hd);
}

double chi_pdf(double r, std::size_t d) {
    if (r < 0.0)
        throw std::invalid_argument("chi_pdf: r must be nonnegative");
    if (d < 1)
        throw std::invalid_argument("chi_pdf: d must be >= 1");
    if (r == 0.0)
        return d >= 2 ? 0.0 : std::sqrt(2.0 / kPi);
    return std::exp(log_chi_pdf(r, d));
}

double chi_cdf(double r, std::size_t d) {
    if (r <= 0.0) return 0.0;
    return reg_lower_gamma(0.5 * static_cast<double>(d), 0.5 * r * r);
}

double chi_quantile(double u, std::size_t d) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0)
        throw std::invalid_argument("chi_quantile: u must lie in (0,1)");
    // bracket the root, then bisect; the CDF is strictly increasing
    double lo = 0.0, hi = std::sqrt(static_cast<double>(d)) + 1.0;
    while (chi_cdf(hi, d) < u) {
        hi *= 2.0;
        if (hi > 1e9)
            throw std::runtime_error("chi_quantile: bracket failed");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (chi_cdf(mid, d) < u)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi))
            break;
    }
    return 0.5 * (lo + hi);
}

double gamma_pdf(double r, double k, double theta) {
    if (k <= 0.0 || theta <= 0.0)
        throw std::invalid_argument("gamma_pdf: shape and scale must be positive");
    if (r < 0.0)
        throw std::invalid_argument("gamma_pdf: r must be nonnegative");
    if (r == 0.0) {
        if (k < 1.0) return std::numeric_limits<double>::infinity();
        if (k == 1.0) return 1.0 / theta;
        return 0.0;
    }
    double logp = (k - 1.0) * std::log(r) - r / theta - std::lgamma(k) - k * std::log(theta);
    return std::exp(logp);
}

double log_sphere_area(std::size_t d) {
    if (d < 1)
        throw std::invalid_argument("log_sphere_area: d must be >= 1");
    double hd = 0.5 * static_cast<double>(d);
    return kLn2 + hd * std::log(kPi) - std::lgamma(hd);
}

double log_gaussian_density(double r2, std::size_t d) {
    return -0.5 * static_cast<double>(d) * std::log(2.0 * kPi) - 0.5 * r2;
}

} // namespace rafm
