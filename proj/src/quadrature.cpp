#include "rafm/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rafm {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lx = 0.5 * (a + m), rx = 0.5 * (m + b);
    double flm = f(lx), frm = f(rx);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    // a fixed initial partition keeps narrow peaks from being skipped when the
    // first three sample points all land on near-zero values
    constexpr std::size_t panels = 32;
    double h = (b - a) / double(panels);
    double total = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        double lo = a + h * double(i);
        double hi = i + 1 == panels ? b : lo + h;
        double m = 0.5 * (lo + hi);
        double fa = f(lo), fm = f(m), fb = f(hi);
        double whole = simpson(fa, fm, fb, hi - lo);
        total += adaptive_rec(f, lo, hi, fa, fm, fb, whole, tol / double(panels), 45);
    }
    return total;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           std::size_t n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("integrate_composite: n must be even and >= 2");
    double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double find_tail_cutoff(const std::function<double(double)>& pdf, double r0,
                        double tail_mass) {
    double r = r0;
    for (int i = 0; i < 64; ++i) {
        // mass on (r, 4r) bounds the tail for the rapidly decaying pdfs used here
        double seg = integrate_adaptive(pdf, r, 4.0 * r, tail_mass * 1e-2);
        if (seg < 0.5 * tail_mass && pdf(r) * r < tail_mass)
            return 4.0 * r;
        r *= 2.0;
    }
    throw std::runtime_error("find_tail_cutoff: tail does not decay");
}

} // namespace rafm
