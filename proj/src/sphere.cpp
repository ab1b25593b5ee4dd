#include "rafm/sphere.hpp"

#include "rafm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rafm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSmallAngle = 1e-6;
constexpr double kAntipodalTheta = kPi - 1e-7;

double clamp1(double c) { return std::clamp(c, -1.0, 1.0); }

} // namespace

GeodesicPair geodesic_pair(std::span<const double> x0, std::span<const double> x1) {
    if (x0.size() != x1.size())
        throw std::invalid_argument("geodesic_pair: dimension mismatch");
    std::size_t d = x0.size();
    double n0 = norm(x0), n1 = norm(x1);
    if (n0 <= 0.0 || n1 <= 0.0)
        throw std::domain_error("geodesic_pair: zero-norm endpoint");
    if (std::abs(n0 - n1) > 1e-6 * n1)
        throw std::domain_error("geodesic_pair: radius mismatch");

    GeodesicPair p;
    p.x0.assign(x0.begin(), x0.end());
    p.x1.assign(x1.begin(), x1.end());
    p.R = n1;
    p.u0.resize(d);
    p.u1.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        p.u0[j] = x0[j] / n0;
        p.u1[j] = x1[j] / n1;
    }
    double c = clamp1(dot(p.u0, p.u1));
    if (c < -1.0 + 1e-12) {
        // antipodal: pick a deterministic great circle through u0 and travel
        // theta = pi - 1e-7 along it instead of the undefined full half-turn
        p.antipodal = true;
        std::size_t k = 0;
        while (k < d && std::abs(p.u0[k]) > 1.0 - 1e-9) ++k;
        if (k == d) k = (d > 1) ? 1 : 0;
        std::vector<double> w(d, 0.0);
        w[k] = 1.0;
        double proj = p.u0[k];
        for (std::size_t j = 0; j < d; ++j)
            w[j] -= proj * p.u0[j];
        double wn = norm(w);
        if (wn <= 0.0)
            throw std::domain_error("geodesic_pair: antipodal completion failed in d=1");
        p.theta = kAntipodalTheta;
        double ct = std::cos(p.theta), st = std::sin(p.theta);
        for (std::size_t j = 0; j < d; ++j)
            p.u1[j] = ct * p.u0[j] + st * (w[j] / wn);
    } else {
        p.theta = std::acos(c);
    }
    return p;
}

std::vector<double> slerp(const GeodesicPair& p, double t) {
    if (t < 0.0 || t > 1.0)
        throw std::domain_error("slerp: t outside [0,1]");
    if (!p.antipodal) {
        if (t == 0.0) return p.x0;
        if (t == 1.0) return p.x1;
    }
    std::size_t d = p.u0.size();
    double a = 1.0 - t, b = t;
    double c0, c1;
    if (p.theta < kSmallAngle) {
        // sin(a*th)/sin(th) ~ a*(1 + (1-a^2) th^2/6)
        double th2 = p.theta * p.theta;
        c0 = a * (1.0 + (1.0 - a * a) * th2 / 6.0);
        c1 = b * (1.0 + (1.0 - b * b) * th2 / 6.0);
    } else {
        double s = std::sin(p.theta);
        c0 = std::sin(a * p.theta) / s;
        c1 = std::sin(b * p.theta) / s;
    }
    std::vector<double> out(d);
    for (std::size_t j = 0; j < d; ++j)
        out[j] = p.R * (c0 * p.u0[j] + c1 * p.u1[j]);
    return out;
}

std::vector<double> slerp_velocity(const GeodesicPair& p, double t) {
    if (t < 0.0 || t > 1.0)
        throw std::domain_error("slerp_velocity: t outside [0,1]");
    std::size_t d = p.u0.size();
    double pre;
    if (p.theta < kSmallAngle)
        pre = 1.0 + p.theta * p.theta / 6.0;
    else
        pre = p.theta / std::sin(p.theta);
    double c0 = -std::cos((1.0 - t) * p.theta);
    double c1 = std::cos(t * p.theta);
    std::vector<double> out(d);
    for (std::size_t j = 0; j < d; ++j)
        out[j] = p.R * pre * (c0 * p.u0[j] + c1 * p.u1[j]);
    return out;
}

std::vector<double> log_map(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("log_map: dimension mismatch");
    double nx = norm(x), ny = norm(y);
    if (nx <= 0.0 || ny <= 0.0)
        throw std::domain_error("log_map: zero-norm input");
    if (std::abs(nx - ny) > 1e-6 * ny)
        throw std::domain_error("log_map: points on different spheres");
    double r2 = nx * ny;
    double c = clamp1(dot(x, y) / r2);
    if (c < -1.0 + 1e-12)
        throw std::domain_error("log_map: antipodal points");
    double phi = std::acos(c);
    double coef = (phi < kSmallAngle) ? 1.0 + phi * phi / 6.0 : phi / std::sin(phi);
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = coef * (y[j] - c * x[j]);
    return out;
}

std::vector<double> conditional_field(std::span<const double> x, std::span<const double> x1,
                                      double t) {
    if (t >= 1.0)
        throw std::domain_error("conditional_field: t must be < 1");
    auto v = log_map(x, x1);
    double s = 1.0 / (1.0 - t);
    for (double& e : v) e *= s;
    return v;
}

std::vector<double> tangential_project(std::span<const double> x, std::span<const double> v,
                                       double skip_norm) {
    std::vector<double> out(v.begin(), v.end());
    tangential_project_inplace(x, out, skip_norm);
    return out;
}

void tangential_project_inplace(std::span<const double> x, std::span<double> v,
                                double skip_norm) {
    if (x.size() != v.size())
        throw std::invalid_argument("tangential_project: dimension mismatch");
    double n2 = dot(x, x);
    if (n2 < skip_norm * skip_norm) return;
    double a = dot(x, v) / n2;
    for (std::size_t j = 0; j < x.size(); ++j)
        v[j] -= a * x[j];
}

} // namespace rafm
