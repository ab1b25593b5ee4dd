#pragma once

#include <span>
#include <vector>

namespace rafm {

// A pair of equal-radius points with their geodesic data on R*S^{d-1}.
struct GeodesicPair {
    std::vector<double> x0, x1;
    std::vector<double> u0, u1;  // unit directions; u1 replaced when antipodal
    double R = 0.0;
    double theta = 0.0;          // angle in [0, pi)
    bool antipodal = false;
};

// Normalize, validate radii (1e-6 relative), resolve the antipodal case by a
// deterministic completion: u1 is replaced by the Gram-Schmidt orthonormalized
// first standard basis vector not parallel to u0, with theta = pi - 1e-7.
GeodesicPair geodesic_pair(std::span<const double> x0, std::span<const double> x1);

// psi_t = R * [sin((1-t)theta) u0 + sin(t theta) u1] / sin(theta).
std::vector<double> slerp(const GeodesicPair& p, double t);

// d/dt psi_t = R * (theta/sin theta) * [-cos((1-t)theta) u0 + cos(t theta) u1].
std::vector<double> slerp_velocity(const GeodesicPair& p, double t);

// Log_x(y) on the radius-R sphere: (phi/sin phi) * (y - (<x,y>/R^2) x),
// phi = arccos(<x,y>/R^2).
std::vector<double> log_map(std::span<const double> x, std::span<const double> y);

// u_t(x | x1) = Log_x(x1) / (1 - t).
std::vector<double> conditional_field(std::span<const double> x, std::span<const double> x1,
                                      double t);

// v minus its radial component at x; returns v unchanged when ||x|| < skip_norm.
std::vector<double> tangential_project(std::span<const double> x, std::span<const double> v,
                                       double skip_norm = 1e-3);
void tangential_project_inplace(std::span<const double> x, std::span<double> v,
                                double skip_norm = 1e-3);

} // namespace rafm
