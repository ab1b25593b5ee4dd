#pragma once

#include "rafm/matrix.hpp"
#include "rafm/prng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rafm {

// A sampleable law over radii. Empirical holds the sorted training norms and
// samples by inverse-CDF lookup; Oracle defers to a fresh-draw callback;
// ChiD is the norm law of a standard Gaussian in dimension d.
struct RadialLaw {
    enum class Kind { Empirical, Oracle, ChiD };
    Kind kind = Kind::Empirical;
    std::vector<double> radii;  // Empirical only, ascending
    std::size_t dropped_rows = 0;
    std::function<std::vector<double>(Prng&, std::size_t)> resample;  // Oracle only
    std::size_t d = 0;  // ChiD only
    double support_max = 0.0;
};

RadialLaw empirical_law(std::vector<double> radii);
RadialLaw fit_empirical_radial(const Matrix& train);
RadialLaw chi_law(std::size_t d);
RadialLaw oracle_law(std::function<std::vector<double>(Prng&, std::size_t)> resample);

std::vector<double> sample_radial(const RadialLaw& law, Prng& rng, std::size_t m);

// Inverse CDF at u in (0,1]; Empirical returns r_(ceil(n u)). Oracle laws have
// no quantile function and throw.
double radial_quantile(const RadialLaw& law, double u);

// Source distribution at t=0: standard Gaussian, or R*U with R from a radial
// law and U uniform on the sphere.
struct SourceSampler {
    enum class Kind { Gaussian, Radial };
    Kind kind = Kind::Gaussian;
    std::size_t d = 0;
    RadialLaw law;  // Radial only
};

SourceSampler gaussian_source(std::size_t d);
SourceSampler radial_source(RadialLaw law, std::size_t d);

// Draws m rows. Radial rows are R_j * u_j built so that the returned radii
// multiset matches the row norms bit-for-bit; radii is empty for Gaussian.
// Radius and direction use the two separate streams.
struct SourceDraw {
    Matrix x;
    std::vector<double> radii;
};
SourceDraw sample_source(const SourceSampler& src, Prng& radius_rng, Prng& dir_rng,
                         std::size_t m);

// log q_rad(x) = log p_R(||x||) - log|S^{d-1}| - (d-1) log||x||.
double q_rad_logdensity(std::span<const double> x,
                        const std::function<double(double)>& radial_pdf);

// KL(p_R || chi_d) by quadrature; +inf when the integral fails to converge.
double radial_kl_gap(const std::function<double(double)>& radial_pdf, std::size_t d);

// Monte-Carlo check of the radial KL decomposition for isotropic data R*U:
// lhs estimates KL(p_data || N(0,I_d)), rhs is the quadrature radial gap, and
// qrad_kl estimates KL(p_data || q_rad) which is 0 for isotropic data.
struct KlCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_lhs = 0.0;
    double qrad_kl = 0.0;
    double stderr_qrad = 0.0;
};
KlCheck kl_decomposition_check(const std::function<double(double)>& radial_pdf,
                               const std::function<double(Prng&)>& radial_draw,
                               std::size_t d, Prng& rng, std::size_t n_mc);

// DKW band half-width sqrt(log(2/delta) / (2n)).
double dkw_band(std::size_t n, double delta);

// Comonotone-coupling W1 between two radial laws vs the sliced W1 between the
// d-dimensional sources they induce. The transfer bound predicts
// sliced_w1 <= coupling_w1 + 3 * stderr.
struct TransferCheck {
    double coupling_w1 = 0.0;
    double sliced_w1 = 0.0;
    double stderr_coupling = 0.0;
};
TransferCheck coupling_cost_vs_sliced(const RadialLaw& a, const RadialLaw& b,
                                      std::size_t d, Prng& rng, std::size_t m);

// Sorted-radii artifact, one value per line.
void save_radii_csv(const std::vector<double>& radii, const std::string& path);
std::vector<double> load_radii_csv(const std::string& path);

} // namespace rafm
