#pragma once

#include "rafm/matrix.hpp"
#include "rafm/prng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rafm {

// 1D Wasserstein-1. Equal sizes: mean |sorted a - sorted b|. Unequal sizes:
// exact integral of |F_a^{-1} - F_b^{-1}| over the merged quantile breakpoints.
double w1_1d(std::vector<double> a, std::vector<double> b);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_2sample(std::vector<double> a, std::vector<double> b);

// Mean of w1_1d over random unit projection directions.
double sliced_w1(const Matrix& a, const Matrix& b, std::size_t n_proj, Prng& rng);
double sliced_w1_dirs(const Matrix& a, const Matrix& b, const Matrix& dirs);

// Sliced W1 between unit-normalized directions, averaged over radial bins cut
// at the test-set radial quantiles and weighted by combined bin counts. Bins
// empty on either side are skipped and counted.
struct AngularSwResult {
    double value = 0.0;
    std::size_t skipped_bins = 0;
};
AngularSwResult angular_sw(const Matrix& a, const Matrix& b,
                           const std::vector<double>& test_radii, std::size_t n_bins,
                           std::size_t n_proj, Prng& rng);

// Unbiased RBF-kernel MMD with median-heuristic bandwidth (median of nonzero
// pairwise distances of the concatenation); sides larger than 2000 rows are
// subsampled. Returns sqrt of the clamped MMD^2 estimate.
double mmd_rbf(const Matrix& a, const Matrix& b, Prng& rng, std::size_t cap = 2000);

// nan_rate: rows with a non-finite entry. exploding_rate: finite rows with
// norm > 100 * median(test_radii), as a fraction of finite rows.
// invalid_rate = nan_rate + (1 - nan_rate) * exploding_rate.
struct StabilityRates {
    double nan_rate = 0.0;
    double exploding_rate = 0.0;
    double invalid_rate = 0.0;
};
StabilityRates stability(const Matrix& raw, const std::vector<double>& test_radii);

// Copy of raw without the non-finite rows.
Matrix finite_rows(const Matrix& raw);

struct MetricsReport {
    double radial_w1 = 0.0;
    double ks = 0.0;
    double sliced = 0.0;
    std::optional<double> angular;
    std::optional<double> mmd;
    StabilityRates rates;
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    std::size_t checkpoint_step = 0;
};

struct EvalOptions {
    std::size_t n_proj = 500;
    bool with_angular = false;
    bool with_mmd = false;
};

// Full evaluation of raw generated samples against the test split. Distances
// are computed on the finite rows; exploding rows stay in.
MetricsReport evaluate_samples(const Matrix& raw_gen, const Matrix& test,
                               const EvalOptions& opts, Prng& rng);

} // namespace rafm
