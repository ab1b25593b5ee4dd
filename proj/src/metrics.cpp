#include "rafm/metrics.hpp"

#include "rafm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rafm {

double w1_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("w1_1d: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += std::abs(a[i] - b[i]);
        return s / static_cast<double>(a.size());
    }
    // integral of |F_a^{-1}(u) - F_b^{-1}(u)| over the merged breakpoints
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double u = 0.0, total = 0.0;
    while (ia < a.size() && ib < b.size()) {
        double next_a = static_cast<double>(ia + 1) / na;
        double next_b = static_cast<double>(ib + 1) / nb;
        double next = std::min(next_a, next_b);
        total += (next - u) * std::abs(a[ia] - b[ib]);
        u = next;
        if (next_a <= next) ++ia;
        if (next_b <= next) ++ib;
    }
    return total;
}

double ks_2sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_2sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double best = 0.0;
    while (ia < a.size() || ib < b.size()) {
        double v;
        if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib]))
            v = a[ia];
        else
            v = b[ib];
        while (ia < a.size() && a[ia] == v) ++ia;
        while (ib < b.size() && b[ib] == v) ++ib;
        double gap = std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
        best = std::max(best, gap);
    }
    return best;
}

double sliced_w1_dirs(const Matrix& a, const Matrix& b, const Matrix& dirs) {
    if (a.cols != b.cols || a.cols != dirs.cols)
        throw std::invalid_argument("sliced_w1: dimension mismatch");
    double total = 0.0;
    std::vector<double> pa(a.rows), pb(b.rows);
    for (std::size_t k = 0; k < dirs.rows; ++k) {
        auto w = dirs.row(k);
        for (std::size_t i = 0; i < a.rows; ++i)
            pa[i] = dot(a.row(i), w);
        for (std::size_t i = 0; i < b.rows; ++i)
            pb[i] = dot(b.row(i), w);
        total += w1_1d(pa, pb);
    }
    return total / static_cast<double>(dirs.rows);
}

double sliced_w1(const Matrix& a, const Matrix& b, std::size_t n_proj, Prng& rng) {
    Matrix dirs = sample_uniform_sphere(rng, n_proj, a.cols);
    return sliced_w1_dirs(a, b, dirs);
}

namespace {

Matrix normalize_rows(const Matrix& a, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), a.cols);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        auto src = a.row(idx[k]);
        double r = std::max(norm(src), 1e-12);
        for (std::size_t j = 0; j < a.cols; ++j)
            out(k, j) = src[j] / r;
    }
    return out;
}

std::size_t bin_of(double r, const std::vector<double>& edges) {
    std::size_t k = 0;
    while (k < edges.size() && r > edges[k]) ++k;
    return k;
}

} // namespace

AngularSwResult angular_sw(const Matrix& a, const Matrix& b,
                           const std::vector<double>& test_radii, std::size_t n_bins,
                           std::size_t n_proj, Prng& rng) {
    if (test_radii.empty())
        throw std::invalid_argument("angular_sw: empty test radii");
    std::vector<double> sorted = test_radii;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (std::size_t k = 1; k < n_bins; ++k)
        edges.push_back(sorted[k * sorted.size() / n_bins]);

    std::vector<std::vector<std::size_t>> bins_a(n_bins), bins_b(n_bins);
    for (std::size_t i = 0; i < a.rows; ++i)
        bins_a[bin_of(norm(a.row(i)), edges)].push_back(i);
    for (std::size_t i = 0; i < b.rows; ++i)
        bins_b[bin_of(norm(b.row(i)), edges)].push_back(i);

    Matrix dirs = sample_uniform_sphere(rng, n_proj, a.cols);
    AngularSwResult res;
    double weighted = 0.0, weight = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        if (bins_a[k].empty() || bins_b[k].empty()) {
            ++res.skipped_bins;
            continue;
        }
        Matrix ua = normalize_rows(a, bins_a[k]);
        Matrix ub = normalize_rows(b, bins_b[k]);
        double w = static_cast<double>(bins_a[k].size() + bins_b[k].size());
        weighted += w * sliced_w1_dirs(ua, ub, dirs);
        weight += w;
    }
    res.value = (weight > 0.0) ? weighted / weight : 0.0;
    return res;
}

namespace {

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, Prng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n <= cap) return idx;
    for (std::size_t i = 0; i < cap; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double sqdist(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double diff = x[j] - y[j];
        s += diff * diff;
    }
    return s;
}

} // namespace

double mmd_rbf(const Matrix& a, const Matrix& b, Prng& rng, std::size_t cap) {
    if (a.cols != b.cols)
        throw std::invalid_argument("mmd_rbf: dimension mismatch");
    auto ia = subsample_indices(a.rows, cap, rng);
    auto ib = subsample_indices(b.rows, cap, rng);
    std::size_t m = ia.size(), n = ib.size();
    if (m < 2 || n < 2)
        throw std::invalid_argument("mmd_rbf: need at least 2 rows per side");

    auto row_of = [&](std::size_t k) {
        return k < m ? a.row(ia[k]) : b.row(ib[k - m]);
    };
    std::size_t total = m + n;
    std::vector<double> dists;
    dists.reserve(total * (total - 1) / 2);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = i + 1; j < total; ++j) {
            double d2 = sqdist(row_of(i), row_of(j));
            if (d2 > 0.0) dists.push_back(std::sqrt(d2));
        }
    if (dists.empty())
        throw std::runtime_error("mmd_rbf: all pairwise distances are zero");
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    double h = *mid;
    double gamma = 1.0 / (2.0 * h * h);

    double kaa = 0.0, kbb = 0.0, kab = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            kaa += std::exp(-gamma * sqdist(a.row(ia[i]), a.row(ia[j])));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            kbb += std::exp(-gamma * sqdist(b.row(ib[i]), b.row(ib[j])));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            kab += std::exp(-gamma * sqdist(a.row(ia[i]), b.row(ib[j])));

    double md = static_cast<double>(m), nd = static_cast<double>(n);
    double mmd2 = 2.0 * kaa / (md * (md - 1.0)) + 2.0 * kbb / (nd * (nd - 1.0)) -
                  2.0 * kab / (md * nd);
    return std::sqrt(std::max(mmd2, 0.0));
}

StabilityRates stability(const Matrix& raw, const std::vector<double>& test_radii) {
    if (test_radii.empty())
        throw std::invalid_argument("stability: empty test radii");
    std::vector<double> sorted = test_radii;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    double cutoff = 100.0 * median;

    std::size_t n_nan = 0, n_expl = 0, n_fin = 0;
    for (std::size_t i = 0; i < raw.rows; ++i) {
        if (!row_finite(raw, i)) {
            ++n_nan;
            continue;
        }
        ++n_fin;
        if (norm(raw.row(i)) > cutoff) ++n_expl;
    }
    StabilityRates r;
    double n = static_cast<double>(raw.rows);
    r.nan_rate = (n > 0) ? static_cast<double>(n_nan) / n : 0.0;
    r.exploding_rate = (n_fin > 0) ? static_cast<double>(n_expl) / static_cast<double>(n_fin) : 0.0;
    r.invalid_rate = r.nan_rate + (1.0 - r.nan_rate) * r.exploding_rate;
    return r;
}

Matrix finite_rows(const Matrix& raw) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < raw.rows; ++i)
        if (row_finite(raw, i)) keep.push_back(i);
    Matrix out(keep.size(), raw.cols);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        auto src = raw.row(keep[k]);
        std::copy(src.begin(), src.end(), out.row(k).begin());
    }
    return out;
}

MetricsReport evaluate_samples(const Matrix& raw_gen, const Matrix& test,
                               const EvalOptions& opts, Prng& rng) {
    MetricsReport rep;
    std::vector<double> test_radii = row_norms(test);
    rep.rates = stability(raw_gen, test_radii);
    Matrix gen = finite_rows(raw_gen);
    if (gen.rows == 0)
        throw std::runtime_error("evaluate_samples: no finite generated rows");
    rep.radial_w1 = w1_1d(row_norms(gen), test_radii);
    rep.ks = ks_2sample(row_norms(gen), test_radii);
    rep.sliced = sliced_w1(gen, test, opts.n_proj, rng);
    if (opts.with_angular)
        rep.angular = angular_sw(gen, test, test_radii, 4, 200, rng).value;
    if (opts.with_mmd)
        rep.mmd = mmd_rbf(gen, test, rng);
    return rep;
}

} // namespace rafm
