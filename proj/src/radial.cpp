#include "rafm/radial.hpp"

#include "rafm/metrics.hpp"
#include "rafm/quadrature.hpp"
#include "rafm/samplers.hpp"
#include "rafm/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rafm {

RadialLaw empirical_law(std::vector<double> radii) {
    if (radii.empty())
        throw std::invalid_argument("empirical_law: no radii");
    std::sort(radii.begin(), radii.end());
    RadialLaw law;
    law.kind = RadialLaw::Kind::Empirical;
    law.support_max = radii.back();
    law.radii = std::move(radii);
    return law;
}

RadialLaw fit_empirical_radial(const Matrix& train) {
    if (train.rows == 0)
        throw std::invalid_argument("fit_empirical_radial: empty training set");
    std::vector<double> radii;
    radii.reserve(train.rows);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < train.rows; ++i) {
        double r = norm(train.row(i));
        if (r > 0.0 && std::isfinite(r))
            radii.push_back(r);
        else
            ++dropped;
    }
    if (radii.empty())
        throw std::invalid_argument("fit_empirical_radial: all rows had zero norm");
    RadialLaw law = empirical_law(std::move(radii));
    law.dropped_rows = dropped;
    return law;
}

RadialLaw chi_law(std::size_t d) {
    RadialLaw law;
    law.kind = RadialLaw::Kind::ChiD;
    law.d = d;
    law.support_max = std::numeric_limits<double>::infinity();
    return law;
}

RadialLaw oracle_law(std::function<std::vector<double>(Prng&, std::size_t)> resample) {
    RadialLaw law;
    law.kind = RadialLaw::Kind::Oracle;
    law.resample = std::move(resample);
    law.support_max = std::numeric_limits<double>::infinity();
    return law;
}

double radial_quantile(const RadialLaw& law, double u) {
    if (u <= 0.0 || u > 1.0)
        throw std::domain_error("radial_quantile: u must be in (0,1]");
    switch (law.kind) {
    case RadialLaw::Kind::Empirical: {
        // inverse empirical CDF: index ceil(n*u)
        auto n = static_cast<double>(law.radii.size());
        auto idx = static_cast<std::size_t>(std::ceil(n * u));
        if (idx < 1) idx = 1;
        return law.radii[idx - 1];
    }
    case RadialLaw::Kind::ChiD:
        return chi_quantile(u, law.d);
    case RadialLaw::Kind::Oracle:
        break;
    }
    throw std::invalid_argument("radial_quantile: oracle law has no quantile function");
}

std::vector<double> sample_radial(const RadialLaw& law, Prng& rng, std::size_t m) {
    std::vector<double> out(m);
    if (law.kind == RadialLaw::Kind::Oracle) {
        out = law.resample(rng, m);
        return out;
    }
    for (std::size_t j = 0; j < m; ++j)
        out[j] = radial_quantile(law, rng.uniform_pos());
    return out;
}

SourceSampler gaussian_source(std::size_t d) {
    SourceSampler s;
    s.kind = SourceSampler::Kind::Gaussian;
    s.d = d;
    return s;
}

SourceSampler radial_source(RadialLaw law, std::size_t d) {
    SourceSampler s;
    s.kind = SourceSampler::Kind::Radial;
    s.d = d;
    s.law = std::move(law);
    return s;
}

SourceDraw sample_source(const SourceSampler& src, Prng& radius_rng, Prng& dir_rng,
                         std::size_t m) {
    SourceDraw out;
    if (src.kind == SourceSampler::Kind::Gaussian) {
        out.x = sample_gaussian(radius_rng, m, src.d);
        return out;
    }
    out.radii = sample_radial(src.law, radius_rng, m);
    out.x = sample_uniform_sphere(dir_rng, m, src.d);
    for (std::size_t i = 0; i < m; ++i) {
        double r = out.radii[i];
        for (double& v : out.x.row(i))
            v *= r;
    }
    return out;
}

double q_rad_logdensity(std::span<const double> x,
                        const std::function<double(double)>& radial_pdf) {
    double r = norm(x);
    if (r <= 0.0)
        throw std::domain_error("q_rad_logdensity: zero-norm point");
    std::size_t d = x.size();
    return std::log(radial_pdf(r)) - log_sphere_area(d) -
           static_cast<double>(d - 1) * std::log(r);
}

double radial_kl_gap(const std::function<double(double)>& radial_pdf, std::size_t d) {
    auto integrand = [&](double r) {
        double p = radial_pdf(r);
        // 0 log 0 = 0; log-space reference so the deep tail cannot underflow
        if (p <= 0.0) return 0.0;
        return p * (std::log(p) - log_chi_pdf(r, d));
    };
    double r_max = find_tail_cutoff(radial_pdf);
    double total = integrate_adaptive(integrand, 1e-12, r_max, 1e-10);
    // extend until segments vanish; non-shrinking segments mean a heavy tail
    double lo = r_max;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 60; ++i) {
        double seg = integrate_adaptive(integrand, lo, 2.0 * lo, 1e-12);
        if (std::abs(seg) < 1e-11) return std::max(total, 0.0);
        if (std::abs(seg) >= prev || !std::isfinite(seg))
            return std::numeric_limits<double>::infinity();
        total += seg;
        prev = std::abs(seg);
        lo *= 2.0;
    }
    return std::numeric_limits<double>::infinity();
}

KlCheck kl_decomposition_check(const std::function<double(double)>& radial_pdf,
                               const std::function<double(Prng&)>& radial_draw,
                               std::size_t d, Prng& rng, std::size_t n_mc) {
    KlCheck out;
    out.rhs = radial_kl_gap(radial_pdf, d);
    std::vector<double> u(d);
    double sum = 0.0, sum2 = 0.0, qsum = 0.0, qsum2 = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        double r = radial_draw(rng);
        draw_unit_direction(rng, u);
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = r * u[j];
        double lp = q_rad_logdensity(x, radial_pdf);
        double lphi = log_gaussian_density(r * r, d);
        double ratio = lp - lphi;
        sum += ratio;
        sum2 += ratio * ratio;
        double qratio = lp - q_rad_logdensity(x, radial_pdf);
        qsum += qratio;
        qsum2 += qratio * qratio;
    }
    auto n = static_cast<double>(n_mc);
    out.lhs = sum / n;
    out.stderr_lhs = std::sqrt(std::max(sum2 / n - out.lhs * out.lhs, 0.0) / n);
    out.qrad_kl = qsum / n;
    out.stderr_qrad = std::sqrt(std::max(qsum2 / n - out.qrad_kl * out.qrad_kl, 0.0) / n);
    return out;
}

double dkw_band(std::size_t n, double delta) {
    if (n < 1 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("dkw_band: need n >= 1, delta in (0,1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

TransferCheck coupling_cost_vs_sliced(const RadialLaw& a, const RadialLaw& b,
                                      std::size_t d, Prng& rng, std::size_t m) {
    Prng rq = rng.split(4 * rng.stream() + 0);
    Prng rb = rng.split(4 * rng.stream() + 1);
    Prng ru = rng.split(4 * rng.stream() + 2);
    Prng rproj = rng.split(4 * rng.stream() + 3);

    // comonotone coupling: both inverse CDFs evaluated at one shared uniform;
    // quantile-free oracle laws fall back to sorted independent draws
    std::vector<double> radii_a(m), radii_b(m);
    bool has_quantile = a.kind != RadialLaw::Kind::Oracle &&
                        b.kind != RadialLaw::Kind::Oracle;
    if (has_quantile) {
        for (std::size_t i = 0; i < m; ++i) {
            double u = rq.uniform_pos();
            radii_a[i] = radial_quantile(a, u);
            radii_b[i] = radial_quantile(b, u);
        }
    } else {
        radii_a = sample_radial(a, rq, m);
        radii_b = sample_radial(b, rb, m);
        std::sort(radii_a.begin(), radii_a.end());
        std::sort(radii_b.begin(), radii_b.end());
    }

    TransferCheck out;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double gap = std::abs(radii_a[i] - radii_b[i]);
        sum += gap;
        sum2 += gap * gap;
    }
    auto n = static_cast<double>(m);
    out.coupling_w1 = sum / n;
    out.stderr_coupling =
        std::sqrt(std::max(sum2 / n - out.coupling_w1 * out.coupling_w1, 0.0) / n);

    // independent directions for the two clouds
    Matrix xa = sample_uniform_sphere(ru, m, d);
    Matrix xb = sample_uniform_sphere(ru, m, d);
    for (std::size_t i = 0; i < m; ++i) {
        for (double& v : xa.row(i)) v *= radii_a[i];
        for (double& v : xb.row(i)) v *= radii_b[i];
    }
    out.sliced_w1 = sliced_w1(xa, xb, 500, rproj);
    return out;
}

void save_radii_csv(const std::vector<double>& radii, const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("save_radii_csv: cannot open " + path);
    f.precision(17);
    for (double r : radii)
        f << r << "\n";
}

std::vector<double> load_radii_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("load_radii_csv: cannot open " + path);
    std::vector<double> out;
    double v;
    while (f >> v)
        out.push_back(v);
    return out;
}

} // namespace rafm
