#include "rafm/ode.hpp"

#include "rafm/samplers.hpp"
#include "rafm/sphere.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rafm {

namespace {

// stage = x + h * coef * k, with dead rows zeroed so the field never sees a
// non-finite state
void build_stage(const Matrix& x, const Matrix& k, double hc, const std::vector<bool>& alive,
                 Matrix& stage) {
    for (std::size_t i = 0; i < x.rows; ++i) {
        auto out = stage.row(i);
        if (!alive[i]) {
            std::fill(out.begin(), out.end(), 0.0);
            continue;
        }
        auto xi = x.row(i);
        auto ki = k.row(i);
        for (std::size_t j = 0; j < x.cols; ++j)
            out[j] = xi[j] + hc * ki[j];
    }
}

void kill_non_finite(const Matrix& stage, std::vector<bool>& alive) {
    for (std::size_t i = 0; i < stage.rows; ++i)
        if (alive[i] && !row_finite(stage, i)) alive[i] = false;
}

} // namespace

Matrix integrate(const OdeField& field, const Matrix& x0, const SamplerConfig& cfg,
                 const std::function<void(std::size_t, const Matrix&)>& observer) {
    if (cfg.steps < 1)
        throw std::invalid_argument("integrate: steps must be >= 1");
    std::size_t n = x0.rows, d = x0.cols;
    double h = 1.0 / static_cast<double>(cfg.steps);

    Matrix x = x0;
    std::vector<bool> alive(n, true);
    kill_non_finite(x, alive);

    Matrix stage(n, d), k1(n, d), k2(n, d), k3(n, d), k4(n, d);
    auto eval = [&](double t, const Matrix& at, Matrix& k) {
        field(t, at, k);
        if (cfg.project)
            for (std::size_t i = 0; i < n; ++i)
                if (alive[i]) tangential_project_inplace(at.row(i), k.row(i),
                                                         cfg.projection_skip_norm);
        kill_non_finite(k, alive);
    };

    for (std::size_t s = 0; s < cfg.steps; ++s) {
        double t = h * static_cast<double>(s);
        build_stage(x, k1, 0.0, alive, stage);  // copy with dead rows zeroed
        eval(t, stage, k1);
        build_stage(x, k1, 0.5 * h, alive, stage);
        kill_non_finite(stage, alive);
        eval(t + 0.5 * h, stage, k2);
        build_stage(x, k2, 0.5 * h, alive, stage);
        kill_non_finite(stage, alive);
        eval(t + 0.5 * h, stage, k3);
        build_stage(x, k3, h, alive, stage);
        kill_non_finite(stage, alive);
        eval(t + h, stage, k4);
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            auto xi = x.row(i);
            for (std::size_t j = 0; j < d; ++j)
                xi[j] += h / 6.0 *
                         (k1(i, j) + 2.0 * k2(i, j) + 2.0 * k3(i, j) + k4(i, j));
        }
        kill_non_finite(x, alive);
        if (observer) observer(s + 1, x);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!alive[i])
            std::fill(x.row(i).begin(), x.row(i).end(),
                      std::numeric_limits<double>::quiet_NaN());
    return x;
}

OdeField model_field(const Mlp<float>& model) {
    auto ws = std::make_shared<MlpWorkspace<float>>();
    return [model, ws](double t, const Matrix& x, Matrix& v) {
        std::size_t n = x.rows, d = x.cols;
        std::vector<float> tf(n, static_cast<float>(t));
        std::vector<float> xf(n * d);
        for (std::size_t k = 0; k < n * d; ++k) {
            float f = static_cast<float>(x.data[k]);
            xf[k] = std::isfinite(f) ? f : 0.0f;  // overflowed cast: row dies on output
        }
        mlp_forward(model, std::span<const float>(tf), std::span<const float>(xf), n, *ws);
        if (v.rows != n || v.cols != d) v = Matrix(n, d);
        for (std::size_t k = 0; k < n * d; ++k) {
            float f = static_cast<float>(x.data[k]);
            v.data[k] = std::isfinite(f) ? static_cast<double>(ws->out[k])
                                         : std::numeric_limits<double>::quiet_NaN();
        }
        return;
    };
}

Matrix generate(const Mlp<float>& model, const SourceSampler& source, Prng& radius_rng,
                Prng& dir_rng, std::size_t m, const SamplerConfig& cfg) {
    SourceDraw start = sample_source(source, radius_rng, dir_rng, m);
    return integrate(model_field(model), start.x, cfg);
}

double norm_drift_probe(std::size_t d, std::size_t steps, Prng& rng, bool project) {
    // random skew-symmetric generator: an exactly norm-preserving field
    Matrix omega(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            double g = rng.gaussian();
            omega(i, j) = g;
            omega(j, i) = -g;
        }
    Matrix x0 = sample_uniform_sphere(rng, 64, d);

    OdeField field = [&omega](double, const Matrix& x, Matrix& v) {
        if (v.rows != x.rows || v.cols != x.cols) v = Matrix(x.rows, x.cols);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t a = 0; a < x.cols; ++a) {
                double s = 0.0;
                for (std::size_t b = 0; b < x.cols; ++b)
                    s += omega(a, b) * x(i, b);
                v(i, a) = s;
            }
    };

    SamplerConfig cfg;
    cfg.steps = steps;
    cfg.project = project;
    double drift = 0.0;
    auto observer = [&drift](std::size_t, const Matrix& x) {
        for (std::size_t i = 0; i < x.rows; ++i)
            drift = std::max(drift, std::abs(norm(x.row(i)) - 1.0));
    };
    integrate(field, x0, cfg, observer);
    return drift;
}

GronwallProbe gronwall_probe(double L, double eps, std::size_t d, std::size_t steps) {
    if (L < 0.0 || eps < 0.0)
        throw std::invalid_argument("gronwall_probe: L and eps must be >= 0");
    Matrix x0(1, d);  // zero start; the gap of a linear ODE ignores it
    SamplerConfig cfg;
    cfg.steps = steps;

    OdeField base = [L](double, const Matrix& x, Matrix& v) {
        if (v.rows != x.rows || v.cols != x.cols) v = Matrix(x.rows, x.cols);
        for (std::size_t k = 0; k < x.data.size(); ++k)
            v.data[k] = L * x.data[k];
    };
    OdeField perturbed = [L, eps](double, const Matrix& x, Matrix& v) {
        if (v.rows != x.rows || v.cols != x.cols) v = Matrix(x.rows, x.cols);
        for (std::size_t k = 0; k < x.data.size(); ++k)
            v.data[k] = L * x.data[k];
        for (std::size_t i = 0; i < x.rows; ++i)
            v(i, 0) += eps;
    };

    Matrix xa = integrate(base, x0, cfg);
    Matrix xb = integrate(perturbed, x0, cfg);
    GronwallProbe out;
    double s = 0.0;
    for (std::size_t k = 0; k < xa.data.size(); ++k) {
        double diff = xa.data[k] - xb.data[k];
        s += diff * diff;
    }
    out.observed_gap = std::sqrt(s);
    out.bound = std::exp(L) * eps;
    return out;
}

} // namespace rafm
