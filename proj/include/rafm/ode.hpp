#pragma once

#include "rafm/matrix.hpp"
#include "rafm/mlp.hpp"
#include "rafm/prng.hpp"
#include "rafm/radial.hpp"

#include <functional>

namespace rafm {

struct SamplerConfig {
    std::size_t steps = 128;  // NFE = 4 * steps
    bool project = false;
    double projection_skip_norm = 1e-3;
};

// Batched field: fills v (same shape as x) with the velocity at time t.
using OdeField = std::function<void(double t, const Matrix& x, Matrix& v)>;

// Classic fixed-step RK4 from t=0 to t=1. With cfg.project every stage
// velocity is tangentially projected at its own evaluation point. Rows whose
// state turns non-finite are frozen, carried to the end, and returned as
// all-NaN so the stability metrics can count them. The optional observer runs
// after every accepted step.
Matrix integrate(const OdeField& field, const Matrix& x0, const SamplerConfig& cfg,
                 const std::function<void(std::size_t step, const Matrix& x)>& observer = {});

// Velocity field of a trained model: doubles in, float32 evaluation, doubles out.
OdeField model_field(const Mlp<float>& model);

// Draw m starts from the source and integrate the model field.
Matrix generate(const Mlp<float>& model, const SourceSampler& source, Prng& radius_rng,
                Prng& dir_rng, std::size_t m, const SamplerConfig& cfg);

// Integrates the rotation field v = Omega x (Omega skew-symmetric, entries
// from rng) from unit-sphere starts; returns max_t max_rows | ||x|| - 1 |.
double norm_drift_probe(std::size_t d, std::size_t steps, Prng& rng, bool project);

// Integrates v = L x and v = L x + eps e_1 from the same start; the final
// trajectory gap obeys gap <= e^L * eps.
struct GronwallProbe {
    double observed_gap = 0.0;
    double bound = 0.0;
};
GronwallProbe gronwall_probe(double L, double eps, std::size_t d,
                             std::size_t steps = 128);

} // namespace rafm
