#pragma once

#include "rafm/matrix.hpp"
#include "rafm/mlp.hpp"
#include "rafm/prng.hpp"
#include "rafm/radial.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace rafm {

enum class Method { gaussian_fm, source_only, rafm };
enum class RadialMode { empirical, oracle };

// Training-time description of one method. rafm ignores `source` during
// training (the radius is copied from the target row); source_only draws its
// x_0 from it; gaussian_fm uses a standard Gaussian.
struct MethodSpec {
    Method method = Method::gaussian_fm;
    SourceSampler source;
    RadialMode radial_mode = RadialMode::empirical;
};

struct PathBatch {
    std::vector<double> t;  // B
    Matrix x_t;             // B x d
    Matrix target_v;        // B x d
    std::size_t dropped_zero_rows = 0;
};

// Linear path: x_t = (1-t) x_0 + t x_1, target x_1 - x_0, x_0 from `source`.
PathBatch make_batch_linear(const Matrix& x1, const SourceSampler& source, Prng& rng);

// Matched-radius spherical path: x_0 = ||x_1|| u_0, x_t on the geodesic,
// target its analytic velocity. Zero-norm x_1 rows are dropped and counted.
PathBatch make_batch_rafm(const Matrix& x1, Prng& rng);

// Mean squared error over batch rows and coordinates (divided by B*d), with
// parameter gradients. Throws on a non-finite loss.
template <typename T>
double cfm_loss(const Mlp<T>& model, const PathBatch& batch, MlpWorkspace<T>& ws,
                std::vector<T>& grads);

struct TrainConfig {
    std::size_t steps = 10000;
    std::size_t batch = 256;
    std::size_t checkpoint_every = 5000;
    double lr = 1e-3;
};

struct TrainResult {
    Mlp<float> model;
    std::vector<std::pair<std::size_t, double>> loss_log;  // (step, loss)
    std::vector<std::pair<std::size_t, Mlp<float>>> checkpoints;
    std::size_t dropped_zero_rows = 0;
    bool diverged = false;
    std::size_t diverged_at_step = 0;
};

// Adam on mini-batches drawn with replacement from train_data. Checkpoints at
// every multiple of checkpoint_every and at the final step. On divergence the
// last finite state is returned with the flag set.
TrainResult train(const MethodSpec& spec, const Matrix& train_data, const TrainConfig& cfg,
                  Prng& init_rng, Prng& batch_rng);

} // namespace rafm
