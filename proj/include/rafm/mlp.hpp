#pragma once

#include "rafm/prng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rafm {

// v_theta(t, x): Linear(d+1,128) -> Swish -> Linear(128,128) -> Swish ->
// Linear(128,128) -> Swish -> Linear(128,d). Input rows are [x; t].
// T = float for training runs, double for gradient checks.
template <typename T>
struct Mlp {
    static constexpr std::size_t width = 128;
    std::size_t d = 0;
    // flat layout: W1, b1, W2, b2, W3, b3, W4, b4; weights row-major (out, in)
    std::vector<T> params;

    static std::size_t param_count(std::size_t d) {
        return (d + 1) * width + width + width * width + width + width * width + width +
               width * d + d;
    }
};

// Fan-in uniform init, weights and biases in (-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename T>
Mlp<T> mlp_init(std::size_t d, Prng& rng);

// Cached activations for one batch; reused across steps. s* hold the sigmoid
// of the matching pre-activation so the backward pass never re-exponentiates.
template <typename T>
struct MlpWorkspace {
    std::size_t batch = 0;
    std::vector<T> input;                       // B x (d+1)
    std::vector<T> z1, s1, a1, z2, s2, a2, z3, s3, a3;  // B x width each
    std::vector<T> out;                         // B x d
    std::vector<T> wt_scratch;                  // transposed weights
    std::vector<T> grad_scratch;                // layer cotangents
};

// out[i] = v_theta(t[i], x[i]); x flattened B x d, t length B. Throws on
// non-finite inputs.
template <typename T>
void mlp_forward(const Mlp<T>& m, std::span<const T> t, std::span<const T> x,
                 std::size_t batch, MlpWorkspace<T>& ws);

// Gradients of sum_i <upstream[i], out[i]> w.r.t. params, overwriting grads.
// Requires the workspace of the matching forward call.
template <typename T>
void mlp_backward(const Mlp<T>& m, MlpWorkspace<T>& ws, std::span<const T> upstream,
                  std::vector<T>& grads);

// Bias-corrected Adam with lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8, no decay.
template <typename T>
struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<T> m, v;
    std::size_t step_count = 0;

    explicit Adam(std::size_t n_params) : m(n_params, T(0)), v(n_params, T(0)) {}
    void step(std::vector<T>& params, const std::vector<T>& grads);
};

} // namespace rafm
