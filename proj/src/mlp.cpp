#include "rafm/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace rafm {

namespace {

template <typename T>
struct Offsets {
    std::size_t w1, b1, w2, b2, w3, b3, w4, b4, total;
    explicit Offsets(std::size_t d) {
        constexpr std::size_t w = Mlp<T>::width;
        w1 = 0;
        b1 = w1 + w * (d + 1);
        w2 = b1 + w;
        b2 = w2 + w * w;
        w3 = b2 + w;
        b3 = w3 + w * w;
        w4 = b3 + w;
        b4 = w4 + d * w;
        total = b4 + d;
    }
};

// c[i,o] = bias[o] + sum_k a[i,k] w[o,k], computed through a transposed copy
// of w so the inner loop runs over contiguous independent lanes.
template <typename T>
void affine(const T* a, const T* w, const T* bias, T* c, std::size_t batch,
            std::size_t in, std::size_t out, std::vector<T>& wt) {
    wt.resize(in * out);
    for (std::size_t o = 0; o < out; ++o)
        for (std::size_t k = 0; k < in; ++k)
            wt[k * out + o] = w[o * in + k];
    for (std::size_t i = 0; i < batch; ++i) {
        const T* ai = a + i * in;
        T* ci = c + i * out;
        for (std::size_t o = 0; o < out; ++o)
            ci[o] = bias[o];
        for (std::size_t k = 0; k < in; ++k) {
            T s = ai[k];
            const T* wk = wt.data() + k * out;
            for (std::size_t o = 0; o < out; ++o)
                ci[o] += s * wk[o];
        }
    }
}

// gw[o,k] += sum_i dz[i,o] a[i,k]; gb[o] += sum_i dz[i,o];
// da[i,k] = sum_o dz[i,o] w[o,k] (skipped when da is null)
template <typename T>
void affine_backward(const T* a, const T* w, const T* dz, std::size_t batch,
                     std::size_t in, std::size_t out, T* gw, T* gb, T* da) {
    for (std::size_t i = 0; i < batch; ++i) {
        const T* ai = a + i * in;
        const T* dzi = dz + i * out;
        T* dai = da ? da + i * in : nullptr;
        if (dai)
            for (std::size_t k = 0; k < in; ++k)
                dai[k] = T(0);
        for (std::size_t o = 0; o < out; ++o) {
            T g = dzi[o];
            gb[o] += g;
            const T* wo = w + o * in;
            T* gwo = gw + o * in;
            for (std::size_t k = 0; k < in; ++k)
                gwo[k] += g * ai[k];
            if (dai)
                for (std::size_t k = 0; k < in; ++k)
                    dai[k] += g * wo[k];
        }
    }
}

template <typename T>
void swish_layer(const std::vector<T>& z, std::vector<T>& s, std::vector<T>& a) {
    for (std::size_t k = 0; k < z.size(); ++k) {
        T sk = T(1) / (T(1) + std::exp(-z[k]));
        s[k] = sk;
        a[k] = z[k] * sk;
    }
}

} // namespace

template <typename T>
Mlp<T> mlp_init(std::size_t d, Prng& rng) {
    if (d < 1)
        throw std::invalid_argument("mlp_init: d must be >= 1");
    Mlp<T> m;
    m.d = d;
    m.params.resize(Mlp<T>::param_count(d));
    Offsets<T> off(d);
    constexpr std::size_t w = Mlp<T>::width;
    auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t k = 0; k < count; ++k)
            m.params[begin + k] = T((2.0 * rng.uniform() - 1.0) * bound);
    };
    fill(off.w1, w * (d + 1), d + 1);
    fill(off.b1, w, d + 1);
    fill(off.w2, w * w, w);
    fill(off.b2, w, w);
    fill(off.w3, w * w, w);
    fill(off.b3, w, w);
    fill(off.w4, d * w, w);
    fill(off.b4, d, w);
    return m;
}

template <typename T>
void mlp_forward(const Mlp<T>& m, std::span<const T> t, std::span<const T> x,
                 std::size_t batch, MlpWorkspace<T>& ws) {
    std::size_t d = m.d;
    constexpr std::size_t w = Mlp<T>::width;
    if (t.size() != batch || x.size() != batch * d)
        throw std::invalid_argument("mlp_forward: shape mismatch");
    for (T v : x)
        if (!std::isfinite(v)) throw std::runtime_error("mlp_forward: non-finite input");
    for (T v : t)
        if (!std::isfinite(v)) throw std::runtime_error("mlp_forward: non-finite time");

    ws.batch = batch;
    ws.input.resize(batch * (d + 1));
    for (auto* vec : {&ws.z1, &ws.s1, &ws.a1, &ws.z2, &ws.s2, &ws.a2, &ws.z3, &ws.s3, &ws.a3})
        vec->resize(batch * w);
    ws.out.resize(batch * d);

    for (std::size_t i = 0; i < batch; ++i) {
        T* in = ws.input.data() + i * (d + 1);
        for (std::size_t j = 0; j < d; ++j)
            in[j] = x[i * d + j];
        in[d] = t[i];
    }

    Offsets<T> off(d);
    const T* p = m.params.data();
    affine(ws.input.data(), p + off.w1, p + off.b1, ws.z1.data(), batch, d + 1, w,
           ws.wt_scratch);
    swish_layer(ws.z1, ws.s1, ws.a1);
    affine(ws.a1.data(), p + off.w2, p + off.b2, ws.z2.data(), batch, w, w, ws.wt_scratch);
    swish_layer(ws.z2, ws.s2, ws.a2);
    affine(ws.a2.data(), p + off.w3, p + off.b3, ws.z3.data(), batch, w, w, ws.wt_scratch);
    swish_layer(ws.z3, ws.s3, ws.a3);
    affine(ws.a3.data(), p + off.w4, p + off.b4, ws.out.data(), batch, w, d, ws.wt_scratch);
}

template <typename T>
void mlp_backward(const Mlp<T>& m, MlpWorkspace<T>& ws, std::span<const T> upstream,
                  std::vector<T>& grads) {
    std::size_t d = m.d, batch = ws.batch;
    constexpr std::size_t w = Mlp<T>::width;
    if (upstream.size() != batch * d)
        throw std::invalid_argument("mlp_backward: upstream shape mismatch");
    Offsets<T> off(d);
    grads.assign(off.total, T(0));

    // two ping-pong cotangent buffers
    ws.grad_scratch.resize(2 * batch * w);
    T* da = ws.grad_scratch.data();
    T* dz = ws.grad_scratch.data() + batch * w;
    const T* p = m.params.data();
    T* g = grads.data();

    auto swish_back = [&](const std::vector<T>& z, const std::vector<T>& s) {
        for (std::size_t k = 0; k < batch * w; ++k)
            dz[k] = da[k] * (s[k] + z[k] * s[k] * (T(1) - s[k]));
    };

    affine_backward(ws.a3.data(), p + off.w4, upstream.data(), batch, w, d,
                    g + off.w4, g + off.b4, da);
    swish_back(ws.z3, ws.s3);
    affine_backward(ws.a2.data(), p + off.w3, dz, batch, w, w, g + off.w3, g + off.b3, da);
    swish_back(ws.z2, ws.s2);
    affine_backward(ws.a1.data(), p + off.w2, dz, batch, w, w, g + off.w2, g + off.b2, da);
    swish_back(ws.z1, ws.s1);
    affine_backward(ws.input.data(), p + off.w1, dz, batch, d + 1, w, g + off.w1,
                    g + off.b1, static_cast<T*>(nullptr));
}

template <typename T>
void Adam<T>::step(std::vector<T>& params, const std::vector<T>& grads) {
    if (params.size() != m.size() || grads.size() != m.size())
        throw std::invalid_argument("Adam: size mismatch");
    ++step_count;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    T b1 = T(beta1), b2 = T(beta2);
    T ib1 = T(1.0 - beta1), ib2 = T(1.0 - beta2);
    T scale = T(lr / bc1);
    T denom_scale = T(1.0 / std::sqrt(bc2));
    T e = T(eps);
    for (std::size_t k = 0; k < params.size(); ++k) {
        T gk = grads[k];
        m[k] = b1 * m[k] + ib1 * gk;
        v[k] = b2 * v[k] + ib2 * gk * gk;
        params[k] -= scale * m[k] / (std::sqrt(v[k]) * denom_scale + e);
    }
}

template struct Mlp<float>;
template struct Mlp<double>;
template Mlp<float> mlp_init<float>(std::size_t, Prng&);
template Mlp<double> mlp_init<double>(std::size_t, Prng&);
template void mlp_forward<float>(const Mlp<float>&, std::span<const float>,
                                 std::span<const float>, std::size_t, MlpWorkspace<float>&);
template void mlp_forward<double>(const Mlp<double>&, std::span<const double>,
                                  std::span<const double>, std::size_t,
                                  MlpWorkspace<double>&);
template void mlp_backward<float>(const Mlp<float>&, MlpWorkspace<float>&,
                                  std::span<const float>, std::vector<float>&);
template void mlp_backward<double>(const Mlp<double>&, MlpWorkspace<double>&,
                                   std::span<const double>, std::vector<double>&);
template struct Adam<float>;
template struct Adam<double>;

} // namespace rafm
