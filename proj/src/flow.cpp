#include "rafm/flow.hpp"

#include "rafm/samplers.hpp"
#include "rafm/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rafm {

PathBatch make_batch_linear(const Matrix& x1, const SourceSampler& source, Prng& rng) {
    if (x1.rows == 0)
        throw std::invalid_argument("make_batch_linear: empty batch");
    std::size_t b = x1.rows, d = x1.cols;
    SourceDraw x0 = sample_source(source, rng, rng, b);
    PathBatch out;
    out.t.resize(b);
    out.x_t = Matrix(b, d);
    out.target_v = Matrix(b, d);
    for (std::size_t i = 0; i < b; ++i) {
        double t = rng.uniform();
        out.t[i] = t;
        for (std::size_t j = 0; j < d; ++j) {
            double a = x0.x(i, j), c = x1(i, j);
            out.x_t(i, j) = (1.0 - t) * a + t * c;
            out.target_v(i, j) = c - a;
        }
    }
    return out;
}

PathBatch make_batch_rafm(const Matrix& x1, Prng& rng) {
    if (x1.rows == 0)
        throw std::invalid_argument("make_batch_rafm: empty batch");
    std::size_t d = x1.cols;
    PathBatch out;
    out.x_t = Matrix(0, d);
    out.target_v = Matrix(0, d);
    std::vector<double> u0(d), x0(d);
    std::vector<double> xs, vs;
    for (std::size_t i = 0; i < x1.rows; ++i) {
        auto row = x1.row(i);
        double r = norm(row);
        if (r <= 0.0) {
            ++out.dropped_zero_rows;
            continue;
        }
        draw_unit_direction(rng, u0);
        double t = rng.uniform();
        for (std::size_t j = 0; j < d; ++j)
            x0[j] = r * u0[j];
        GeodesicPair pair = geodesic_pair(x0, row);
        auto xt = slerp(pair, t);
        auto v = slerp_velocity(pair, t);
        out.t.push_back(t);
        xs.insert(xs.end(), xt.begin(), xt.end());
        vs.insert(vs.end(), v.begin(), v.end());
    }
    out.x_t.rows = out.t.size();
    out.x_t.data = std::move(xs);
    out.target_v.rows = out.t.size();
    out.target_v.data = std::move(vs);
    return out;
}

template <typename T>
double cfm_loss(const Mlp<T>& model, const PathBatch& batch, MlpWorkspace<T>& ws,
                std::vector<T>& grads) {
    std::size_t b = batch.t.size(), d = model.d;
    if (batch.x_t.cols != d)
        throw std::invalid_argument("cfm_loss: dimension mismatch");
    std::vector<T> t(b), x(b * d);
    for (std::size_t i = 0; i < b; ++i)
        t[i] = T(batch.t[i]);
    for (std::size_t k = 0; k < b * d; ++k)
        x[k] = T(batch.x_t.data[k]);
    mlp_forward(model, std::span<const T>(t), std::span<const T>(x), b, ws);

    double denom = static_cast<double>(b * d);
    double loss = 0.0;
    std::vector<T> upstream(b * d);
    T up_scale = T(2.0 / denom);
    for (std::size_t k = 0; k < b * d; ++k) {
        T r = ws.out[k] - T(batch.target_v.data[k]);
        loss += static_cast<double>(r) * static_cast<double>(r);
        upstream[k] = up_scale * r;
    }
    loss /= denom;
    if (!std::isfinite(loss))
        throw std::runtime_error("cfm_loss: non-finite loss");
    mlp_backward(model, ws, std::span<const T>(upstream), grads);
    return loss;
}

template double cfm_loss<float>(const Mlp<float>&, const PathBatch&, MlpWorkspace<float>&,
                                std::vector<float>&);
template double cfm_loss<double>(const Mlp<double>&, const PathBatch&,
                                 MlpWorkspace<double>&, std::vector<double>&);

TrainResult train(const MethodSpec& spec, const Matrix& train_data, const TrainConfig& cfg,
                  Prng& init_rng, Prng& batch_rng) {
    if (train_data.rows == 0)
        throw std::invalid_argument("train: empty training split");
    std::size_t d = train_data.cols;

    TrainResult res;
    res.model = mlp_init<float>(d, init_rng);
    Adam<float> opt(res.model.params.size());
    opt.lr = cfg.lr;

    MlpWorkspace<float> ws;
    std::vector<float> grads;
    Matrix x1(cfg.batch, d);
    res.loss_log.reserve(cfg.steps);

    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        for (std::size_t i = 0; i < cfg.batch; ++i) {
            auto src = train_data.row(batch_rng.next_below(train_data.rows));
            std::copy(src.begin(), src.end(), x1.row(i).begin());
        }
        PathBatch batch = (spec.method == Method::rafm)
                              ? make_batch_rafm(x1, batch_rng)
                              : make_batch_linear(x1, spec.source, batch_rng);
        res.dropped_zero_rows += batch.dropped_zero_rows;
        double loss;
        try {
            loss = cfm_loss(res.model, batch, ws, grads);
        } catch (const std::runtime_error&) {
            res.diverged = true;
            res.diverged_at_step = step;
            break;
        }
        opt.step(res.model.params, grads);
        res.loss_log.emplace_back(step, loss);
        if (cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0 &&
            step != cfg.steps)
            res.checkpoints.emplace_back(step, res.model);
    }
    res.checkpoints.emplace_back(res.diverged ? res.diverged_at_step : cfg.steps,
                                 res.model);
    return res;
}

} // namespace rafm
