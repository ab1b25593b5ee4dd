#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rafm/datasets.hpp"
#include "rafm/flow.hpp"
#include "rafm/matrix.hpp"
#include "rafm/mlp.hpp"
#include "rafm/prng.hpp"
#include "rafm/radial.hpp"
#include "rafm/samplers.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace rafm;

namespace {

Matrix random_targets(std::size_t n, std::size_t d, std::uint64_t seed) {
    Prng rng(seed, 0);
    return sample_gaussian(rng, n, d);
}

Mlp<double> zero_model(std::size_t d) {
    Mlp<double> m;
    m.d = d;
    m.params.assign(Mlp<double>::param_count(d), 0.0);
    return m;
}

} // namespace

TEST_CASE("linear batch satisfies the path identities") {
    std::size_t b = 64, d = 5;
    Matrix x1 = random_targets(b, d, 2);
    SourceSampler src = gaussian_source(d);
    Prng rng(10, 0);
    PathBatch batch = make_batch_linear(x1, src, rng);
    REQUIRE(batch.t.size() == b);
    REQUIRE(batch.x_t.rows == b);
    REQUIRE(batch.target_v.rows == b);
    CHECK(batch.dropped_zero_rows == 0);
    for (std::size_t i = 0; i < b; ++i) {
        double t = batch.t[i];
        CHECK(t >= 0.0);
        CHECK(t < 1.0);
        for (std::size_t j = 0; j < d; ++j) {
            // target = x1 - x0 pins x0; the path must pass through it
            double x0 = x1(i, j) - batch.target_v(i, j);
            double expect = (1.0 - t) * x0 + t * x1(i, j);
            CHECK(batch.x_t(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear batch is rng-deterministic") {
    Matrix x1 = random_targets(16, 3, 4);
    SourceSampler src = gaussian_source(3);
    Prng r1(5, 2), r2(5, 2);
    PathBatch a = make_batch_linear(x1, src, r1);
    PathBatch b = make_batch_linear(x1, src, r2);
    CHECK(a.t == b.t);
    CHECK(a.x_t.data == b.x_t.data);
    CHECK(a.target_v.data == b.target_v.data);
    CHECK_THROWS_AS(make_batch_linear(Matrix(0, 3), src, r1), std::invalid_argument);
}

TEST_CASE("rafm batch preserves radii and keeps velocities tangent") {
    std::size_t b = 512, d = 6;
    Matrix x1 = random_targets(b, d, 7);
    Prng rng(11, 0);
    PathBatch batch = make_batch_rafm(x1, rng);
    REQUIRE(batch.t.size() == b);
    CHECK(batch.dropped_zero_rows == 0);
    for (std::size_t i = 0; i < b; ++i) {
        double r1 = norm(x1.row(i));
        double rt = norm(batch.x_t.row(i));
        CHECK(std::abs(rt - r1) <= 1e-6 * r1);
        double dot_tv = dot(batch.x_t.row(i), batch.target_v.row(i));
        double vn = norm(batch.target_v.row(i));
        CHECK(std::abs(dot_tv) <= 1e-6 * std::max(rt * vn, 1e-30));
        // geodesic speed never exceeds radius times the max arc length
        CHECK(vn <= r1 * 3.1415926535897932 * (1.0 + 1e-9));
        CHECK(batch.t[i] >= 0.0);
        CHECK(batch.t[i] < 1.0);
    }
}

TEST_CASE("rafm batch drops zero-norm rows with a counter") {
    std::size_t d = 3;
    Matrix x1(4, d);
    for (std::size_t j = 0; j < d; ++j) {
        x1(0, j) = 1.0;
        x1(1, j) = 0.0; // dropped
        x1(2, j) = -2.0;
        x1(3, j) = 0.5;
    }
    Prng rng(3, 0);
    PathBatch batch = make_batch_rafm(x1, rng);
    CHECK(batch.dropped_zero_rows == 1);
    CHECK(batch.t.size() == 3);
    CHECK(batch.x_t.rows == 3);
    CHECK(norm(batch.x_t.row(0)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK_THROWS_AS(make_batch_rafm(Matrix(0, d), rng), std::invalid_argument);
}

TEST_CASE("loss vanishes when the model already outputs the target") {
    std::size_t b = 4, d = 3;
    Mlp<double> m = zero_model(d);
    PathBatch batch;
    batch.t.assign(b, 0.5);
    batch.x_t = random_targets(b, d, 9);
    batch.target_v = Matrix(b, d); // zero targets match the zero model
    MlpWorkspace<double> ws;
    std::vector<double> grads;
    double loss = cfm_loss<double>(m, batch, ws, grads);
    CHECK(loss == 0.0);
    for (double g : grads) CHECK(g == 0.0);
}

TEST_CASE("loss of the zero model is the mean squared target") {
    std::size_t d = 3;
    Mlp<double> m = zero_model(d);
    PathBatch batch;
    batch.t = {0.25, 0.75};
    batch.x_t = Matrix(2, d);
    batch.x_t(0, 0) = 0.3;
    batch.target_v = Matrix(2, d);
    double vals[2][3] = {{1.0, 2.0, 3.0}, {0.0, -1.0, 1.0}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < d; ++j) batch.target_v(i, j) = vals[i][j];
    MlpWorkspace<double> ws;
    std::vector<double> grads;
    double loss = cfm_loss<double>(m, batch, ws, grads);
    // (1+4+9+0+1+1) / (2*3)
    CHECK(loss == doctest::Approx(16.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("loss gradients match finite differences") {
    std::size_t b = 8, d = 4;
    Prng rng(21, 0);
    Mlp<double> m = mlp_init<double>(d, rng);
    Matrix x1 = random_targets(b, d, 22);
    PathBatch batch = make_batch_rafm(x1, rng);
    MlpWorkspace<double> ws;
    std::vector<double> grads;
    cfm_loss<double>(m, batch, ws, grads);

    double h = 1e-5;
    double worst = 0.0;
    std::vector<double> scratch;
    auto loss_at = [&] {
        MlpWorkspace<double> w2;
        return cfm_loss<double>(m, batch, w2, scratch);
    };
    for (std::size_t rep = 0; rep < 300; ++rep) {
        std::size_t k = rng.next_below(m.params.size());
        double saved = m.params[k];
        m.params[k] = saved + h;
        double up = loss_at();
        m.params[k] = saved - h;
        double down = loss_at();
        m.params[k] = saved;
        double fd = (up - down) / (2.0 * h);
        double rel = std::abs(grads[k] - fd) / std::max({std::abs(grads[k]), std::abs(fd), 1e-6});
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("loss refuses non-finite batches and mismatched widths") {
    std::size_t d = 2;
    Mlp<double> m = zero_model(d);
    MlpWorkspace<double> ws;
    std::vector<double> grads;
    PathBatch batch;
    batch.t = {0.5};
    batch.x_t = Matrix(1, d);
    batch.target_v = Matrix(1, d);
    batch.target_v(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(cfm_loss<double>(m, batch, ws, grads), std::runtime_error);

    PathBatch nan_state;
    nan_state.t = {0.5};
    nan_state.x_t = Matrix(1, d);
    nan_state.x_t(0, 1) = std::nan("");
    nan_state.target_v = Matrix(1, d);
    CHECK_THROWS_AS(cfm_loss<double>(m, nan_state, ws, grads), std::runtime_error);

    PathBatch wrong;
    wrong.t = {0.5};
    wrong.x_t = Matrix(1, d + 1);
    wrong.target_v = Matrix(1, d + 1);
    CHECK_THROWS_AS(cfm_loss<double>(m, wrong, ws, grads), std::invalid_argument);
}

TEST_CASE("zero training steps return the initialization") {
    Matrix data = random_targets(64, 4, 31);
    MethodSpec spec;
    spec.method = Method::gaussian_fm;
    spec.source = gaussian_source(4);
    TrainConfig cfg;
    cfg.steps = 0;
    Prng init(77, 1), batch(77, 2), init_ref(77, 1);
    TrainResult res = train(spec, data, cfg, init, batch);
    Mlp<float> ref = mlp_init<float>(4, init_ref);
    CHECK(res.model.params == ref.params);
    CHECK(res.loss_log.empty());
    REQUIRE(res.checkpoints.size() == 1);
    CHECK(res.checkpoints.back().first == 0);
}

TEST_CASE("training is bit-deterministic in its seeds") {
    Matrix data = random_targets(256, 4, 41);
    MethodSpec spec;
    spec.method = Method::rafm;
    spec.source = gaussian_source(4);
    TrainConfig cfg;
    cfg.steps = 40;
    cfg.batch = 32;
    cfg.checkpoint_every = 16;

    Prng i1(9, 1), b1(9, 2), i2(9, 1), b2(9, 2), i3(10, 1), b3(10, 2);
    TrainResult r1 = train(spec, data, cfg, i1, b1);
    TrainResult r2 = train(spec, data, cfg, i2, b2);
    TrainResult r3 = train(spec, data, cfg, i3, b3);
    CHECK(r1.model.params == r2.model.params);
    CHECK(r1.loss_log == r2.loss_log);
    CHECK(r1.model.params != r3.model.params);
    // checkpoints at the cadence plus the final step
    REQUIRE(r1.checkpoints.size() == 3);
    CHECK(r1.checkpoints[0].first == 16);
    CHECK(r1.checkpoints[1].first == 32);
    CHECK(r1.checkpoints[2].first == 40);
    CHECK(r1.checkpoints[2].second.params == r1.model.params);
}

TEST_CASE("rafm training ignores the configured source law") {
    Matrix data = random_targets(256, 4, 43);
    TrainConfig cfg;
    cfg.steps = 25;
    cfg.batch = 32;

    MethodSpec absurd;
    absurd.method = Method::rafm;
    absurd.source = radial_source(empirical_law({999.0}), 4);
    MethodSpec plain;
    plain.method = Method::rafm;
    plain.source = gaussian_source(4);

    Prng i1(3, 1), b1(3, 2), i2(3, 1), b2(3, 2);
    TrainResult r1 = train(absurd, data, cfg, i1, b1);
    TrainResult r2 = train(plain, data, cfg, i2, b2);
    CHECK(r1.model.params == r2.model.params);
}

TEST_CASE("training reduces the loss for all three methods") {
    Matrix data = gen_student_t(8, 3.0, 4000, 42, 17);
    TrainConfig cfg;
    cfg.steps = 400;
    cfg.batch = 128;

    auto early_late = [](const TrainResult& res) {
        double early = 0.0, late = 0.0;
        std::size_t k = 20;
        for (std::size_t i = 0; i < k; ++i) {
            early += res.loss_log[i].second;
            late += res.loss_log[res.loss_log.size() - 1 - i].second;
        }
        return std::pair{early / double(k), late / double(k)};
    };

    for (Method method : {Method::gaussian_fm, Method::source_only, Method::rafm}) {
        MethodSpec spec;
        spec.method = method;
        spec.source = (method == Method::gaussian_fm)
                          ? gaussian_source(8)
                          : radial_source(fit_empirical_radial(data), 8);
        Prng init(1, 1), batch(1, 2);
        TrainResult res = train(spec, data, cfg, init, batch);
        CHECK_FALSE(res.diverged);
        auto [early, late] = early_late(res);
        CHECK(late < early);
    }
}

TEST_CASE("divergent training aborts with the flag and saved state") {
    Matrix data(4, 3);
    for (auto& v : data.data) v = std::nan("");
    MethodSpec spec;
    spec.method = Method::gaussian_fm;
    spec.source = gaussian_source(3);
    TrainConfig cfg;
    cfg.steps = 50;
    cfg.batch = 8;
    Prng init(2, 1), batch(2, 2), init_ref(2, 1);
    TrainResult res = train(spec, data, cfg, init, batch);
    CHECK(res.diverged);
    CHECK(res.diverged_at_step == 1);
    // state saved before any update
    Mlp<float> ref = mlp_init<float>(3, init_ref);
    CHECK(res.model.params == ref.params);
    REQUIRE_FALSE(res.checkpoints.empty());
    CHECK(res.checkpoints.back().first == 1);
}
