#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rafm/config.hpp"
#include "rafm/io.hpp"
#include "rafm/mlp.hpp"
#include "rafm/prng.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace rafm;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("blob round trip is bit exact") {
    std::string path = tmp_path("rafm_test_blob.pt");
    ordered_json header;
    header["kind"] = "test";
    header["note"] = "hello";
    std::vector<float> blob = {1.0f, -2.5f, 3.25e-7f, 0.0f, -0.0f};
    save_blob(path, header, blob);
    BlobFile back = load_blob(path);
    CHECK(back.header.at("kind") == "test");
    CHECK(back.header.at("note") == "hello");
    CHECK(back.header.at("count").get<std::size_t>() == 5);
    REQUIRE(back.data.size() == 5);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(std::memcmp(&back.data[k], &blob[k], sizeof(float)) == 0);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_blob(tmp_path("rafm_no_such_file.pt")), std::runtime_error);
}

TEST_CASE("truncated blob is rejected") {
    std::string path = tmp_path("rafm_test_trunc.pt");
    save_blob(path, ordered_json{{"kind", "test"}}, std::vector<float>(8, 1.0f));
    auto full = read_file(path);
    std::ofstream f(path, std::ios::binary);
    f.write(full.data(), static_cast<std::streamsize>(full.size() - 4));
    f.close();
    CHECK_THROWS_AS(load_blob(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("matrix round trip keeps shape and float32 values") {
    std::string path = tmp_path("rafm_test_matrix.pt");
    Matrix m(3, 2);
    double vals[6] = {1.5, -2.25, 0.1, 1e-7, 123456.0, -0.875};
    for (std::size_t k = 0; k < 6; ++k) m.data[k] = vals[k];
    save_matrix(path, m, ordered_json{{"name", "unit"}});
    Matrix back = load_matrix(path);
    REQUIRE(back.rows == 3);
    REQUIRE(back.cols == 2);
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(back.data[k] == static_cast<double>(static_cast<float>(vals[k])));
    // saving the loaded matrix again reproduces the file byte for byte
    std::string path2 = tmp_path("rafm_test_matrix2.pt");
    save_matrix(path2, back, ordered_json{{"name", "unit"}});
    CHECK(read_file(path) == read_file(path2));
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("checkpoint round trip restores the model bitwise") {
    std::string path = tmp_path("rafm_test_ckpt.pt");
    Prng rng(3, 0);
    Mlp<float> model = mlp_init<float>(5, rng);
    save_checkpoint(path, model, 7500);
    Checkpoint back = load_checkpoint(path);
    CHECK(back.step == 7500);
    CHECK(back.model.d == 5);
    CHECK(back.model.params == model.params);

    // a plain matrix artifact is not a checkpoint
    std::string mpath = tmp_path("rafm_test_not_ckpt.pt");
    save_matrix(mpath, Matrix(2, 2));
    CHECK_THROWS_AS(load_checkpoint(mpath), std::runtime_error);
    std::remove(path.c_str());
    std::remove(mpath.c_str());
}

TEST_CASE("checkpoint with damaged header count is rejected") {
    std::string path = tmp_path("rafm_test_ckpt_bad.pt");
    Prng rng(4, 0);
    Mlp<float> model = mlp_init<float>(3, rng);
    save_checkpoint(path, model, 10);
    // rewrite with a lying dimension
    BlobFile b = load_blob(path);
    b.header["d"] = 4;
    save_blob(path, b.header, b.data);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("config defaults hold and overrides apply") {
    std::string text =
        "[dataset]\n"
        "name = student_t\n"
        "d = 8\n"
        "\n"
        "[run]\n"
        "methods = gaussian_fm, rafm\n"
        "\n"
        "[train]\n"
        "steps = 500\n";
    ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.dataset_name == "student_t");
    CHECK(cfg.d == 8);
    CHECK(cfg.nu == 3.0);
    CHECK(cfg.n == 50000);
    CHECK(cfg.matrix_seed == 42);
    CHECK(cfg.split_seed == 0);
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[1] == "rafm");
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[0] == 8925);
    CHECK(cfg.seeds[1] == 77395);
    CHECK(cfg.seeds[2] == 65457);
    CHECK(cfg.train.steps == 500);
    CHECK(cfg.train.batch == 256);
    CHECK(cfg.train.checkpoint_every == 5000);
    CHECK(cfg.train.lr == 1e-3);
    CHECK(cfg.rk4_steps == 128);
    CHECK(cfg.n_gen == 10000);
    CHECK(cfg.n_proj == 500);
    CHECK_FALSE(cfg.eval_angular);
    REQUIRE(cfg.timing_nfe.size() == 4);
    CHECK(cfg.timing_nfe[3] == 256);
    CHECK(cfg.resolved_label() == "student_t_d8");

    ExperimentConfig toy = parse_config("[dataset]\nname = toy2d\n[run]\nmethods = rafm\n");
    CHECK(toy.resolved_label() == "toy2d");
    toy.label = "custom";
    CHECK(toy.resolved_label() == "custom");
}

TEST_CASE("config rejects unknown keys, bad values, and missing requireds") {
    CHECK_THROWS_WITH_AS(
        parse_config("[dataset]\nname = student_t\ntypo_key = 3\n[run]\nmethods = rafm\n"),
        doctest::Contains("unknown key"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nmethods = rafm\n"),
                         doctest::Contains("dataset.name"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config("[dataset]\nname = student_t\n"),
                         doctest::Contains("run.methods"), std::runtime_error);
    CHECK_THROWS_AS(parse_config("[dataset]\nname = x\nd = alpha\n[run]\nmethods = rafm\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_config("[train]\nlr = fast\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_config("[eval]\nangular = maybe\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_config("just a stray line\n"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_config("[dataset]\nname = student_t\n[run]\nmethods = mystery\n"),
        doctest::Contains("unknown method"), std::runtime_error);
}

TEST_CASE("config comments and spacing are tolerated") {
    std::string text =
        "# benchmark protocol\n"
        "; alt comment style\n"
        "[dataset]\n"
        "  name   =   aniso_gauss  \n"
        "\n"
        "[run]\n"
        "methods = rafm\n"
        "seeds = 1, 2,3\n";
    ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.dataset_name == "aniso_gauss");
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[2] == 3);
}

TEST_CASE("serialization is canonical and round trips") {
    std::string text =
        "[dataset]\n"
        "name = toy2d\n"
        "kappa = 5.5\n"
        "[run]\n"
        "methods = gaussian_fm,rafm\n"
        "seeds = 11,22\n"
        "[eval]\n"
        "angular = true\n";
    ExperimentConfig cfg = parse_config(text);
    std::string canon = serialize_config(cfg);
    ExperimentConfig back = parse_config(canon);
    CHECK(serialize_config(back) == canon); // fixed point after one pass
    CHECK(back.kappa == 5.5);
    CHECK(back.eval_angular);
    REQUIRE(back.seeds.size() == 2);
    CHECK(back.seeds[1] == 22);
    // byte-stable: independent parses serialize identically
    CHECK(serialize_config(parse_config(text)) == canon);
}

TEST_CASE("config file loading matches in-memory parsing") {
    std::string path = tmp_path("rafm_test_cfg.cfg");
    std::string text = "[dataset]\nname = student_t\nd = 4\n[run]\nmethods = rafm\n";
    std::ofstream(path) << text;
    ExperimentConfig a = load_config(path);
    ExperimentConfig b = parse_config(text);
    CHECK(serialize_config(a) == serialize_config(b));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config(tmp_path("rafm_missing_cfg.cfg")), std::runtime_error);
}

TEST_CASE("method registry resolves every variant") {
    MethodVariant g = method_variant("gaussian_fm");
    CHECK(g.method == Method::gaussian_fm);
    CHECK_FALSE(g.project);
    CHECK(g.radial_mode == RadialMode::empirical);
    CHECK(g.train_key == "gaussian_fm");

    MethodVariant so = method_variant("source_only");
    CHECK(so.method == Method::source_only);
    CHECK_FALSE(so.project);
    CHECK(so.train_key == "source_only");

    MethodVariant soo = method_variant("source_only_oracle");
    CHECK(soo.method == Method::source_only);
    CHECK(soo.radial_mode == RadialMode::oracle);

    MethodVariant r = method_variant("rafm");
    CHECK(r.method == Method::rafm);
    CHECK(r.project);
    CHECK(r.train_key == "rafm");

    MethodVariant ro = method_variant("rafm_oracle");
    CHECK(ro.method == Method::rafm);
    CHECK(ro.project);
    CHECK(ro.radial_mode == RadialMode::oracle);
    CHECK(ro.train_key == "rafm"); // shares training with plain rafm

    MethodVariant rn = method_variant("rafm_noproj");
    CHECK(rn.method == Method::rafm);
    CHECK_FALSE(rn.project);
    CHECK(rn.train_key == "rafm");

    CHECK_THROWS_AS(method_variant("diffusion"), std::runtime_error);
}
