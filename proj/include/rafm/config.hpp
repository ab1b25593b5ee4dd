#pragma once

#include "rafm/flow.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rafm {

// Resolved experiment description. Defaults are the benchmark protocol; a
// config file overrides them via "[section]" + "key = value" lines. Unknown
// keys are a hard error so typos cannot silently fall back to defaults.
struct ExperimentConfig {
    // [dataset]
    std::string dataset_name;  // student_t | aniso_gauss | toy2d | piv (required)
    std::string label;         // directory name; derived from name and d when empty
    std::size_t d = 16;
    double nu = 3.0;
    std::size_t n = 50000;
    std::uint64_t matrix_seed = 42;
    std::uint64_t split_seed = 0;
    std::size_t modes = 4;
    double kappa = 5.0;
    double scale = 1.0;
    std::string piv_file;     // prepared matrix artifact
    std::string piv_archive;  // raw DaVis directory
    std::size_t grid_ny = 8;
    std::size_t grid_nx = 4;
    std::size_t trunc = 0;  // 0 = keep all coordinates

    // [run]
    std::vector<std::string> methods;  // required
    std::vector<std::uint64_t> seeds = {8925, 77395, 65457};
    std::string out_dir = "results";

    // [train]
    TrainConfig train;

    // [sampler]
    std::size_t rk4_steps = 128;
    double projection_skip_norm = 1e-3;

    // [eval]
    std::size_t n_gen = 10000;
    std::size_t n_proj = 500;
    bool eval_angular = false;
    bool eval_mmd = false;

    // [timing]
    std::vector<std::size_t> timing_nfe = {32, 64, 128, 256};
    std::size_t timing_repeats = 3;
    std::size_t timing_train_steps = 60;
    std::size_t timing_batch = 10000;

    std::string resolved_label() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical byte-stable form; the run-directory snapshot.
std::string serialize_config(const ExperimentConfig& cfg);

// Method-name registry: gaussian_fm, source_only, source_only_oracle, rafm,
// rafm_oracle, rafm_noproj.
struct MethodVariant {
    std::string name;
    Method method = Method::gaussian_fm;
    RadialMode radial_mode = RadialMode::empirical;
    bool project = false;
    std::string train_key;  // variants sharing a key train identically
};
MethodVariant method_variant(const std::string& name);

} // namespace rafm
