#pragma once

#include "rafm/config.hpp"
#include "rafm/datasets.hpp"
#include "rafm/io.hpp"
#include "rafm/metrics.hpp"

#include <string>
#include <vector>

namespace rafm {

struct RunOutcome {
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    std::string dir;
    bool ok = false;
    std::string error;
    MetricsReport metrics;
};

struct ExperimentResult {
    std::string label;
    std::vector<RunOutcome> runs;
};

// Dataset matrix for a config (generator or PIV artifact).
Matrix build_dataset(const ExperimentConfig& cfg);

// Fresh-draw radial law of the true generator; throws for piv.
RadialLaw make_oracle_law(const ExperimentConfig& cfg);

// Train/generate/evaluate every (method, seed) pair; artifacts go to
// out_dir/<label>/<method>/seed_<seed>/. A failing run is recorded with an
// error marker and does not stop the others.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Cross-seed mean and unbiased std per (method, metric), written as
// summary.csv and summary.json next to the method directories.
void aggregate_results(const std::string& out_dir);

// Per-dataset tables plus a combined JSON, regenerated purely from stored
// metrics.json files.
void write_tables(const std::string& out_dir);

// Training-step and sampling wall-time protocol; written to
// out_dir/<label>/timing.json and returned.
ordered_json timing_protocol(const ExperimentConfig& cfg);

// Deterministic cross-platform string hash (FNV-1a), used to derive the
// shared evaluation stream from (dataset label, checkpoint step).
std::uint64_t fnv1a(const std::string& s);

} // namespace rafm
