#include "rafm/harness.hpp"
#include "rafm/piv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const char* reject_name(rafm::FrameReject r) {
    switch (r) {
    case rafm::FrameReject::ParseFailure: return "parse_failure";
    case rafm::FrameReject::WrongCount: return "wrong_count";
    case rafm::FrameReject::ContainsNan: return "contains_nan";
    }
    return "unknown";
}

int report_runs(const rafm::ExperimentResult& result) {
    std::size_t ok = 0;
    for (const auto& run : result.runs) {
        if (run.ok) {
            ++ok;
            std::printf("[ ok ] %s/%s/seed_%llu  radial_w1=%.4g ks=%.4g sliced_w1=%.4g "
                        "invalid=%.3g\n",
                        run.dataset.c_str(), run.method.c_str(),
                        static_cast<unsigned long long>(run.seed),
                        run.metrics.radial_w1, run.metrics.ks, run.metrics.sliced,
                        run.metrics.rates.invalid_rate);
        } else {
            std::printf("[fail] %s/%s/seed_%llu  %s\n", run.dataset.c_str(),
                        run.method.c_str(), static_cast<unsigned long long>(run.seed),
                        run.error.c_str());
        }
    }
    std::printf("%zu/%zu runs succeeded\n", ok, result.runs.size());
    return (ok == 0 && !result.runs.empty()) ? 1 : 0;
}

void prepare_piv(const std::string& archive, const std::string& out_dir,
                 const std::vector<std::string>& grids, bool trunc16) {
    fs::create_directories(out_dir);
    std::ostringstream log;
    for (const auto& g : grids) {
        auto pos = g.find('x');
        if (pos == std::string::npos || pos == 0 || pos + 1 == g.size())
            throw std::runtime_error("bad grid spec (expected NYxNX): " + g);
        std::size_t ny = std::stoul(g.substr(0, pos));
        std::size_t nx = std::stoul(g.substr(pos + 1));
        rafm::PivResult res = rafm::piv_pipeline(archive, ny, nx);
        std::string path = out_dir + "/piv_d" + std::to_string(ny * nx) + ".pt";
        rafm::save_matrix(path, res.data, {{"grid_ny", ny}, {"grid_nx", nx}});
        log << path << ": " << res.retained << " frames retained, " << res.skipped
            << " skipped\n";
        for (const auto& [name, why] : res.rejects)
            log << "  rejected " << name << ": " << reject_name(why) << "\n";
        if (trunc16 && ny == 8 && nx == 4) {
            rafm::PivResult r16 = rafm::piv_pipeline(archive, ny, nx, 16);
            std::string p16 = out_dir + "/piv_d16.pt";
            rafm::save_matrix(p16, r16.data,
                              {{"grid_ny", ny}, {"grid_nx", nx}, {"trunc", 16}});
            log << p16 << ": " << r16.retained << " frames retained\n";
        }
    }
    std::ofstream(out_dir + "/prepare_log.txt") << log.str();
    std::cout << log.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial-angular flow matching benchmark driver"};
    app.require_subcommand(1);

    std::string archive, prep_out = "data";
    std::vector<std::string> grids = {"8x4"};
    bool trunc16 = false;
    auto* prep = app.add_subcommand("prepare-piv",
                                    "preprocess a DaVis archive into dataset matrices");
    prep->add_option("--archive", archive, "directory holding Serie_*.txt frames")
        ->required();
    prep->add_option("--out", prep_out, "output directory");
    prep->add_option("--grids", grids, "subsampling grids, NYxNX")->delimiter(',');
    prep->add_flag("--trunc16", trunc16,
                   "also write the 16-coordinate truncation of the 8x4 grid");

    std::string run_cfg;
    auto* run = app.add_subcommand("run", "train, sample and evaluate every "
                                          "(method, seed) pair of a config");
    run->add_option("--config", run_cfg, "experiment config file")->required();

    std::string agg_dir = "results";
    auto* agg = app.add_subcommand("aggregate",
                                   "cross-seed summaries for every dataset directory");
    agg->add_option("--results", agg_dir, "results directory");

    std::string tab_dir = "results";
    auto* tab = app.add_subcommand("tables", "per-dataset tables from stored metrics");
    tab->add_option("--results", tab_dir, "results directory");

    std::string tim_cfg;
    auto* tim = app.add_subcommand("timing",
                                   "training-step and sampling wall-time protocol");
    tim->add_option("--config", tim_cfg, "experiment config file")->required();

    std::string all_cfg;
    auto* all = app.add_subcommand("all", "run, then aggregate and tables");
    all->add_option("--config", all_cfg, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed()) {
            prepare_piv(archive, prep_out, grids, trunc16);
            return 0;
        }
        if (run->parsed()) {
            rafm::ExperimentResult result =
                rafm::run_experiment(rafm::load_config(run_cfg));
            return report_runs(result);
        }
        if (agg->parsed()) {
            rafm::aggregate_results(agg_dir);
            std::cout << "summaries written under " << agg_dir << "\n";
            return 0;
        }
        if (tab->parsed()) {
            rafm::write_tables(tab_dir);
            std::cout << "tables written under " << tab_dir << "/tables\n";
            return 0;
        }
        if (tim->parsed()) {
            rafm::ExperimentConfig cfg = rafm::load_config(tim_cfg);
            rafm::timing_protocol(cfg);
            std::cout << "timing written under " << cfg.out_dir << "/"
                      << cfg.resolved_label() << "\n";
            return 0;
        }
        if (all->parsed()) {
            rafm::ExperimentConfig cfg = rafm::load_config(all_cfg);
            rafm::ExperimentResult result = rafm::run_experiment(cfg);
            int rc = report_runs(result);
            rafm::aggregate_results(cfg.out_dir);
            rafm::write_tables(cfg.out_dir);
            std::cout << "summaries and tables written under " << cfg.out_dir << "\n";
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
