#include "rafm/harness.hpp"

#include "rafm/flow.hpp"
#include "rafm/ode.hpp"
#include "rafm/piv.hpp"
#include "rafm/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace rafm {

namespace {

// Stream roles within one (method, seed) run.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamBatch = 2;
constexpr std::uint64_t kStreamGenRadius = 3;
constexpr std::uint64_t kStreamGenDir = 4;
constexpr std::uint64_t kStreamHistRadius = 5;
constexpr std::uint64_t kStreamHistDir = 6;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

void write_json(const fs::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_loss_csv(const fs::path& path,
                    const std::vector<std::pair<std::size_t, double>>& log) {
    std::ostringstream out;
    out << "step,loss\n";
    out.precision(17);
    for (const auto& [step, loss] : log)
        out << step << "," << loss << "\n";
    write_text(path, out.str());
}

void write_hist_csv(const fs::path& path, const std::vector<double>& gen,
                    const std::vector<double>& source, const std::vector<double>& test) {
    constexpr std::size_t n_bins = 64;
    double rmax = 0.0;
    for (const auto* v : {&gen, &source, &test})
        for (double r : *v)
            if (std::isfinite(r)) rmax = std::max(rmax, r);
    if (rmax <= 0.0) rmax = 1.0;
    auto count = [&](const std::vector<double>& v) {
        std::vector<std::size_t> c(n_bins, 0);
        for (double r : v) {
            if (!std::isfinite(r) || r < 0.0) continue;
            auto b = std::min<std::size_t>(
                n_bins - 1, static_cast<std::size_t>(r / rmax * double(n_bins)));
            ++c[b];
        }
        return c;
    };
    auto cg = count(gen), cs = count(source), ct = count(test);
    std::ostringstream out;
    out << "bin_lo,bin_hi,generated,source,test\n";
    out.precision(17);
    for (std::size_t b = 0; b < n_bins; ++b)
        out << rmax * double(b) / double(n_bins) << ","
            << rmax * double(b + 1) / double(n_bins) << "," << cg[b] << "," << cs[b]
            << "," << ct[b] << "\n";
    write_text(path, out.str());
}

struct TrainOutput {
    TrainResult result;
    double seconds = 0.0;
};

SourceSampler sampling_source(const MethodVariant& v, std::size_t d,
                              const RadialLaw& emp, const RadialLaw* oracle) {
    if (v.method == Method::gaussian_fm)
        return gaussian_source(d);
    return radial_source(v.radial_mode == RadialMode::oracle ? *oracle : emp, d);
}

// Canonical per-train_key spec so cache sharing cannot depend on which
// variant triggered the training. rafm training never reads its source.
MethodSpec training_spec(const MethodVariant& v, std::size_t d, const RadialLaw& emp,
                         const RadialLaw* oracle) {
    MethodSpec spec;
    spec.method = v.method;
    spec.radial_mode = v.radial_mode;
    if (v.method == Method::rafm)
        spec.source = radial_source(emp, d);
    else
        spec.source = sampling_source(v, d, emp, oracle);
    return spec;
}

// Canonical metric ordering for summaries and tables.
const std::vector<std::string>& metric_order() {
    static const std::vector<std::string> order = {
        "radial_w1", "ks",       "sliced_w1",      "angular_sw",
        "mmd",       "nan_rate", "exploding_rate", "invalid_rate"};
    return order;
}

struct MethodStats {
    std::vector<std::uint64_t> ok_seeds;
    std::vector<std::uint64_t> failed_seeds;
    std::map<std::string, std::vector<double>> values;  // metric -> per-seed
};

std::uint64_t seed_of_dir(const std::string& name) {
    return std::stoull(name.substr(std::string("seed_").size()));
}

// Reads every <method>/seed_*/metrics.json under a dataset directory.
std::map<std::string, MethodStats> collect_dataset(const fs::path& dataset_dir) {
    std::map<std::string, MethodStats> out;
    std::vector<fs::path> method_dirs;
    for (const auto& e : fs::directory_iterator(dataset_dir))
        if (e.is_directory()) method_dirs.push_back(e.path());
    std::sort(method_dirs.begin(), method_dirs.end());
    for (const auto& mdir : method_dirs) {
        std::vector<fs::path> seed_dirs;
        for (const auto& e : fs::directory_iterator(mdir))
            if (e.is_directory() && e.path().filename().string().starts_with("seed_"))
                seed_dirs.push_back(e.path());
        if (seed_dirs.empty()) continue;
        std::sort(seed_dirs.begin(), seed_dirs.end());
        MethodStats& stats = out[mdir.filename().string()];
        for (const auto& sdir : seed_dirs) {
            std::uint64_t seed = seed_of_dir(sdir.filename().string());
            std::ifstream in(sdir / "metrics.json", std::ios::binary);
            if (!in || fs::exists(sdir / "error.txt")) {
                stats.failed_seeds.push_back(seed);
                continue;
            }
            ordered_json j = ordered_json::parse(in);
            stats.ok_seeds.push_back(seed);
            for (const auto& [key, val] : j.at("metrics").items())
                if (val.is_number()) stats.values[key].push_back(val.get<double>());
        }
    }
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    r.n = v.size();
    if (r.n == 0) return r;
    for (double x : v) r.mean += x;
    r.mean /= double(r.n);
    if (r.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / double(r.n - 1));
    }
    return r;
}

std::vector<std::string> dataset_metric_names(
    const std::map<std::string, MethodStats>& stats) {
    std::vector<std::string> names;
    for (const auto& key : metric_order())
        for (const auto& [method, s] : stats)
            if (s.values.count(key)) {
                names.push_back(key);
                break;
            }
    return names;
}

std::vector<fs::path> dataset_dirs(const std::string& out_dir) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(out_dir)) {
        if (!e.is_directory() || e.path().filename() == "tables") continue;
        bool has_runs = false;
        for (const auto& m : fs::directory_iterator(e.path()))
            if (m.is_directory())
                for (const auto& s : fs::directory_iterator(m.path()))
                    if (s.is_directory() &&
                        s.path().filename().string().starts_with("seed_"))
                        has_runs = true;
        if (has_runs) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::string fmt_num(double x) {
    std::ostringstream o;
    o.precision(17);
    o << x;
    return o.str();
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
    std::string s;
    for (auto v : seeds) {
        if (!s.empty()) s += ";";
        s += std::to_string(v);
    }
    return s;
}

} // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Matrix build_dataset(const ExperimentConfig& cfg) {
    const std::string& name = cfg.dataset_name;
    if (name == "student_t")
        return gen_student_t(cfg.d, cfg.nu, cfg.n, cfg.matrix_seed, cfg.matrix_seed);
    if (name == "aniso_gauss")
        return gen_aniso_gauss(cfg.d, cfg.n, cfg.matrix_seed, cfg.matrix_seed);
    if (name == "toy2d")
        return gen_toy2d(cfg.n, cfg.modes, cfg.kappa, cfg.scale, cfg.matrix_seed);
    if (name == "piv") {
        if (!cfg.piv_file.empty())
            return load_matrix(cfg.piv_file);
        if (!cfg.piv_archive.empty()) {
            std::optional<std::size_t> trunc;
            if (cfg.trunc > 0) trunc = cfg.trunc;
            return piv_pipeline(cfg.piv_archive, cfg.grid_ny, cfg.grid_nx, trunc).data;
        }
        throw std::runtime_error("piv dataset needs piv_file or piv_archive");
    }
    throw std::runtime_error("unknown dataset: " + name);
}

RadialLaw make_oracle_law(const ExperimentConfig& cfg) {
    const std::string& name = cfg.dataset_name;
    if (name == "student_t") {
        Matrix a = mixing_matrix(cfg.d, cfg.matrix_seed);
        double nu = cfg.nu;
        return oracle_law([a, nu](Prng& rng, std::size_t m) {
            return row_norms(matmul_bt(sample_student_t(rng, m, a.rows, nu), a));
        });
    }
    if (name == "aniso_gauss") {
        Matrix a = mixing_matrix(cfg.d, cfg.matrix_seed);
        return oracle_law([a](Prng& rng, std::size_t m) {
            return row_norms(matmul_bt(sample_gaussian(rng, m, a.rows), a));
        });
    }
    if (name == "toy2d") {
        double scale = cfg.scale;
        return oracle_law([scale](Prng& rng, std::size_t m) {
            std::vector<double> r(m);
            for (double& x : r) x = std::abs(draw_student_t(rng, 3.0)) * scale;
            return r;
        });
    }
    throw std::runtime_error("no oracle radial law for dataset: " + name);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.label = cfg.resolved_label();
    const std::string cfg_bytes = serialize_config(cfg);

    Matrix data = build_dataset(cfg);
    DataSplit parts = split(data, cfg.split_seed);
    data = Matrix();
    const std::size_t d = parts.train.cols;
    RadialLaw emp = fit_empirical_radial(parts.train);
    std::vector<double> test_radii = row_norms(parts.test);

    // The true radial law is materialized only if some variant asks for it;
    // its absence (piv) then fails just those runs.
    RadialLaw oracle;
    bool oracle_tried = false;
    std::string oracle_error;
    auto get_oracle = [&]() -> const RadialLaw* {
        if (!oracle_tried) {
            oracle_tried = true;
            try {
                oracle = make_oracle_law(cfg);
            } catch (const std::exception& e) {
                oracle_error = e.what();
            }
        }
        if (!oracle_error.empty()) throw std::runtime_error(oracle_error);
        return &oracle;
    };

    // Variants sharing a train_key reuse one training per seed.
    std::map<std::pair<std::string, std::uint64_t>, TrainOutput> cache;

    for (const auto& mname : cfg.methods) {
        for (std::uint64_t seed : cfg.seeds) {
            RunOutcome out;
            out.dataset = result.label;
            out.method = mname;
            out.seed = seed;
            fs::path dir = fs::path(cfg.out_dir) / result.label / mname /
                           ("seed_" + std::to_string(seed));
            out.dir = dir.string();
            fs::create_directories(dir);
            write_text(dir / "config.cfg", cfg_bytes);
            fs::remove(dir / "error.txt");
            fs::remove(dir / "metrics.json");
            try {
                MethodVariant v = method_variant(mname);
                const RadialLaw* orc =
                    v.radial_mode == RadialMode::oracle ? get_oracle() : nullptr;

                auto key = std::make_pair(v.train_key, seed);
                auto it = cache.find(key);
                bool cached = it != cache.end();
                if (!cached) {
                    MethodSpec spec = training_spec(v, d, emp, orc);
                    Prng init_rng(seed, kStreamInit);
                    Prng batch_rng(seed, kStreamBatch);
                    auto t0 = std::chrono::steady_clock::now();
                    TrainOutput to;
                    to.result = train(spec, parts.train, cfg.train, init_rng, batch_rng);
                    to.seconds = seconds_since(t0);
                    it = cache.emplace(key, std::move(to)).first;
                }
                const TrainResult& tr = it->second.result;

                write_loss_csv(dir / "loss.csv", tr.loss_log);
                for (const auto& [step, model] : tr.checkpoints)
                    save_checkpoint(
                        (dir / ("checkpoint_" + std::to_string(step) + ".pt")).string(),
                        model, step);
                if (tr.diverged)
                    throw std::runtime_error("training diverged at step " +
                                             std::to_string(tr.diverged_at_step));

                SourceSampler gen_source = sampling_source(v, d, emp, orc);
                SamplerConfig scfg;
                scfg.steps = cfg.rk4_steps;
                scfg.project = v.project;
                scfg.projection_skip_norm = cfg.projection_skip_norm;
                Prng radius_rng(seed, kStreamGenRadius);
                Prng dir_rng(seed, kStreamGenDir);
                auto t0 = std::chrono::steady_clock::now();
                Matrix raw =
                    generate(tr.model, gen_source, radius_rng, dir_rng, cfg.n_gen, scfg);
                double gen_seconds = seconds_since(t0);
                save_matrix((dir / "samples.pt").string(), raw,
                            {{"dataset", result.label},
                             {"method", mname},
                             {"seed", seed}});

                // One evaluation stream per (dataset, checkpoint step) so every
                // method and seed sees the same projection directions.
                std::size_t final_step = cfg.train.steps;
                Prng eval_rng(fnv1a(result.label) ^
                                  (std::uint64_t(final_step) * 0x9E3779B97F4A7C15ull),
                              0);
                EvalOptions opts;
                opts.n_proj = cfg.n_proj;
                opts.with_angular = cfg.eval_angular;
                opts.with_mmd = cfg.eval_mmd;
                MetricsReport rep = evaluate_samples(raw, parts.test, opts, eval_rng);
                rep.dataset = result.label;
                rep.method = mname;
                rep.seed = seed;
                rep.checkpoint_step = final_step;

                ordered_json mj;
                mj["metadata"] = {{"dataset", result.label},
                                  {"method", mname},
                                  {"seed", seed},
                                  {"checkpoint_step", final_step},
                                  {"n_gen", cfg.n_gen},
                                  {"n_test", parts.test.rows},
                                  {"n_proj", cfg.n_proj},
                                  {"rk4_steps", cfg.rk4_steps},
                                  {"nfe", 4 * cfg.rk4_steps},
                                  {"projected", v.project},
                                  {"dropped_zero_rows", tr.dropped_zero_rows}};
                ordered_json mm;
                mm["radial_w1"] = rep.radial_w1;
                mm["ks"] = rep.ks;
                mm["sliced_w1"] = rep.sliced;
                if (rep.angular) mm["angular_sw"] = *rep.angular;
                if (rep.mmd) mm["mmd"] = *rep.mmd;
                mm["nan_rate"] = rep.rates.nan_rate;
                mm["exploding_rate"] = rep.rates.exploding_rate;
                mm["invalid_rate"] = rep.rates.invalid_rate;
                mj["metrics"] = mm;
                write_json(dir / "metrics.json", mj);

                std::vector<double> gen_norms = row_norms(finite_rows(raw));
                Prng hr(seed, kStreamHistRadius), hd(seed, kStreamHistDir);
                SourceDraw sd = sample_source(gen_source, hr, hd, cfg.n_gen);
                write_hist_csv(dir / "radial_hist.csv", gen_norms, row_norms(sd.x),
                               test_radii);

                ordered_json tj;
                tj["train_seconds"] = it->second.seconds;
                tj["train_cached"] = cached;
                tj["train_steps"] = cfg.train.steps;
                tj["generate_seconds"] = gen_seconds;
                tj["n_gen"] = cfg.n_gen;
                tj["nfe"] = 4 * cfg.rk4_steps;
                write_json(dir / "timing.json", tj);

                out.metrics = rep;
                out.ok = true;
            } catch (const std::exception& e) {
                out.error = e.what();
                write_text(dir / "error.txt", out.error + "\n");
            }
            result.runs.push_back(out);
        }
    }
    return result;
}

void aggregate_results(const std::string& out_dir) {
    for (const fs::path& ddir : dataset_dirs(out_dir)) {
        auto stats = collect_dataset(ddir);
        auto names = dataset_metric_names(stats);

        std::ostringstream csv;
        csv << "method,metric,mean,std,n_seeds,failed_seeds\n";
        ordered_json js;
        js["dataset"] = ddir.filename().string();
        ordered_json methods_json;
        for (const auto& [method, s] : stats) {
            ordered_json mj;
            mj["n_seeds"] = s.ok_seeds.size();
            mj["failed_seeds"] = s.failed_seeds;
            ordered_json metrics_json;
            for (const auto& key : names) {
                auto itv = s.values.find(key);
                if (itv == s.values.end() || itv->second.empty()) {
                    csv << method << "," << key << ",,,"
                        << 0 << "," << join_seeds(s.failed_seeds) << "\n";
                    metrics_json[key] = nullptr;
                    continue;
                }
                MeanStd ms = mean_std(itv->second);
                csv << method << "," << key << "," << fmt_num(ms.mean) << ","
                    << fmt_num(ms.std) << "," << ms.n << ","
                    << join_seeds(s.failed_seeds) << "\n";
                metrics_json[key] = {{"mean", ms.mean}, {"std", ms.std}, {"n", ms.n}};
            }
            mj["metrics"] = metrics_json;
            methods_json[method] = mj;
        }
        js["methods"] = methods_json;
        write_text(ddir / "summary.csv", csv.str());
        write_json(ddir / "summary.json", js);
    }
}

void write_tables(const std::string& out_dir) {
    fs::path tdir = fs::path(out_dir) / "tables";
    fs::create_directories(tdir);
    ordered_json all;
    for (const fs::path& ddir : dataset_dirs(out_dir)) {
        auto stats = collect_dataset(ddir);
        auto names = dataset_metric_names(stats);
        std::string label = ddir.filename().string();

        std::ostringstream csv;
        csv << "method";
        for (const auto& key : names) csv << "," << key;
        csv << ",seeds\n";
        ordered_json dj;
        for (const auto& [method, s] : stats) {
            csv << method;
            ordered_json mj;
            for (const auto& key : names) {
                auto itv = s.values.find(key);
                if (itv == s.values.end() || itv->second.empty()) {
                    csv << ",--";
                    mj[key] = nullptr;
                    continue;
                }
                MeanStd ms = mean_std(itv->second);
                std::ostringstream cell;
                cell.precision(4);
                cell << ms.mean << " +/- ";
                cell.precision(2);
                cell << ms.std;
                csv << "," << cell.str();
                mj[key] = {{"mean", ms.mean}, {"std", ms.std}, {"n", ms.n}};
            }
            csv << "," << s.ok_seeds.size() << "/"
                << (s.ok_seeds.size() + s.failed_seeds.size());
            if (!s.failed_seeds.empty()) csv << " FAILED:" << join_seeds(s.failed_seeds);
            csv << "\n";
            dj[method] = mj;
        }
        write_text(tdir / (label + ".csv"), csv.str());
        all[label] = dj;
    }
    write_json(tdir / "all_results.json", all);
}

ordered_json timing_protocol(const ExperimentConfig& cfg) {
    const std::string label = cfg.resolved_label();
    Matrix data = build_dataset(cfg);
    DataSplit parts = split(data, cfg.split_seed);
    data = Matrix();
    const std::size_t d = parts.train.cols;
    RadialLaw emp = fit_empirical_radial(parts.train);
    std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
    constexpr std::size_t warmup_steps = 10;

    ordered_json out;
    out["dataset"] = label;
    out["repeats"] = cfg.timing_repeats;
    out["batch"] = cfg.timing_batch;
    ordered_json methods_json;
    for (const auto& mname : cfg.methods) {
        MethodVariant v = method_variant(mname);
        const RadialLaw* orc = nullptr;
        RadialLaw oracle;
        if (v.radial_mode == RadialMode::oracle) {
            oracle = make_oracle_law(cfg);
            orc = &oracle;
        }
        MethodSpec spec = training_spec(v, d, emp, orc);

        // Per-step cost from the long-minus-warmup difference, so one-time
        // setup and the first steps' cache effects stay out of the estimate.
        TrainConfig long_cfg = cfg.train;
        long_cfg.steps = cfg.timing_train_steps;
        long_cfg.checkpoint_every = 0;
        TrainConfig warm_cfg = long_cfg;
        warm_cfg.steps = warmup_steps;
        ordered_json mj;
        std::vector<double> per_step;
        TrainResult last_train;
        for (std::size_t rep = 0; rep < cfg.timing_repeats; ++rep) {
            Prng wi(seed, kStreamInit), wb(seed, kStreamBatch);
            auto t0 = std::chrono::steady_clock::now();
            train(spec, parts.train, warm_cfg, wi, wb);
            double t_warm = seconds_since(t0);
            Prng li(seed, kStreamInit), lb(seed, kStreamBatch);
            t0 = std::chrono::steady_clock::now();
            last_train = train(spec, parts.train, long_cfg, li, lb);
            double t_long = seconds_since(t0);
            per_step.push_back((t_long - t_warm) /
                               double(cfg.timing_train_steps - warmup_steps));
        }
        mj["train_step_seconds"] = per_step;
        mj["train_step_seconds_mean"] = mean_std(per_step).mean;
        mj["train_steps"] = cfg.timing_train_steps;
        mj["train_warmup_steps"] = warmup_steps;

        SourceSampler gen_source = sampling_source(v, d, emp, orc);
        ordered_json sj;
        for (std::size_t nfe : cfg.timing_nfe) {
            if (nfe % 4 != 0 || nfe == 0)
                throw std::invalid_argument("timing nfe must be a positive multiple of 4");
            SamplerConfig scfg;
            scfg.steps = nfe / 4;
            scfg.project = v.project;
            scfg.projection_skip_norm = cfg.projection_skip_norm;
            std::vector<double> secs;
            for (std::size_t rep = 0; rep < cfg.timing_repeats; ++rep) {
                Prng rr(seed, 100 + 2 * rep), dr(seed, 101 + 2 * rep);
                auto t0 = std::chrono::steady_clock::now();
                generate(last_train.model, gen_source, rr, dr, cfg.timing_batch, scfg);
                secs.push_back(seconds_since(t0));
            }
            ordered_json nj;
            nj["seconds"] = secs;
            nj["mean"] = mean_std(secs).mean;
            nj["rk4_steps"] = nfe / 4;
            sj[std::to_string(nfe)] = nj;
        }
        mj["sampling"] = sj;
        methods_json[mname] = mj;
    }
    out["methods"] = methods_json;
    fs::path ddir = fs::path(cfg.out_dir) / label;
    fs::create_directories(ddir);
    write_json(ddir / "timing.json", out);
    return out;
}

} // namespace rafm
