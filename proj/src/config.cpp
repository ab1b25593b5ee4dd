#include "rafm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rafm {

std::string ExperimentConfig::resolved_label() const {
    if (!label.empty()) return label;
    if (dataset_name == "toy2d") return "toy2d";
    return dataset_name + "_d" + std::to_string(d);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::runtime_error("config: bad integer for " + key + ": " + v);
    return x;
}

double to_f64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad real for " + key + ": " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config: bad bool for " + key + ": " + v);
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: malformed line " + std::to_string(lineno));
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "dataset.name") cfg.dataset_name = val;
        else if (key == "dataset.label") cfg.label = val;
        else if (key == "dataset.d") cfg.d = to_u64(key, val);
        else if (key == "dataset.nu") cfg.nu = to_f64(key, val);
        else if (key == "dataset.n") cfg.n = to_u64(key, val);
        else if (key == "dataset.matrix_seed") cfg.matrix_seed = to_u64(key, val);
        else if (key == "dataset.split_seed") cfg.split_seed = to_u64(key, val);
        else if (key == "dataset.modes") cfg.modes = to_u64(key, val);
        else if (key == "dataset.kappa") cfg.kappa = to_f64(key, val);
        else if (key == "dataset.scale") cfg.scale = to_f64(key, val);
        else if (key == "dataset.piv_file") cfg.piv_file = val;
        else if (key == "dataset.piv_archive") cfg.piv_archive = val;
        else if (key == "dataset.grid_ny") cfg.grid_ny = to_u64(key, val);
        else if (key == "dataset.grid_nx") cfg.grid_nx = to_u64(key, val);
        else if (key == "dataset.trunc") cfg.trunc = to_u64(key, val);
        else if (key == "run.methods") cfg.methods = split_list(val);
        else if (key == "run.seeds") {
            cfg.seeds.clear();
            for (const auto& s : split_list(val))
                cfg.seeds.push_back(to_u64(key, s));
        }
        else if (key == "run.out_dir") cfg.out_dir = val;
        else if (key == "train.steps") cfg.train.steps = to_u64(key, val);
        else if (key == "train.batch") cfg.train.batch = to_u64(key, val);
        else if (key == "train.checkpoint_every") cfg.train.checkpoint_every = to_u64(key, val);
        else if (key == "train.lr") cfg.train.lr = to_f64(key, val);
        else if (key == "sampler.steps") cfg.rk4_steps = to_u64(key, val);
        else if (key == "sampler.projection_skip_norm")
            cfg.projection_skip_norm = to_f64(key, val);
        else if (key == "eval.n_gen") cfg.n_gen = to_u64(key, val);
        else if (key == "eval.n_proj") cfg.n_proj = to_u64(key, val);
        else if (key == "eval.angular") cfg.eval_angular = to_bool(key, val);
        else if (key == "eval.mmd") cfg.eval_mmd = to_bool(key, val);
        else if (key == "timing.nfe") {
            cfg.timing_nfe.clear();
            for (const auto& s : split_list(val))
                cfg.timing_nfe.push_back(to_u64(key, s));
        }
        else if (key == "timing.repeats") cfg.timing_repeats = to_u64(key, val);
        else if (key == "timing.train_steps") cfg.timing_train_steps = to_u64(key, val);
        else if (key == "timing.batch") cfg.timing_batch = to_u64(key, val);
        else
            throw std::runtime_error("config: unknown key " + key);
    }
    if (cfg.dataset_name.empty())
        throw std::runtime_error("config: dataset.name is required");
    if (cfg.methods.empty())
        throw std::runtime_error("config: run.methods is required");
    for (const auto& m : cfg.methods)
        method_variant(m);  // validates names
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("load_config: cannot open " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

namespace {

std::string fmt_real(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, std::string>)
            out += xs[i];
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

} // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream o;
    o << "[dataset]\n";
    o << "name = " << cfg.dataset_name << "\n";
    o << "label = " << cfg.resolved_label() << "\n";
    o << "d = " << cfg.d << "\n";
    o << "nu = " << fmt_real(cfg.nu) << "\n";
    o << "n = " << cfg.n << "\n";
    o << "matrix_seed = " << cfg.matrix_seed << "\n";
    o << "split_seed = " << cfg.split_seed << "\n";
    o << "modes = " << cfg.modes << "\n";
    o << "kappa = " << fmt_real(cfg.kappa) << "\n";
    o << "scale = " << fmt_real(cfg.scale) << "\n";
    o << "piv_file = " << cfg.piv_file << "\n";
    o << "piv_archive = " << cfg.piv_archive << "\n";
    o << "grid_ny = " << cfg.grid_ny << "\n";
    o << "grid_nx = " << cfg.grid_nx << "\n";
    o << "trunc = " << cfg.trunc << "\n";
    o << "\n[run]\n";
    o << "methods = " << fmt_list(cfg.methods) << "\n";
    o << "seeds = " << fmt_list(cfg.seeds) << "\n";
    o << "out_dir = " << cfg.out_dir << "\n";
    o << "\n[train]\n";
    o << "steps = " << cfg.train.steps << "\n";
    o << "batch = " << cfg.train.batch << "\n";
    o << "checkpoint_every = " << cfg.train.checkpoint_every << "\n";
    o << "lr = " << fmt_real(cfg.train.lr) << "\n";
    o << "\n[sampler]\n";
    o << "steps = " << cfg.rk4_steps << "\n";
    o << "projection_skip_norm = " << fmt_real(cfg.projection_skip_norm) << "\n";
    o << "\n[eval]\n";
    o << "n_gen = " << cfg.n_gen << "\n";
    o << "n_proj = " << cfg.n_proj << "\n";
    o << "angular = " << (cfg.eval_angular ? "true" : "false") << "\n";
    o << "mmd = " << (cfg.eval_mmd ? "true" : "false") << "\n";
    o << "\n[timing]\n";
    o << "nfe = " << fmt_list(cfg.timing_nfe) << "\n";
    o << "repeats = " << cfg.timing_repeats << "\n";
    o << "train_steps = " << cfg.timing_train_steps << "\n";
    o << "batch = " << cfg.timing_batch << "\n";
    return o.str();
}

MethodVariant method_variant(const std::string& name) {
    MethodVariant v;
    v.name = name;
    if (name == "gaussian_fm") {
        v.method = Method::gaussian_fm;
        v.project = false;
        v.train_key = "gaussian_fm";
    } else if (name == "source_only") {
        v.method = Method::source_only;
        v.project = false;
        v.train_key = "source_only";
    } else if (name == "source_only_oracle") {
        v.method = Method::source_only;
        v.radial_mode = RadialMode::oracle;
        v.project = false;
        v.train_key = "source_only_oracle";
    } else if (name == "rafm") {
        v.method = Method::rafm;
        v.project = true;
        v.train_key = "rafm";
    } else if (name == "rafm_oracle") {
        v.method = Method::rafm;
        v.radial_mode = RadialMode::oracle;
        v.project = true;
        v.train_key = "rafm";
    } else if (name == "rafm_noproj") {
        v.method = Method::rafm;
        v.project = false;
        v.train_key = "rafm";
    } else {
        throw std::runtime_error("unknown method: " + name);
    }
    return v;
}

} // namespace rafm
