#include "rafm/io.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "blob format is little-endian");

namespace rafm {

void save_blob(const std::string& path, ordered_json header,
               const std::vector<float>& blob) {
    header["count"] = blob.size();
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("save_blob: cannot open " + path);
    f << header.dump() << "\n";
    f.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!f)
        throw std::runtime_error("save_blob: write failed for " + path);
}

BlobFile load_blob(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("load_blob: cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw std::runtime_error("load_blob: missing header in " + path);
    BlobFile out;
    out.header = ordered_json::parse(line);
    std::size_t count = out.header.at("count").get<std::size_t>();
    out.data.resize(count);
    f.read(reinterpret_cast<char*>(out.data.data()),
           static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(f.gcount()) != count * sizeof(float))
        throw std::runtime_error("load_blob: truncated blob in " + path);
    return out;
}

void save_matrix(const std::string& path, const Matrix& m, ordered_json meta) {
    ordered_json header;
    header["kind"] = "matrix";
    header["n"] = m.rows;
    header["d"] = m.cols;
    if (!meta.is_null())
        for (auto& [k, v] : meta.items())
            header[k] = v;
    std::vector<float> blob(m.data.size());
    for (std::size_t k = 0; k < m.data.size(); ++k)
        blob[k] = static_cast<float>(m.data[k]);
    save_blob(path, std::move(header), blob);
}

Matrix load_matrix(const std::string& path) {
    BlobFile b = load_blob(path);
    Matrix m(b.header.at("n").get<std::size_t>(), b.header.at("d").get<std::size_t>());
    if (b.data.size() != m.data.size())
        throw std::runtime_error("load_matrix: size mismatch in " + path);
    for (std::size_t k = 0; k < b.data.size(); ++k)
        m.data[k] = static_cast<double>(b.data[k]);
    return m;
}

void save_checkpoint(const std::string& path, const Mlp<float>& model, std::size_t step) {
    std::size_t d = model.d, w = Mlp<float>::width;
    ordered_json header;
    header["kind"] = "checkpoint";
    header["d"] = d;
    header["step"] = step;
    header["layers"] = ordered_json::array({
        ordered_json::array({w, d + 1}), ordered_json::array({w}),
        ordered_json::array({w, w}), ordered_json::array({w}),
        ordered_json::array({w, w}), ordered_json::array({w}),
        ordered_json::array({d, w}), ordered_json::array({d}),
    });
    save_blob(path, std::move(header), model.params);
}

Checkpoint load_checkpoint(const std::string& path) {
    BlobFile b = load_blob(path);
    if (b.header.at("kind").get<std::string>() != "checkpoint")
        throw std::runtime_error("load_checkpoint: not a checkpoint: " + path);
    Checkpoint out;
    out.step = b.header.at("step").get<std::size_t>();
    out.model.d = b.header.at("d").get<std::size_t>();
    if (b.data.size() != Mlp<float>::param_count(out.model.d))
        throw std::runtime_error("load_checkpoint: parameter count mismatch in " + path);
    out.model.params = std::move(b.data);
    return out;
}

} // namespace rafm
