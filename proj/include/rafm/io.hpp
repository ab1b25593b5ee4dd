#pragma once

#include "rafm/matrix.hpp"
#include "rafm/mlp.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rafm {

using ordered_json = nlohmann::ordered_json;

// Artifact container: one line of JSON, '\n', then a flat little-endian
// float32 blob whose element count is header["count"].
void save_blob(const std::string& path, ordered_json header,
               const std::vector<float>& blob);

struct BlobFile {
    ordered_json header;
    std::vector<float> data;
};
BlobFile load_blob(const std::string& path);

// Matrices stored as float32 row-major with n, d in the header.
void save_matrix(const std::string& path, const Matrix& m, ordered_json meta = {});
Matrix load_matrix(const std::string& path);

// Checkpoint: layer shapes, d, step in the header; parameters as the blob.
void save_checkpoint(const std::string& path, const Mlp<float>& model, std::size_t step);
struct Checkpoint {
    Mlp<float> model;
    std::size_t step = 0;
};
Checkpoint load_checkpoint(const std::string& path);

} // namespace rafm
