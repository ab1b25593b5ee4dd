#include "rafm/piv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rafm {

namespace {

// One "a;b;c;d" row; returns false on any malformed field.
bool parse_row(const std::string& line, double out[4]) {
    const char* p = line.c_str();
    for (int k = 0; k < 4; ++k) {
        char* end = nullptr;
        out[k] = std::strtod(p, &end);
        if (end == p) return false;
        p = end;
        if (k < 3) {
            if (*p != ';') return false;
            ++p;
        }
    }
    while (*p == ' ' || *p == '\r' || *p == '\t') ++p;
    return *p == '\0';
}

} // namespace

VelocityFrame parse_davis(const std::string& text, std::size_t ny, std::size_t nx) {
    std::vector<double> vx, vy;
    vx.reserve(ny * nx);
    vy.reserve(ny * nx);
    bool has_nan = false;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        double f[4];
        if (!parse_row(line, f))
            throw FrameRejected(FrameReject::ParseFailure,
                                "parse failure at line " + std::to_string(lineno));
        if (std::isnan(f[2]) || std::isnan(f[3])) has_nan = true;
        vx.push_back(f[2]);
        vy.push_back(f[3]);
    }
    if (vx.size() != ny * nx)
        throw FrameRejected(FrameReject::WrongCount,
                            "expected " + std::to_string(ny * nx) + " points, got " +
                                std::to_string(vx.size()));
    if (has_nan)
        throw FrameRejected(FrameReject::ContainsNan, "NaN velocity values present");

    VelocityFrame frame;
    frame.vx = Matrix(ny, nx);
    frame.vy = Matrix(ny, nx);
    std::copy(vx.begin(), vx.end(), frame.vx.data.begin());
    std::copy(vy.begin(), vy.end(), frame.vy.data.begin());
    return frame;
}

namespace {

// d/d(axis) at unit spacing: central in the interior, one-sided at the edges.
Matrix gradient(const Matrix& f, int axis) {
    std::size_t ny = f.rows, nx = f.cols;
    Matrix g(ny, nx);
    if (axis == 0) {
        if (ny < 2) throw std::invalid_argument("gradient: need >= 2 rows");
        for (std::size_t j = 0; j < nx; ++j) {
            g(0, j) = f(1, j) - f(0, j);
            for (std::size_t i = 1; i + 1 < ny; ++i)
                g(i, j) = 0.5 * (f(i + 1, j) - f(i - 1, j));
            g(ny - 1, j) = f(ny - 1, j) - f(ny - 2, j);
        }
    } else {
        if (nx < 2) throw std::invalid_argument("gradient: need >= 2 cols");
        for (std::size_t i = 0; i < ny; ++i) {
            g(i, 0) = f(i, 1) - f(i, 0);
            for (std::size_t j = 1; j + 1 < nx; ++j)
                g(i, j) = 0.5 * (f(i, j + 1) - f(i, j - 1));
            g(i, nx - 1) = f(i, nx - 1) - f(i, nx - 2);
        }
    }
    return g;
}

std::vector<std::size_t> even_indices(std::size_t extent, std::size_t count) {
    std::vector<std::size_t> idx(count);
    if (count == 1) {
        idx[0] = 0;
        return idx;
    }
    double step = static_cast<double>(extent - 1) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i)
        idx[i] = static_cast<std::size_t>(step * static_cast<double>(i));
    idx[count - 1] = extent - 1;
    return idx;
}

} // namespace

Matrix vorticity(const Matrix& vx, const Matrix& vy) {
    if (vx.rows != vy.rows || vx.cols != vy.cols)
        throw std::invalid_argument("vorticity: grid shape mismatch");
    Matrix dvy_dx = gradient(vy, 1);
    Matrix dvx_dy = gradient(vx, 0);
    Matrix omega(vx.rows, vx.cols);
    for (std::size_t k = 0; k < omega.data.size(); ++k)
        omega.data[k] = dvy_dx.data[k] - dvx_dy.data[k];
    return omega;
}

std::vector<double> subsample_grid(const Matrix& omega, std::size_t ny, std::size_t nx) {
    if (ny < 1 || ny > omega.rows || nx < 1 || nx > omega.cols)
        throw std::invalid_argument("subsample_grid: grid out of range");
    auto rows = even_indices(omega.rows, ny);
    auto cols = even_indices(omega.cols, nx);
    std::vector<double> out;
    out.reserve(ny * nx);
    for (std::size_t r : rows)
        for (std::size_t c : cols)
            out.push_back(omega(r, c));
    return out;
}

PivResult piv_pipeline(const std::string& archive_dir, std::size_t grid_ny,
                       std::size_t grid_nx, std::optional<std::size_t> trunc,
                       std::size_t frame_ny, std::size_t frame_nx) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(archive_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.starts_with("Serie_") && name.ends_with(".txt"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("piv_pipeline: no Serie_*.txt files in " + archive_dir);

    PivResult res;
    std::vector<std::vector<double>> rows;
    for (const auto& path : files) {
        std::ifstream f(path, std::ios::binary);
        std::stringstream buf;
        buf << f.rdbuf();
        try {
            VelocityFrame frame = parse_davis(buf.str(), frame_ny, frame_nx);
            Matrix omega = vorticity(frame.vx, frame.vy);
            rows.push_back(subsample_grid(omega, grid_ny, grid_nx));
            ++res.retained;
        } catch (const FrameRejected& e) {
            ++res.skipped;
            res.rejects.emplace_back(fs::path(path).filename().string(), e.reason());
        }
    }
    if (rows.empty())
        throw std::runtime_error("piv_pipeline: every frame was rejected");

    std::size_t d = grid_ny * grid_nx;
    Matrix data(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), data.row(i).begin());

    for (double& v : data.data)
        v /= 2.5;

    auto center = [](Matrix& m) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < m.rows; ++i)
                mean += m(i, j);
            mean /= static_cast<double>(m.rows);
            for (std::size_t i = 0; i < m.rows; ++i)
                m(i, j) -= mean;
        }
    };
    center(data);

    if (trunc && *trunc < d) {
        Matrix cut(data.rows, *trunc);
        for (std::size_t i = 0; i < data.rows; ++i)
            for (std::size_t j = 0; j < *trunc; ++j)
                cut(i, j) = data(i, j);
        center(cut);
        data = std::move(cut);
    }
    res.data = std::move(data);
    return res;
}

} // namespace rafm
