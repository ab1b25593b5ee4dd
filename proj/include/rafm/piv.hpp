#pragma once

#include "rafm/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rafm {

// Why a frame was discarded.
enum class FrameReject { ParseFailure, WrongCount, ContainsNan };

class FrameRejected : public std::exception {
public:
    FrameRejected(FrameReject reason, std::string detail)
        : reason_(reason), detail_(std::move(detail)) {}
    FrameReject reason() const { return reason_; }
    const char* what() const noexcept override { return detail_.c_str(); }

private:
    FrameReject reason_;
    std::string detail_;
};

struct VelocityFrame {
    Matrix vx, vy;  // (ny, nx) grids, x varying along the column axis
};

// DaVis text frame: rows "x;y;Vx;Vy" with decimal-point reals, expected to
// contain exactly ny*nx points in x-fastest order. Coordinates are discarded.
// Throws FrameRejected on malformed rows, wrong point count, or NaN velocities.
VelocityFrame parse_davis(const std::string& text, std::size_t ny = 740,
                          std::size_t nx = 545);

// omega = dVy/dx - dVx/dy at unit spacing; central differences inside,
// one-sided two-point at the grid edges.
Matrix vorticity(const Matrix& vx, const Matrix& vy);

// Values at the intersections of ny evenly spaced row indices and nx evenly
// spaced column indices (endpoints included, spacing truncated to integers),
// flattened row-major.
std::vector<double> subsample_grid(const Matrix& omega, std::size_t ny, std::size_t nx);

struct PivResult {
    Matrix data;
    std::size_t retained = 0;
    std::size_t skipped = 0;
    std::vector<std::pair<std::string, FrameReject>> rejects;
};

// Full preprocessing: parse every Serie_*.txt under archive_dir (sorted by
// name), compute vorticity, subsample to (grid_ny, grid_nx), stack, divide by
// 2.5, center columns on the full-dataset means; optionally keep only the
// first trunc coordinates and re-center.
PivResult piv_pipeline(const std::string& archive_dir, std::size_t grid_ny,
                       std::size_t grid_nx, std::optional<std::size_t> trunc = {},
                       std::size_t frame_ny = 740, std::size_t frame_nx = 545);

} // namespace rafm
