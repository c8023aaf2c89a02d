#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coilsketch {

using cplx = std::complex<double>;
using Index = Eigen::Index;

/// Complex column vector used for images, k-space and all operator I/O.
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
/// Column-major; one column per coil.
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
/// Per-voxel boolean selection, e.g. the object support.
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Thrown when array sizes or grid shapes disagree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown for out-of-domain parameters (negative weights, bad coil counts, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rectangular 2D or 3D grid, row-major (last axis fastest).
class GridShape {
public:
    GridShape() = default;
    explicit GridShape(std::vector<Index> dims);

    [[nodiscard]] const std::vector<Index>& dims() const noexcept { return dims_; }
    [[nodiscard]] Index ndim() const noexcept { return static_cast<Index>(dims_.size()); }
    [[nodiscard]] Index operator[](Index axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
    [[nodiscard]] Index size() const noexcept { return size_; }
    /// Stride (in elements) of `axis` in the flattened row-major layout.
    [[nodiscard]] Index stride(Index axis) const;

    bool operator==(const GridShape&) const = default;

    [[nodiscard]] std::string to_string() const;

private:
    std::vector<Index> dims_;
    Index size_ = 0;
};

struct Image {
    GridShape shape;
    Vec values;

    Image() = default;
    Image(GridShape s, Vec v);
    static Image zeros(const GridShape& s);
};

enum class TrajectoryKind { cartesian_mask, non_cartesian };

/// Sample locations in cycles/FOV, one row per sample, one column per grid axis.
struct Trajectory {
    RMat points;
    TrajectoryKind kind = TrajectoryKind::non_cartesian;

    [[nodiscard]] Index samples() const noexcept { return points.rows(); }
    [[nodiscard]] Index ndim() const noexcept { return points.cols(); }

    /// Checks sample count, coordinate range and integrality for masks.
    void validate(const GridShape& shape) const;
};

/// Centered integer coordinate of index `i` along an axis of length `n`.
inline Index centered_coord(Index i, Index n) noexcept { return i - n / 2; }

}  // namespace coilsketch
