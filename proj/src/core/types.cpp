#include "coilsketch/core/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace coilsketch {

GridShape::GridShape(std::vector<Index> dims) : dims_(std::move(dims))
{
    if (dims_.size() < 2 || dims_.size() > 3) {
        throw ShapeError("grid must have 2 or 3 axes, got " + std::to_string(dims_.size()));
    }
    for (Index d : dims_) {
        if (d < 2) {
            throw ShapeError("every grid axis must have at least 2 points");
        }
    }
    size_ = std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
}

Index GridShape::stride(Index axis) const
{
    Index s = 1;
    for (Index a = ndim() - 1; a > axis; --a) {
        s *= dims_[static_cast<std::size_t>(a)];
    }
    return s;
}

std::string GridShape::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        os << (i ? "x" : "") << dims_[i];
    }
    return os.str();
}

Image::Image(GridShape s, Vec v) : shape(std::move(s)), values(std::move(v))
{
    if (values.size() != shape.size()) {
        throw ShapeError("image has " + std::to_string(values.size()) + " values but shape " +
                         shape.to_string() + " needs " + std::to_string(shape.size()));
    }
    if (!values.allFinite()) {
        throw ParameterError("image contains non-finite values");
    }
}

Image Image::zeros(const GridShape& s)
{
    return Image(s, Vec::Zero(s.size()));
}

void Trajectory::validate(const GridShape& shape) const
{
    if (samples() < 1) {
        throw ShapeError("trajectory has no samples");
    }
    if (ndim() != shape.ndim()) {
        throw ShapeError("trajectory dimensionality does not match grid " + shape.to_string());
    }
    for (Index a = 0; a < ndim(); ++a) {
        const double half = static_cast<double>(shape[a]) / 2.0;
        for (Index i = 0; i < samples(); ++i) {
            const double f = points(i, a);
            if (!std::isfinite(f) || f < -half - 1e-9 || f > half + 1e-9) {
                throw ShapeError("trajectory coordinate " + std::to_string(f) +
                                 " outside [-n/2, n/2] on axis " + std::to_string(a));
            }
            if (kind == TrajectoryKind::cartesian_mask) {
                if (f != std::round(f) || f >= half) {
                    throw ShapeError("cartesian mask coordinates must be integers in [-n/2, n/2)");
                }
            }
        }
    }
}

}  // namespace coilsketch
