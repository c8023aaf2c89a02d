#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// Raised for unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// C-order float64 or complex128 array as stored in an NPY v1.0 file.
struct NpyArray {
    std::vector<Index> shape;
    bool is_complex = false;
    std::vector<double> data;  // interleaved re, im when complex

    [[nodiscard]] Index count() const;
    /// Throws IoError when the dtype does not match.
    [[nodiscard]] Vec to_complex() const;
    [[nodiscard]] RVec to_real() const;
    /// Row-major rows × cols view of a 2-d real array.
    [[nodiscard]] RMat to_real_matrix() const;

    static NpyArray complex_array(const Vec& v, std::vector<Index> shape);
    static NpyArray real_array(const RVec& v, std::vector<Index> shape);
    static NpyArray real_matrix(const RMat& m);
    /// Column-per-coil matrix (D × C) stored as shape {C, dims...}.
    static NpyArray coil_stack(const CMat& m, const GridShape& shape);
};

void write_npy(const std::filesystem::path& path, const NpyArray& arr);
NpyArray read_npy(const std::filesystem::path& path);

/// Inverse of NpyArray::coil_stack.
CMat coil_columns(const NpyArray& arr, Index voxels);

}  // namespace coilsketch
