#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// Daubechies-4 (8-tap, four vanishing moments) reconstruction low-pass filter.
inline constexpr std::array<double, 8> kDb4Lowpass = {
    0.23037781330885523,  0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
    -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278,
};

/// Orthogonal multilevel separable DWT with periodic boundaries.
/// Coefficients use the in-place Mallat layout: after each level the
/// approximation band occupies the leading half of every axis.
class Wavelet {
public:
    /// levels < 0 picks the largest L <= 4 with every dim divisible by 2^L.
    explicit Wavelet(std::vector<Index> dims, int levels = -1);

    [[nodiscard]] int levels() const noexcept { return levels_; }
    [[nodiscard]] Index size() const noexcept { return size_; }
    [[nodiscard]] const std::vector<Index>& dims() const noexcept { return dims_; }

    [[nodiscard]] Vec forward(const Vec& x) const;
    /// Adjoint equals inverse.
    [[nodiscard]] Vec adjoint(const Vec& c) const;

    static int default_levels(const std::vector<Index>& dims);

private:
    void transform_axis(Vec& data, const std::vector<Index>& block, std::size_t axis,
                        bool inverse) const;

    std::vector<Index> dims_;
    std::vector<Index> strides_;
    Index size_ = 0;
    int levels_ = 0;
};

Vec wavelet_forward(const Image& img, int levels = -1);
Vec wavelet_adjoint(const GridShape& shape, const Vec& coeffs, int levels = -1);
LinOp wavelet_op(const GridShape& shape, int levels = -1, LedgerPtr ledger = nullptr);

/// Per-axis circular forward differences, stacked axis-major (ndim·D outputs).
class FiniteDiff {
public:
    explicit FiniteDiff(std::vector<Index> dims);

    [[nodiscard]] Index size() const noexcept { return size_; }
    [[nodiscard]] Index axes() const noexcept { return static_cast<Index>(dims_.size()); }

    [[nodiscard]] Vec forward(const Vec& x) const;
    /// Negative circular divergence.
    [[nodiscard]] Vec adjoint(const Vec& y) const;

private:
    std::vector<Index> dims_;
    std::vector<Index> strides_;
    Index size_ = 0;
};

Vec finite_diff_forward(const Image& img);
Vec finite_diff_adjoint(const GridShape& shape, const Vec& diffs);
LinOp finite_diff_op(const GridShape& shape, LedgerPtr ledger = nullptr);

/// Largest eigenvalue of a self-adjoint PSD operator by power iteration from
/// a seeded random start. Returns 0 for the zero operator.
double max_eig_power(const LinOp& op, int iters = 30, std::uint64_t seed = 0);

}  // namespace coilsketch
