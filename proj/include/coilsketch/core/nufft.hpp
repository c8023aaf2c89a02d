#pragma once

#include <memory>

#include "coilsketch/core/fft.hpp"
#include "coilsketch/core/kernels.hpp"
#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// Single-coil Fourier encoding: image grid (D values) -> k-space samples (N values).
class FourierSampler {
public:
    virtual ~FourierSampler() = default;

    [[nodiscard]] virtual const GridShape& shape() const noexcept = 0;
    [[nodiscard]] virtual Index samples() const noexcept = 0;
    virtual void forward(const cplx* img, cplx* ksp) const = 0;
    virtual void adjoint(const cplx* ksp, cplx* img) const = 0;

    [[nodiscard]] Vec forward(const Vec& x) const;
    [[nodiscard]] Vec adjoint(const Vec& k) const;
};

using SamplerPtr = std::shared_ptr<const FourierSampler>;

/// Centered FFT followed by selection of the masked bins.
class CartesianSampler final : public FourierSampler {
public:
    CartesianSampler(GridShape shape, const Trajectory& mask);

    const GridShape& shape() const noexcept override { return fft_.shape(); }
    Index samples() const noexcept override { return static_cast<Index>(bins_.size()); }
    void forward(const cplx* img, cplx* ksp) const override;
    void adjoint(const cplx* ksp, cplx* img) const override;
    using FourierSampler::adjoint;
    using FourierSampler::forward;

private:
    CenteredFFT fft_;
    std::vector<Index> bins_;
};

/// Direct O(N·D) evaluation of
///   k[i] = D^{-1/2} Σ_r x[r] exp(-i2π Σ_a f_{i,a} r_a / n_a).
/// This is the reference path; it also serves as the accuracy oracle for gridding.
class DirectNudft final : public FourierSampler {
public:
    DirectNudft(GridShape shape, const Trajectory& traj,
                kernels::Exec exec = kernels::Exec::parallel);

    const GridShape& shape() const noexcept override { return tables_.shape; }
    Index samples() const noexcept override { return tables_.samples; }
    void forward(const cplx* img, cplx* ksp) const override;
    void adjoint(const cplx* ksp, cplx* img) const override;
    using FourierSampler::adjoint;
    using FourierSampler::forward;

private:
    kernels::PhaseTables tables_;
    kernels::Exec exec_;
};

struct GriddingParams {
    double oversampling = 1.25;
    int width = 6;
};

/// Kaiser-Bessel gridding NUFFT: apodization correction, zero-padded FFT on
/// the oversampled grid, then W^ndim-tap interpolation. Exact adjoint of itself.
class GriddingNufft final : public FourierSampler {
public:
    GriddingNufft(GridShape shape, const Trajectory& traj, GriddingParams params = {},
                  kernels::Exec exec = kernels::Exec::parallel);

    const GridShape& shape() const noexcept override { return shape_; }
    Index samples() const noexcept override { return table_.samples; }
    void forward(const cplx* img, cplx* ksp) const override;
    void adjoint(const cplx* ksp, cplx* img) const override;
    using FourierSampler::adjoint;
    using FourierSampler::forward;

    [[nodiscard]] const GridShape& oversampled_shape() const noexcept { return fft_.shape(); }
    [[nodiscard]] double beta() const noexcept { return beta_; }

private:
    GridShape shape_;
    CenteredFFT fft_;
    kernels::InterpTable table_;
    std::vector<Index> pad_index_;  // image voxel -> oversampled grid index
    RVec apodization_;              // per-voxel deapodization incl. scale
    kernels::Exec exec_;
    double beta_ = 0.0;
};

enum class NufftBackend { direct, gridding };

/// Builds the sampler matching the trajectory kind.
SamplerPtr make_sampler(const GridShape& shape, const Trajectory& traj,
                        NufftBackend backend = NufftBackend::gridding);

/// Direct non-uniform DFT of an image at the trajectory points.
Vec dft_nonuniform(const Image& img, const Trajectory& traj);

/// Sampler as a LinOp (one coil transform per application).
LinOp sampler_op(SamplerPtr sampler, LedgerPtr ledger = nullptr);

}  // namespace coilsketch
