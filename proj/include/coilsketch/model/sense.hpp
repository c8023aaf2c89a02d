#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/nufft.hpp"
#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// C coil sensitivity profiles on a grid; column c of `coils` is c_c.
struct SensitivityMaps {
    GridShape shape;
    CMat coils;  // D x C

    [[nodiscard]] Index count() const noexcept { return coils.cols(); }
    void validate() const;
};

/// Density compensation w >= 0. One column shared by all coils, or one per coil.
struct DensityWeights {
    RMat w;  // N x 1, or N x C

    DensityWeights() = default;
    explicit DensityWeights(RVec shared);
    explicit DensityWeights(RMat per_coil);

    [[nodiscard]] Index samples() const noexcept { return w.rows(); }
    [[nodiscard]] bool shared() const;
    void validate() const;
};

/// Per-coil k-space samples (coil-major columns) plus the trajectory.
struct KSpaceData {
    Trajectory traj;
    CMat coils;  // N x C
    bool weights_applied = false;

    [[nodiscard]] Index count() const noexcept { return coils.cols(); }
    [[nodiscard]] Index samples() const noexcept { return coils.rows(); }
    /// All coils stacked into one C·N vector.
    [[nodiscard]] Vec stacked() const;
};

/// A = W^{1/2} F C: per coil, multiply by the map, Fourier-sample, weight.
///
/// Forward and adjoint each record C coil transforms into the ledger. The
/// Fourier sampler and weights are shared (immutable) between operators
/// derived from one another, e.g. coil subsets and sketched operators.
class SenseOperator {
public:
    SenseOperator(SensitivityMaps maps, SamplerPtr sampler,
                  std::optional<DensityWeights> weights = std::nullopt,
                  LedgerPtr ledger = nullptr);

    [[nodiscard]] const SensitivityMaps& maps() const noexcept { return maps_; }
    [[nodiscard]] const GridShape& shape() const noexcept { return maps_.shape; }
    [[nodiscard]] Index coils() const noexcept { return maps_.count(); }
    [[nodiscard]] Index samples() const noexcept { return sampler_->samples(); }
    [[nodiscard]] Index in_dim() const noexcept { return maps_.shape.size(); }
    [[nodiscard]] Index out_dim() const noexcept { return coils() * samples(); }
    [[nodiscard]] const SamplerPtr& sampler() const noexcept { return sampler_; }
    [[nodiscard]] const std::optional<DensityWeights>& weights() const noexcept { return weights_; }
    [[nodiscard]] const LedgerPtr& ledger() const noexcept { return ledger_; }

    [[nodiscard]] Vec forward(const Vec& x) const;
    [[nodiscard]] Vec adjoint(const Vec& y) const;
    /// Forward/adjoint of a single coil (records one coil transform).
    [[nodiscard]] Vec forward_coil(Index c, const Vec& x) const;
    [[nodiscard]] Vec adjoint_coil(Index c, const Vec& yc) const;

    /// y = W^{1/2} k, coil-stacked.
    [[nodiscard]] Vec weight_data(const KSpaceData& data) const;

    [[nodiscard]] SenseOperator with_maps(SensitivityMaps maps) const;
    [[nodiscard]] SenseOperator with_ledger(LedgerPtr ledger) const;
    [[nodiscard]] SenseOperator without_weights() const;
    [[nodiscard]] SenseOperator subset(std::span<const Index> coil_ids) const;

    [[nodiscard]] LinOp as_linop() const;

private:
    [[nodiscard]] const double* sqrt_weight(Index c) const;

    SensitivityMaps maps_;
    SamplerPtr sampler_;
    std::optional<DensityWeights> weights_;
    RMat sqrt_w_;
    LedgerPtr ledger_;
};

SenseOperator build_sense(const SensitivityMaps& maps, const Trajectory& traj,
                          std::optional<DensityWeights> weights = std::nullopt,
                          NufftBackend backend = NufftBackend::gridding,
                          LedgerPtr ledger = nullptr);

/// Ramp |f| weights, DC samples set to half the smallest nonzero radius, max-normalized.
DensityWeights radial_density_weights(const Trajectory& traj);

struct CompressionResult {
    KSpaceData data;
    SensitivityMaps maps;
    CMat matrix;  // keep x C; applied to data and maps alike
    RVec singular_values;  // all C, descending
    double energy_fraction = 1.0;
};

/// SVD coil compression from the stacked coil data, keeping the `keep`
/// highest-energy virtual coils.
CompressionResult coil_compress_svd(const KSpaceData& data, const SensitivityMaps& maps,
                                    Index keep);

/// Smallest number of virtual coils retaining at least `fraction` of the data energy.
Index coils_for_energy(const KSpaceData& data, double fraction);

}  // namespace coilsketch
