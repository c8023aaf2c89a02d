#pragma once

#include <cstdint>
#include <string>

#include "coilsketch/core/types.hpp"
#include "coilsketch/model/sense.hpp"

namespace coilsketch {

enum class SketchDistribution { gaussian, rademacher };

std::string to_string(SketchDistribution d);
SketchDistribution parse_distribution(const std::string& s);

/// Ĉ = V + S output coils: V high-energy virtual coils kept verbatim and S
/// random combinations of the remaining low-energy coils.
struct SketchConfig {
    Index c_hat = 4;
    Index v = 3;
    Index s = 1;
    SketchDistribution distribution = SketchDistribution::rademacher;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Ĉ x C real matrix
///   [ I_V  0   ]
///   [ 0    S_S ]
/// with S_S i.i.d. Gaussian (std 1/S) or Rademacher (±1).
struct SketchMatrix {
    RMat mat;
    SketchConfig config;

    [[nodiscard]] Index rows() const noexcept { return mat.rows(); }
    [[nodiscard]] Index cols() const noexcept { return mat.cols(); }
};

/// Draws a sketch for `coils` input coils from cfg.seed. Deterministic.
SketchMatrix gen_sketch_matrix(const SketchConfig& cfg, Index coils);

/// Per voxel: ĉ[·][d] = S̃ c[·][d].
SensitivityMaps sketch_maps(const SensitivityMaps& maps, const SketchMatrix& sk);

/// (S̃ ⊗ I_N) applied to coil-stacked data.
Vec sketch_data(const Vec& y, const SketchMatrix& sk, Index samples);

/// A_S = W^{1/2} F C_S: the original operator with sketched maps. Shares the
/// sampler and the ledger, so each application costs Ĉ coil transforms.
SenseOperator build_sketched_operator(const SenseOperator& op, const SketchMatrix& sk);

}  // namespace coilsketch
