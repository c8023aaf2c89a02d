#pragma once

#include <cstdint>
#include <string>

#include "coilsketch/core/types.hpp"
#include "coilsketch/model/sense.hpp"

namespace coilsketch {

enum class PhantomKind { shepp_logan_2d, ellipsoids_3d };

std::string to_string(PhantomKind k);
PhantomKind parse_phantom_kind(const std::string& s);

struct PhantomSpec {
    PhantomKind kind = PhantomKind::shepp_logan_2d;
    GridShape shape{{64, 64}};
    double contrast = 1.0;  ///< values land in [0, contrast]
};

/// Modified Shepp-Logan (10 ellipses) in 2D, or its ellipsoid counterpart in 3D.
/// Voxel centers sit symmetrically in [-1, 1]; axis 0 is y, axis 1 is x, axis 2 is z.
Image make_phantom(const PhantomSpec& spec);

/// Voxels whose magnitude exceeds `rel` times the image maximum.
Mask support_mask(const Image& img, double rel = 1e-3);

struct CoilGeometry {
    double ring = 1.2;   ///< lobe-center radius in units of the half FOV
    double width = 0.65; ///< Gaussian lobe std in the same units
};

/// Smooth complex Gaussian-lobe coil profiles on a ring around the FOV,
/// normalized to unit sum-of-squares on `support` and zero elsewhere.
/// An empty support selects the whole grid.
SensitivityMaps make_coil_maps(Index coils, const GridShape& shape, std::uint64_t seed,
                               const Mask& support = Mask(), CoilGeometry geom = {});

enum class MaskKind { regular, random };

std::string to_string(MaskKind k);
MaskKind parse_mask_kind(const std::string& s);

/// Phase-encode lines along axis 0, every other axis fully sampled.
/// Regular keeps lines floor(k·R); random draws variable-density lines
/// without replacement until round(n/R) lines are kept. The central `acs`
/// lines are always kept.
Trajectory cartesian_mask(const GridShape& shape, double accel, MaskKind kind, Index acs,
                          std::uint64_t seed);

/// Phase-encode lines present in a Cartesian mask, as row indices.
std::vector<Index> mask_lines(const GridShape& shape, const Trajectory& mask);

/// Realized acceleration: Nyquist sample count over acquired count.
double realized_acceleration(const GridShape& shape, const Trajectory& traj);

/// 2D radial spokes through the origin. Golden angles k·π·0.618… mod π, else k·π/spokes.
/// Readout j sits at (j − readout/2)·2/readout of kmax = n/2 on each axis.
Trajectory radial_traj(const GridShape& shape, Index spokes, Index readout, bool golden);

/// Spoke angles used by radial_traj.
RVec spoke_angles(Index spokes, bool golden);

/// Radial spokes in the (y, x) plane repeated at every integer kz partition.
Trajectory radial_stack_traj(const GridShape& shape, Index spokes, Index readout, bool golden);

struct AcquisitionSpec {
    Trajectory traj;
    double noise_sigma = 0.0;  ///< complex std per sample (σ/√2 per component)
    std::uint64_t seed = 0;
    double accel = 1.0;
};

/// k = F C x + n with i.i.d. complex Gaussian n; density weights are not applied.
KSpaceData acquire(const Image& x, const SenseOperator& op, const AcquisitionSpec& spec);

/// Complex noise vector of the given length.
Vec complex_noise(Index n, double sigma, std::uint64_t seed);

/// Noise std giving `snr_db` for the mean support magnitude of a fully sampled image.
double noise_for_snr(const Image& x, const Mask& support, double snr_db);

}  // namespace coilsketch
