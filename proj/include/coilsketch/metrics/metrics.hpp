#pragma once

#include <cstdint>
#include <functional>

#include "coilsketch/core/types.hpp"
#include "coilsketch/model/sense.hpp"

namespace coilsketch {

/// ‖|x| − |ref|‖₂ / ‖ref‖₂.
double nrmse(const Vec& x, const Vec& ref);

/// Mean local SSIM of magnitudes with an 11×11 Gaussian window (σ = 1.5),
/// K1 = 0.01, K2 = 0.03 and dynamic range max|ref|, over the valid region.
/// 3D volumes are evaluated per axial slice (fixed last index) and averaged.
double ssim(const Image& x, const Image& ref);

/// ‖LoG(|x|) − LoG(|ref|)‖₂ / ‖LoG(|ref|)‖₂ with a zero-mean 15×15 LoG (σ = 1.5)
/// and symmetric boundary extension. 3D: per slice, averaged.
double hfen(const Image& x, const Image& ref);

/// ‖x − x_inf‖₂ / ‖x_inf‖₂.
double convergence_distance(const Vec& x, const Vec& x_inf);

/// Threshold on convergence_distance at which a run counts as converged.
inline constexpr double kConvergedDistance = 0.05;

struct MetricReport {
    double nrmse = 0.0;
    double ssim = 0.0;
    double hfen = 0.0;
};

MetricReport compare(const Image& x, const Image& ref);

/// Filters every 2D slice of a magnitude image with a square kernel
/// (symmetric boundary extension, same-size output). Exposed for tests.
RVec filter_slices(const GridShape& shape, const RVec& img, const RMat& kernel);
RMat gaussian_kernel(int size, double sigma);
RMat log_kernel(int size, double sigma);

/// Reconstruction from one noisy acquisition.
using ReconFn = std::function<Vec(const KSpaceData&)>;

struct GFactorMap {
    RVec inverse_g;  ///< zero where masked out
    Mask valid;      ///< support minus degenerate pixels
    int trials = 0;
    double accel = 1.0;

    [[nodiscard]] double mean() const;
};

/// Per-pixel standard deviation of recon(acquire(x) with fresh noise) over
/// `trials` noise draws. Trial t uses noise seed seed_stream(seed, t); trials
/// run in parallel with identical results for any thread count.
RVec montecarlo_std(const ReconFn& recon, const SenseOperator& acq, const Trajectory& traj,
                    const Image& x, double noise_sigma, int trials, std::uint64_t seed);

/// inverse_g = σ_full·√R / σ_under on the support; zero-variance pixels are masked out.
GFactorMap inverse_gfactor(const RVec& std_full, const RVec& std_under, double accel,
                           const Mask& support, int trials);

/// Pseudo-replica inverse g-factor. `recon_full` reconstructs the fully sampled
/// reference acquisition through `a_full`; `recon_under` the accelerated one
/// through `a_under`.
GFactorMap gfactor_montecarlo(const ReconFn& recon_under, const ReconFn& recon_full,
                              const SenseOperator& a_full, const Trajectory& traj_full,
                              const SenseOperator& a_under, const Trajectory& traj_under,
                              const Image& x, double noise_sigma, int trials, double accel,
                              std::uint64_t seed, const Mask& support);

}  // namespace coilsketch
