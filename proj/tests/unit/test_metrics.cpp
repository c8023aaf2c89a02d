#include <doctest.h>

#include "coilsketch/metrics/metrics.hpp"
#include "coilsketch/recon/methods.hpp"
#include "coilsketch/sim/simulate.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;

namespace {

Image smooth(const Image& img, double sigma)
{
    const RVec mag = img.values.cwiseAbs();
    return {img.shape, filter_slices(img.shape, mag, gaussian_kernel(15, sigma)).cast<cplx>()};
}

}  // namespace

TEST_CASE("metrics of identical images")
{
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, GridShape({48, 48}), 1.0});
    CHECK(nrmse(ph.values, ph.values) == 0.0);
    CHECK(ssim(ph, ph) == doctest::Approx(1.0));
    CHECK(hfen(ph, ph) == 0.0);
    CHECK(convergence_distance(ph.values, ph.values) == 0.0);
    // Magnitude metrics ignore a global phase.
    const Image rotated(ph.shape, ph.values * std::polar(1.0, 0.7));
    CHECK(nrmse(rotated.values, ph.values) < 1e-15);
    CHECK(convergence_distance(rotated.values, ph.values) > 0.5);
}

TEST_CASE("nrmse of a scaled image")
{
    const Vec r = random_vec(100, 1);
    CHECK(nrmse(Vec(1.1 * r), r) == doctest::Approx(0.1));
    CHECK_THROWS_AS(nrmse(r, Vec::Zero(100)), ParameterError);
    CHECK_THROWS_AS(nrmse(r, Vec::Zero(10)), ShapeError);
}

TEST_CASE("hfen is more sensitive to blur than nrmse")
{
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, GridShape({64, 64}), 1.0});
    const Image blurred = smooth(ph, 2.0);
    CHECK(hfen(blurred, ph) > nrmse(blurred.values, ph.values));
    CHECK(ssim(blurred, ph) < 1.0);
    CHECK(ssim(blurred, ph) > 0.0);
}

TEST_CASE("ssim decreases with noise")
{
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, GridShape({64, 64}), 1.0});
    const Image a(ph.shape, ph.values + 0.02 * random_vec(ph.shape.size(), 2));
    const Image b(ph.shape, ph.values + 0.2 * random_vec(ph.shape.size(), 2));
    CHECK(ssim(b, ph) < ssim(a, ph));
    CHECK(ssim(a, ph) < 1.0);
}

TEST_CASE("kernels are normalized")
{
    CHECK(gaussian_kernel(11, 1.5).sum() == doctest::Approx(1.0));
    CHECK(std::abs(log_kernel(15, 1.5).sum()) < 1e-12);
}

TEST_CASE("inverse g-factor of full sampling is near one")
{
    const GridShape s({24, 24});
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Mask sup = support_mask(ph);
    const Trajectory full = cartesian_mask(s, 1.0, MaskKind::regular, 0, 0);
    const SenseOperator a = build_sense(make_coil_maps(4, s, 1), full);
    MethodSettings ms;
    ms.reg_kind = RegKind::l2;
    ms.solver = SolverKind::cg;
    ms.lambda = 1e-3;
    ms.solver_cfg.max_iters = 20;
    ms.solver_cfg.tol = 0.0;
    const ReconFn recon = [&](const KSpaceData& d) {
        return run_method(Method::baseline, a, d, ms).x;
    };
    const double sigma = noise_for_snr(ph, sup, 20.0);
    const GFactorMap g =
        gfactor_montecarlo(recon, recon, a, full, a, full, ph, sigma, 30, 1.0, 3, sup);
    CHECK(g.mean() > 0.85);
    CHECK(g.mean() < 1.15);
    CHECK(g.trials == 30);
}

TEST_CASE("undersampling lowers the inverse g-factor")
{
    const GridShape s({24, 24});
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Mask sup = support_mask(ph);
    const SensitivityMaps maps = make_coil_maps(4, s, 1);
    const Trajectory full = cartesian_mask(s, 1.0, MaskKind::regular, 0, 0);
    const Trajectory under = cartesian_mask(s, 3.0, MaskKind::regular, 0, 0);
    const SenseOperator af = build_sense(maps, full);
    const SenseOperator au = build_sense(maps, under);
    MethodSettings ms;
    ms.reg_kind = RegKind::l2;
    ms.solver = SolverKind::cg;
    ms.lambda = 1e-3;
    ms.solver_cfg.max_iters = 30;
    ms.solver_cfg.tol = 0.0;
    auto recon = [&](const SenseOperator& op) {
        return ReconFn([&ms, op](const KSpaceData& d) {
            return run_method(Method::baseline, op, d, ms).x;
        });
    };
    const double sigma = noise_for_snr(ph, sup, 20.0);
    const double r = realized_acceleration(s, under);
    const GFactorMap g = gfactor_montecarlo(recon(au), recon(af), af, full, au, under, ph, sigma,
                                            30, r, 3, sup);
    CHECK(g.mean() < 0.95);
    CHECK(g.mean() > 0.0);
}
