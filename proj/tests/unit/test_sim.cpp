#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "coilsketch/sim/simulate.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::rel_err;

TEST_CASE("shepp-logan phantom range and symmetry")
{
    const GridShape s({64, 64});
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const RVec mag = ph.values.cwiseAbs();
    CHECK(mag.maxCoeff() == doctest::Approx(1.0));
    CHECK(mag.minCoeff() >= 0.0);
    CHECK(ph.values.imag().cwiseAbs().maxCoeff() == 0.0);
    // Corners lie outside the head.
    CHECK(mag[0] == 0.0);
    const Image twice = make_phantom({PhantomKind::shepp_logan_2d, s, 2.0});
    CHECK(rel_err(twice.values, Vec(2.0 * ph.values)) < 1e-15);

    const Mask sup = support_mask(ph);
    CHECK(sup.count() > 1000);
    CHECK(sup.count() < 64 * 64);

    const Image vol = make_phantom({PhantomKind::ellipsoids_3d, GridShape({16, 16, 8}), 1.0});
    CHECK(vol.values.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK_THROWS(parse_phantom_kind("cube"));
}

TEST_CASE("coil maps have unit sum of squares on the support")
{
    const GridShape s({32, 32});
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Mask sup = support_mask(ph);
    const SensitivityMaps whole = make_coil_maps(8, s, 3);
    const SensitivityMaps object = make_coil_maps(8, s, 3, sup);
    for (Index d = 0; d < s.size(); ++d) {
        CHECK(whole.coils.row(d).squaredNorm() == doctest::Approx(1.0));
        if (sup[d]) {
            CHECK(object.coils.row(d).squaredNorm() == doctest::Approx(1.0));
        } else {
            CHECK(object.coils.row(d).squaredNorm() == 0.0);
        }
    }
    CHECK(make_coil_maps(8, s, 3).coils == whole.coils);
    CHECK_THROWS_AS(make_coil_maps(0, s, 3), ParameterError);
    CHECK_THROWS_AS(make_coil_maps(4, s, 3, Mask(), {1.2, 0.0}), ParameterError);
}

TEST_CASE("narrower lobes make coils more distinct")
{
    const GridShape s({32, 32});
    auto coherence = [&](double width) {
        const SensitivityMaps m = make_coil_maps(8, s, 1, Mask(), {1.2, width});
        const CMat g = m.coils.adjoint() * m.coils;
        double off = 0.0;
        for (Index i = 0; i < 8; ++i) {
            for (Index j = 0; j < 8; ++j) {
                if (i != j) {
                    off += std::abs(g(i, j)) / std::sqrt(std::abs(g(i, i) * g(j, j)));
                }
            }
        }
        return off;
    };
    CHECK(coherence(0.4) < coherence(1.0));
}

TEST_CASE("regular cartesian mask keeps floor(kR) lines plus the center")
{
    const GridShape s({12, 8});
    const Trajectory m = cartesian_mask(s, 3.0, MaskKind::regular, 2, 0);
    CHECK(m.kind == TrajectoryKind::cartesian_mask);
    std::set<Index> expect{0, 3, 6, 9, 5, 6};
    const std::vector<Index> lines = mask_lines(s, m);
    CHECK(std::set<Index>(lines.begin(), lines.end()) == expect);
    CHECK(m.samples() == static_cast<Index>(expect.size()) * 8);
    CHECK(realized_acceleration(s, m) == doctest::Approx(12.0 / 5.0));
    CHECK(realized_acceleration(s, cartesian_mask(s, 1.0, MaskKind::regular, 0, 0)) == 1.0);
}

TEST_CASE("random mask reaches its acceleration and is seeded")
{
    const GridShape s({64, 64});
    const Trajectory m = cartesian_mask(s, 2.0, MaskKind::random, 8, 4);
    const double r = realized_acceleration(s, m);
    CHECK(r >= 1.8);
    CHECK(r <= 2.2);
    CHECK(cartesian_mask(s, 2.0, MaskKind::random, 8, 4).points ==
          m.points);
    CHECK(cartesian_mask(s, 2.0, MaskKind::random, 8, 5).points != m.points);
    CHECK_THROWS_AS(cartesian_mask(s, 0.5, MaskKind::random, 8, 4), ParameterError);
}

TEST_CASE("radial trajectory geometry")
{
    const GridShape s({32, 32});
    const Trajectory t = radial_traj(s, 5, 64, false);
    CHECK(t.samples() == 5 * 64);
    CHECK(t.points.cwiseAbs().maxCoeff() <= 16.0);
    const RVec a = spoke_angles(5, false);
    CHECK(a[1] - a[0] == doctest::Approx(std::numbers::pi / 5));
    const RVec g = spoke_angles(3, true);
    CHECK(std::fmod(g[1] - g[0] + std::numbers::pi, std::numbers::pi) ==
          doctest::Approx(std::fmod(std::numbers::pi * 0.6180339887498949, std::numbers::pi)));
    // Each spoke passes through the center.
    CHECK(t.points.row(32).norm() < 1e-12);

    const Trajectory st = radial_stack_traj(GridShape({16, 16, 4}), 3, 32, true);
    CHECK(st.samples() == 3 * 32 * 4);
    CHECK(st.ndim() == 3);
}

TEST_CASE("acquisition is the operator plus seeded noise")
{
    const GridShape s({16, 16});
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Trajectory t = radial_traj(s, 8, 32, true);
    const SenseOperator a = build_sense(make_coil_maps(3, s, 1), t, radial_density_weights(t));
    const KSpaceData clean = acquire(ph, a, {t, 0.0, 1, 1.0});
    CHECK_FALSE(clean.weights_applied);
    CHECK(rel_err(clean.stacked(), a.without_weights().forward(ph.values)) < 1e-14);

    const KSpaceData noisy = acquire(ph, a, {t, 0.1, 7, 1.0});
    const Vec n = noisy.stacked() - clean.stacked();
    const double per_sample = n.squaredNorm() / static_cast<double>(n.size());
    CHECK(per_sample == doctest::Approx(0.01).epsilon(0.1));
    CHECK(acquire(ph, a, {t, 0.1, 7, 1.0}).coils == noisy.coils);

    const double sigma = noise_for_snr(ph, support_mask(ph), 20.0);
    CHECK(sigma > 0.0);
    CHECK(noise_for_snr(ph, support_mask(ph), 40.0) == doctest::Approx(sigma / 10.0));
}
