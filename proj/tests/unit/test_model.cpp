#include <doctest.h>

#include <array>
#include <cmath>

#include "coilsketch/core/fft.hpp"
#include "coilsketch/model/sense.hpp"
#include "coilsketch/sim/simulate.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;
using testutil::rel_err;

namespace {

SensitivityMaps random_maps(const GridShape& s, Index coils, std::uint64_t seed)
{
    const Vec v = random_vec(s.size() * coils, seed);
    return {s, Eigen::Map<const CMat>(v.data(), s.size(), coils)};
}

}  // namespace

TEST_CASE("sense operator is adjoint on exact and gridded paths")
{
    const GridShape s({16, 16});
    const SensitivityMaps maps = random_maps(s, 3, 1);
    const Trajectory radial = radial_traj(s, 12, 32, true);
    const Trajectory mask = cartesian_mask(s, 2.0, MaskKind::regular, 2, 0);

    CHECK(adjointness_error(build_sense(maps, mask).as_linop(), 10, 2) < 1e-10);
    CHECK(adjointness_error(build_sense(maps, radial, radial_density_weights(radial),
                                        NufftBackend::direct).as_linop(),
                            10, 3) < 1e-10);
    CHECK(adjointness_error(build_sense(maps, radial, radial_density_weights(radial)).as_linop(),
                            10, 4) < 1e-10);
}

TEST_CASE("sense forward equals per-coil map, transform and weight")
{
    const GridShape s({12, 12});
    const SensitivityMaps maps = random_maps(s, 2, 5);
    const Trajectory t = radial_traj(s, 8, 24, false);
    const DensityWeights w = radial_density_weights(t);
    const SenseOperator a = build_sense(maps, t, w, NufftBackend::direct);
    const Vec x = random_vec(s.size(), 6);
    const Vec y = a.forward(x);
    for (Index c = 0; c < 2; ++c) {
        const Vec cx = maps.coils.col(c).cwiseProduct(x);
        const Vec expect = dft_nonuniform(Image(s, cx), t).cwiseProduct(
            w.w.col(0).cwiseSqrt().cast<cplx>());
        CHECK(rel_err(y.segment(c * t.samples(), t.samples()), expect) < 1e-12);
        CHECK(rel_err(a.forward_coil(c, x), expect) < 1e-12);
    }
}

TEST_CASE("gridded sense agrees with the direct oracle")
{
    const GridShape s({32, 32});
    const SensitivityMaps maps = random_maps(s, 2, 7);
    const Trajectory t = radial_traj(s, 20, 64, true);
    const SenseOperator direct = build_sense(maps, t, std::nullopt, NufftBackend::direct);
    const SenseOperator grid = build_sense(maps, t);
    const Vec x = random_vec(s.size(), 8);
    const Vec y = random_vec(direct.out_dim(), 9);
    CHECK(rel_err(grid.forward(x), direct.forward(x)) < 1e-3);
    CHECK(rel_err(grid.adjoint(y), direct.adjoint(y)) < 1e-3);
}

TEST_CASE("sense costs C coil transforms per application")
{
    const GridShape s({8, 8});
    auto ledger = std::make_shared<CostLedger>();
    const SenseOperator a =
        build_sense(random_maps(s, 5, 10), cartesian_mask(s, 1.0, MaskKind::regular, 0, 0),
                    std::nullopt, NufftBackend::gridding, ledger);
    const Vec x = random_vec(64, 11);
    (void)a.adjoint(a.forward(x));
    CHECK(ledger->snapshot().coil_transforms == 10);
    const std::array<Index, 2> ids{1, 3};
    (void)a.subset(ids).forward(x);
    CHECK(ledger->snapshot().coil_transforms == 12);
}

TEST_CASE("weights are applied as square roots and validated")
{
    CHECK_THROWS_AS(DensityWeights(RVec(RVec::Constant(4, -1.0))).validate(), ParameterError);
    const GridShape s({8, 8});
    const Trajectory mask = cartesian_mask(s, 1.0, MaskKind::regular, 0, 0);
    const SensitivityMaps maps = random_maps(s, 1, 12);
    const SenseOperator plain = build_sense(maps, mask);
    const SenseOperator weighted = build_sense(maps, mask, DensityWeights(RVec(RVec::Constant(64, 4.0))));
    const Vec x = random_vec(64, 13);
    CHECK(rel_err(weighted.forward(x), Vec(2.0 * plain.forward(x))) < 1e-14);
}

TEST_CASE("full cartesian sampling with unit sum-of-squares maps is an isometry")
{
    const GridShape s({16, 16});
    const SensitivityMaps maps = make_coil_maps(4, s, 1);
    const SenseOperator a = build_sense(maps, cartesian_mask(s, 1.0, MaskKind::regular, 0, 0));
    const Vec x = random_vec(s.size(), 14);
    CHECK(rel_err(a.adjoint(a.forward(x)), x) < 1e-10);
}

TEST_CASE("radial density weights ramp with radius")
{
    const GridShape s({16, 16});
    const Trajectory t = radial_traj(s, 4, 16, false);
    const DensityWeights w = radial_density_weights(t);
    CHECK(w.w.maxCoeff() == doctest::Approx(1.0));
    CHECK(w.w.minCoeff() > 0.0);
    for (Index i = 0; i < t.samples(); ++i) {
        const double r = t.points.row(i).norm();
        if (r > 1e-9) {
            CHECK(w.w(i, 0) == doctest::Approx(r / t.points.rowwise().norm().maxCoeff()));
        }
    }
}

TEST_CASE("svd coil compression keeps energy in order and is orthonormal")
{
    const GridShape s({16, 16});
    const SensitivityMaps maps = make_coil_maps(6, s, 3);
    const Trajectory t = radial_traj(s, 16, 32, true);
    const SenseOperator a = build_sense(maps, t);
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const KSpaceData data = acquire(ph, a, {t, 0.0, 0, 1.0});

    const CompressionResult all = coil_compress_svd(data, maps, 6);
    CHECK(all.energy_fraction == doctest::Approx(1.0));
    CHECK((all.matrix * all.matrix.adjoint() - CMat::Identity(6, 6)).norm() < 1e-10);
    // A rotation of all coils preserves the data and the normal operator.
    CHECK(std::abs(all.data.coils.norm() - data.coils.norm()) < 1e-10 * data.coils.norm());

    const CompressionResult two = coil_compress_svd(data, maps, 2);
    CHECK(two.data.count() == 2);
    CHECK(two.energy_fraction < 1.0);
    for (Index c = 1; c < 2; ++c) {
        CHECK(two.data.coils.col(c).norm() <= two.data.coils.col(c - 1).norm() + 1e-12);
    }
    // Compressed data equals the compressed operator applied to the image.
    const SenseOperator a2 = a.with_maps(two.maps);
    CHECK(rel_err(a2.weight_data(two.data), a2.forward(ph.values)) < 1e-9);

    CHECK(coils_for_energy(data, 1.0) == 6);
    CHECK(coils_for_energy(data, two.energy_fraction) <= 2);
    CHECK_THROWS_AS(coil_compress_svd(data, maps, 7), ParameterError);
}
