#include <doctest.h>

#include "coilsketch/sim/simulate.hpp"
#include "coilsketch/sketch/sketching.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;
using testutil::rel_err;

TEST_CASE("sketch matrix block structure")
{
    const SketchMatrix sk = gen_sketch_matrix({4, 3, 1, SketchDistribution::rademacher, 5}, 8);
    REQUIRE(sk.rows() == 4);
    REQUIRE(sk.cols() == 8);
    CHECK(sk.mat.topLeftCorner(3, 3) == RMat::Identity(3, 3));
    CHECK(sk.mat.topRightCorner(3, 5).isZero());
    CHECK(sk.mat.bottomLeftCorner(1, 3).isZero());
    for (Index c = 3; c < 8; ++c) {
        CHECK(std::abs(sk.mat(3, c)) == 1.0);
    }
}

TEST_CASE("sketch matrix is deterministic in its seed")
{
    const SketchConfig cfg{2, 1, 1, SketchDistribution::gaussian, 42};
    CHECK(gen_sketch_matrix(cfg, 6).mat == gen_sketch_matrix(cfg, 6).mat);
    SketchConfig other = cfg;
    other.seed = 43;
    CHECK(gen_sketch_matrix(cfg, 6).mat != gen_sketch_matrix(other, 6).mat);
}

TEST_CASE("sketch configuration is validated")
{
    CHECK_THROWS_AS(gen_sketch_matrix({4, 3, 2, SketchDistribution::rademacher, 0}, 8),
                    ParameterError);
    CHECK_THROWS_AS(gen_sketch_matrix({9, 8, 1, SketchDistribution::rademacher, 0}, 8),
                    ParameterError);
    CHECK_THROWS_AS(gen_sketch_matrix({4, -1, 5, SketchDistribution::rademacher, 0}, 8),
                    ParameterError);
    CHECK_NOTHROW(gen_sketch_matrix({4, 4, 0, SketchDistribution::rademacher, 0}, 8));
    CHECK_THROWS(parse_distribution("uniform"));
    CHECK(parse_distribution(to_string(SketchDistribution::gaussian)) ==
          SketchDistribution::gaussian);
}

TEST_CASE("sketched entries have unit second moment for one sketched coil")
{
    for (SketchDistribution d : {SketchDistribution::rademacher, SketchDistribution::gaussian}) {
        RMat acc = RMat::Zero(5, 5);
        const int draws = 10000;
        for (int k = 0; k < draws; ++k) {
            const SketchMatrix sk = gen_sketch_matrix({4, 3, 1, d, static_cast<std::uint64_t>(k)}, 8);
            const RMat block = sk.mat.bottomRightCorner(1, 5);
            acc += block.transpose() * block;
        }
        acc /= draws;
        CHECK((acc - RMat::Identity(5, 5)).cwiseAbs().maxCoeff() < 0.05);
    }
}

TEST_CASE("gaussian entries use standard deviation 1/S")
{
    double ss = 0.0;
    Index n = 0;
    for (int k = 0; k < 2000; ++k) {
        const SketchMatrix sk =
            gen_sketch_matrix({4, 0, 4, SketchDistribution::gaussian, static_cast<std::uint64_t>(k)}, 8);
        ss += sk.mat.squaredNorm();
        n += sk.mat.size();
    }
    CHECK(ss / static_cast<double>(n) == doctest::Approx(1.0 / 16.0).epsilon(0.03));
}

TEST_CASE("sketched operator commutes with the explicit kronecker oracle")
{
    const GridShape s({16, 16});
    const Trajectory t = radial_traj(s, 10, 32, true);
    for (int draw = 0; draw < 20; ++draw) {
        const std::uint64_t seed = 100 + static_cast<std::uint64_t>(draw);
        const SensitivityMaps maps{s, [&] {
                                       const Vec v = random_vec(s.size() * 4, seed);
                                       return CMat(Eigen::Map<const CMat>(v.data(), s.size(), 4));
                                   }()};
        const SenseOperator a = build_sense(maps, t, radial_density_weights(t));
        const SketchDistribution dist =
            draw % 2 == 0 ? SketchDistribution::rademacher : SketchDistribution::gaussian;
        const Index v = draw % 3;
        const SketchMatrix sk = gen_sketch_matrix({3, v, 3 - v, dist, seed}, 4);
        const Vec x = random_vec(s.size(), seed + 1);
        const Vec oracle = sketch_data(a.forward(x), sk, a.samples());
        CHECK(rel_err(build_sketched_operator(a, sk).forward(x), oracle) < 1e-10);
    }
}

TEST_CASE("sketch_data applies the coil mixing per sample")
{
    RMat m(2, 3);
    m << 1, 0, 0, 0, 1, -1;
    const SketchMatrix sk{m, {2, 1, 1, SketchDistribution::rademacher, 0}};
    Vec y(6);
    y << 1, 2, 3, 4, 5, 6;
    Vec expect(4);
    expect << 1, 2, -2, -2;
    CHECK((sketch_data(y, sk, 2) - expect).norm() == 0.0);
}

TEST_CASE("sketched operator costs C_hat transforms and shares the ledger")
{
    const GridShape s({8, 8});
    auto ledger = std::make_shared<CostLedger>();
    const SenseOperator a = build_sense(make_coil_maps(6, s, 1),
                                        cartesian_mask(s, 2.0, MaskKind::regular, 0, 0),
                                        std::nullopt, NufftBackend::gridding, ledger);
    const SketchMatrix sk = gen_sketch_matrix({3, 2, 1, SketchDistribution::rademacher, 1}, 6);
    const SenseOperator as = build_sketched_operator(a, sk);
    (void)as.adjoint(as.forward(random_vec(64, 2)));
    CHECK(ledger->snapshot().coil_transforms == 6);
}
