#include <doctest.h>

#include "coilsketch/recon/methods.hpp"
#include "coilsketch/sim/simulate.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;
using testutil::rel_err;

namespace {

struct Problem {
    GridShape shape;
    Image phantom;
    SenseOperator op;
    KSpaceData data;
};

Problem radial_problem(Index n, Index coils, Index spokes, std::uint64_t seed)
{
    const GridShape s({n, n});
    Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Trajectory t = radial_traj(s, spokes, 2 * n, true);
    SenseOperator op = build_sense(make_coil_maps(coils, s, seed), t, radial_density_weights(t));
    KSpaceData data = acquire(ph, op, {t, noise_for_snr(ph, support_mask(ph), 30.0), seed, 1.0});
    return {s, std::move(ph), std::move(op), std::move(data)};
}

CMat dense_matrix(const SenseOperator& a)
{
    CMat m(a.out_dim(), a.in_dim());
    for (Index i = 0; i < a.in_dim(); ++i) {
        Vec e = Vec::Zero(a.in_dim());
        e[i] = 1.0;
        m.col(i) = a.forward(e);
    }
    return m;
}

}  // namespace

TEST_CASE("identity sketch reproduces the baseline fista iterates")
{
    const Problem p = radial_problem(24, 4, 16, 1);
    MethodSettings ms;
    ms.lambda = 0.01;
    ms.solver_cfg.max_iters = 25;
    ms.solver_cfg.tol = 0.0;
    for (int k = 1; k <= 25; ++k) {
        ms.snapshot_at.push_back(k);
    }
    const MethodResult base = run_method(Method::baseline, p.op, p.data, ms);
    REQUIRE(base.snapshots.size() == 25);

    MethodSettings sk = ms;
    sk.snapshot_at.clear();
    sk.sketch.sketch = {4, 4, 0, SketchDistribution::rademacher, 3};
    sk.sketch.outer_iters = 1;
    sk.sketch.inner_iters = 25;
    std::vector<Vec> inner;
    sk.solver_cfg.on_iterate = [&](int, const Vec& x) { inner.push_back(x); };
    const MethodResult r = run_method(Method::coil_sketching, p.op, p.data, sk);
    REQUIRE(inner.size() == 25);
    double worst = 0.0;
    for (std::size_t k = 0; k < 25; ++k) {
        worst = std::max(worst, rel_err(inner[k], base.snapshots[k].x));
    }
    CHECK(worst < 1e-6);
    CHECK(rel_err(r.x, base.x) < 1e-6);
}

TEST_CASE("one exact outer step solves unregularized least squares")
{
    const GridShape s({8, 8});
    const Vec mv = random_vec(64 * 4, 5);
    const SensitivityMaps maps{s, Eigen::Map<const CMat>(mv.data(), 64, 4)};
    const Trajectory mask = cartesian_mask(s, 2.0, MaskKind::regular, 0, 0);
    const SenseOperator op = build_sense(maps, mask);
    const KSpaceData data{mask, Eigen::Map<const CMat>(random_vec(op.out_dim(), 6).data(),
                                                       mask.samples(), 4),
                          false};

    CoilSketchConfig cfg;
    cfg.sketch = {4, 4, 0, SketchDistribution::rademacher, 1};
    cfg.outer_iters = 1;
    cfg.inner_iters = 300;
    cfg.solver = SolverKind::cg;
    cfg.reg = Regularizer::l2(0.0, 64);
    cfg.solver_cfg.tol = 1e-15;
    const ReconReport rep = coil_sketching_recon(op, data, cfg);

    const CMat a = dense_matrix(op);
    const Vec exact = a.colPivHouseholderQr().solve(op.weight_data(data));
    CHECK(rel_err(rep.x_final, exact) < 1e-8);
}

TEST_CASE("sketched sub-problem gradient at the anchor is the true gradient")
{
    const Problem p = radial_problem(16, 6, 12, 7);
    const Vec y = p.op.weight_data(p.data);
    const Regularizer reg = Regularizer::wavelet(0.01, p.shape);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        const Vec x = random_vec(p.shape.size(), 100 + static_cast<std::uint64_t>(draw));
        const Index v = draw % 4;
        const SketchMatrix sk = gen_sketch_matrix(
            {4, v, 4 - v,
             draw % 2 ? SketchDistribution::gaussian : SketchDistribution::rademacher,
             static_cast<std::uint64_t>(draw)},
            6);
        const Vec d = true_gradient(p.op, x, y);
        const SketchSubproblem sub{x, d, build_sketched_operator(p.op, sk), reg};
        worst = std::max(worst, rel_err(sketched_objective_grad(sub, x), d));
        CHECK(rel_err(sub.model().gradient(x), d) <= 1e-12);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("coil-transform counters follow the closed form")
{
    const Problem p = radial_problem(16, 6, 12, 9);
    struct Case {
        SolverKind solver;
        RegKind reg;
        bool init;
        Index c_hat0;
    };
    for (const Case& c : {Case{SolverKind::fista, RegKind::l1_wavelet, false, 0},
                          Case{SolverKind::fista, RegKind::l1_wavelet, true, 5},
                          Case{SolverKind::cg, RegKind::l2, true, 6},
                          Case{SolverKind::pdhg, RegKind::l1_tv, false, 4}}) {
        auto ledger = std::make_shared<CostLedger>();
        CoilSketchConfig cfg;
        cfg.c_hat0 = c.c_hat0;
        cfg.sketch = {3, 2, 1, SketchDistribution::rademacher, 4};
        cfg.outer_iters = 3;
        cfg.inner_iters = 4;
        cfg.use_init = c.init;
        cfg.init_iters = 5;
        cfg.solver = c.solver;
        cfg.reg = make_regularizer(c.reg, 0.01, p.shape, ledger);
        cfg.solver_cfg.tol = 0.0;
        cfg.solver_cfg.inner_cg_iters = 3;
        const ReconReport rep = coil_sketching_recon(p.op.with_ledger(ledger), p.data, cfg);
        CHECK(rep.total.coil_transforms == coil_sketch_cost(cfg, rep.c_hat0, 6));
        CHECK(rep.total == ledger->snapshot());
    }
}

TEST_CASE("initial compression size: explicit or by energy")
{
    const Problem p = radial_problem(16, 6, 12, 11);
    CoilSketchConfig cfg;
    CHECK(resolve_c_hat0(cfg, p.data) == 6);
    cfg.c_hat0 = 5;
    CHECK(resolve_c_hat0(cfg, p.data) == 5);
    cfg.c_hat0 = 0;
    cfg.c_hat0_energy = 0.9;
    CHECK(resolve_c_hat0(cfg, p.data) == coils_for_energy(p.data, 0.9));
    cfg.c_hat0_energy = 0.0;
    CHECK_THROWS_AS(cfg.validate(6), ParameterError);
    cfg.c_hat0_energy = 1.0;
    cfg.c_hat0 = 7;
    CHECK_THROWS_AS(cfg.validate(6), ParameterError);
    cfg.c_hat0 = 3;
    CHECK_THROWS_AS(cfg.validate(6), ParameterError);  // sketch C_hat 4 > 3
}

TEST_CASE("coil sketching approaches the baseline solution")
{
    const Problem p = radial_problem(32, 8, 24, 13);
    MethodSettings ms;
    ms.lambda = 0.02;
    ms.solver_cfg.tol = 0.0;
    ms.reference = reference_solution(p.op, p.data, ms, 600);
    ms.sketch.sketch = {4, 3, 1, SketchDistribution::rademacher, 21};
    ms.sketch.outer_iters = 8;
    ms.sketch.inner_iters = 15;
    const MethodResult r = run_method(Method::coil_sketching, p.op, p.data, ms);
    CHECK_FALSE(r.diverged);
    CHECK(r.trace.back().distance < 0.05);
    CHECK(r.trace.back().distance < r.trace.front().distance);
}

TEST_CASE("classical sketch with the identity equals the full solve")
{
    const Problem p = radial_problem(16, 4, 12, 15);
    const Vec y = p.op.weight_data(p.data);
    const Regularizer reg = Regularizer::l2(0.05, p.shape.size());
    SolverConfig cfg;
    cfg.max_iters = 40;
    cfg.tol = 0.0;
    const SketchMatrix eye{RMat::Identity(4, 4), {4, 4, 0, SketchDistribution::rademacher, 0}};
    const Vec xs = classical_sketch_solve(p.op, y, eye, reg, SolverKind::cg, cfg).x;
    const SolveResult full = cg_normal(p.op.as_linop(), y, 0.05, Vec::Zero(p.shape.size()), cfg);
    CHECK(rel_err(xs, full.x) < 1e-10);
}
