#include <doctest.h>

#include <cmath>

#include "coilsketch/core/transforms.hpp"
#include "coilsketch/recon/coil_sketch.hpp"
#include "coilsketch/sim/simulate.hpp"
#include "coilsketch/solvers/solvers.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;
using testutil::rel_err;

namespace {

CMat random_matrix(Index rows, Index cols, std::uint64_t seed)
{
    const Vec v = random_vec(rows * cols, seed);
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

// Largest violation of the ℓ1 optimality conditions of ½‖Ax − y‖² + λ‖x‖₁.
double l1_kkt_violation(const CMat& a, const Vec& y, double lambda, const Vec& x)
{
    const Vec g = a.adjoint() * (a * x - y);
    double worst = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > 1e-9) {
            worst = std::max(worst, std::abs(g[i] + lambda * x[i] / std::abs(x[i])));
        } else {
            worst = std::max(worst, std::abs(g[i]) - lambda);
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("soft thresholding and dual projection")
{
    Vec v(3);
    v << cplx(3, 4), cplx(0.1, 0), cplx(0, -2);
    const Vec p = prox_l1(v, 1.0);
    CHECK(std::abs(p[0] - cplx(2.4, 3.2)) < 1e-15);
    CHECK(p[1] == cplx(0.0));
    CHECK(std::abs(p[2] - cplx(0, -1)) < 1e-15);
    CHECK_THROWS_AS(prox_l1(v, -1.0), ParameterError);

    const Vec d = l1_dual_prox(1.0)(v, 0.5);
    CHECK(std::abs(std::abs(d[0]) - 1.0) < 1e-15);
    CHECK(d[1] == v[1]);
    // Moreau: prox_l1(v) + proj(v) = v.
    CHECK((p + d - v).norm() < 1e-14);
}

TEST_CASE("cg on the normal equations matches a dense solve")
{
    const CMat a = random_matrix(30, 12, 1);
    const Vec y = random_vec(30, 2);
    const double lambda = 0.3;
    SolverConfig cfg;
    cfg.max_iters = 100;
    cfg.tol = 1e-14;
    const SolveResult r = cg_normal(dense_op(a), y, lambda, Vec::Zero(12), cfg);
    const CMat m = a.adjoint() * a + lambda * CMat::Identity(12, 12);
    const Vec exact = m.ldlt().solve(a.adjoint() * y);
    CHECK(rel_err(r.x, exact) < 1e-10);
    CHECK(r.converged);
}

TEST_CASE("fista reaches the l1 optimality conditions")
{
    const CMat a = random_matrix(40, 20, 3);
    const Vec y = random_vec(40, 4);
    const double lambda = 6.0;
    const double lip = (a.adjoint() * a).eval().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    SolverConfig cfg;
    cfg.max_iters = 3000;
    cfg.tol = 0.0;
    const SolveResult r = fista([&](const Vec& x) { return Vec(a.adjoint() * (a * x - y)); },
                                [](const Vec& v, double t) { return prox_l1(v, 6.0 * t); }, lip,
                                Vec::Zero(20), cfg);
    CHECK(l1_kkt_violation(a, y, lambda, r.x) < 1e-8);
    Index zeros = 0;
    for (Index i = 0; i < 20; ++i) {
        zeros += std::abs(r.x[i]) < 1e-9 ? 1 : 0;
    }
    CHECK(zeros > 0);
}

TEST_CASE("pdhg solves l1 denoising to the soft threshold")
{
    const Vec y = random_vec(50, 5);
    const double lambda = 0.8;
    SolverConfig cfg;
    cfg.max_iters = 2000;
    cfg.tol = 0.0;
    cfg.pdhg_tau = 0.5;
    cfg.pdhg_sigma = 1.0;
    const ProxFn prox_g = [&](const Vec& v, double t) { return Vec((v + t * y) / (1.0 + t)); };
    const SolveResult r = pdhg(identity_op(50), l1_dual_prox(lambda), prox_g, Vec::Zero(50), cfg);
    CHECK(rel_err(r.x, prox_l1(y, lambda)) < 1e-8);
}

TEST_CASE("regularizer proxes")
{
    const GridShape s({16, 16});
    const Vec v = random_vec(s.size(), 6);
    SolverConfig cfg;

    const Regularizer l2 = Regularizer::l2(0.5, s.size());
    CHECK(rel_err(prox_regularizer(l2, v, 2.0, cfg), Vec(v / 2.0)) < 1e-15);

    // Wavelet prox is the soft threshold in the unitary wavelet domain.
    const Regularizer wav = Regularizer::wavelet(0.3, s);
    const LinOp psi = wavelet_op(s);
    CHECK(rel_err(prox_regularizer(wav, v, 2.0, cfg), psi.adjoint(prox_l1(psi.forward(v), 0.6))) <
          1e-12);

    // TV prox leaves constants alone and lowers TV + data.
    const Regularizer tv = Regularizer::tv(0.2, s);
    const Vec c = Vec::Constant(s.size(), cplx(1.5, -0.5));
    CHECK(rel_err(prox_regularizer(tv, c, 1.0, cfg), c) < 1e-12);
    cfg.prox_iters = 200;
    const Vec p = prox_regularizer(tv, v, 1.0, cfg);
    auto obj = [&](const Vec& x) { return tv.value(x) + 0.5 * (x - v).squaredNorm(); };
    CHECK(obj(p) < obj(v));
    CHECK(tv.value(p) < tv.value(v));
}

TEST_CASE("full-batch stochastic gradient equals the true gradient")
{
    const GridShape s({12, 12});
    const SenseOperator a = build_sense(make_coil_maps(4, s, 2), radial_traj(s, 8, 24, true));
    const Vec x = random_vec(s.size(), 7);
    const Vec y = random_vec(a.out_dim(), 8);
    Rng rng = make_rng(1, 0);
    CHECK(rel_err(stochastic_gradient(a, y, x, 4, rng), true_gradient(a, x, y)) < 1e-12);
    CHECK_THROWS_AS(stochastic_gradient(a, y, x, 5, rng), ParameterError);
}

TEST_CASE("stochastic gradient is unbiased over batches")
{
    const GridShape s({8, 8});
    const SenseOperator a = build_sense(make_coil_maps(4, s, 3),
                                        cartesian_mask(s, 2.0, MaskKind::regular, 0, 0));
    const Vec x = random_vec(64, 9);
    const Vec y = random_vec(a.out_dim(), 10);
    Rng rng = make_rng(2, 0);
    Vec mean = Vec::Zero(64);
    const int draws = 4000;
    for (int k = 0; k < draws; ++k) {
        mean += stochastic_gradient(a, y, x, 2, rng);
    }
    mean /= draws;
    CHECK(rel_err(mean, true_gradient(a, x, y)) < 0.03);
}

TEST_CASE("accproxsgd decreases the objective")
{
    const GridShape s({16, 16});
    const SenseOperator a = build_sense(make_coil_maps(4, s, 4), radial_traj(s, 16, 32, true));
    const Image ph = make_phantom({PhantomKind::shepp_logan_2d, s, 1.0});
    const Vec y = a.forward(ph.values);
    const Regularizer reg = Regularizer::wavelet(0.01, s);
    SolverConfig cfg;
    cfg.max_iters = 60;
    cfg.tol = 0.0;
    cfg.seed = 5;
    const SolveResult r = accproxsgd(a, y, reg, 2, {}, Vec::Zero(s.size()), cfg);
    CHECK(full_objective(a, y, reg, r.x) < 0.1 * full_objective(a, y, reg, Vec::Zero(s.size())));
    const SolveResult again = accproxsgd(a, y, reg, 2, {}, Vec::Zero(s.size()), cfg);
    CHECK((r.x - again.x).norm() == 0.0);
}

TEST_CASE("solver configuration is validated")
{
    SolverConfig cfg;
    cfg.max_iters = -1;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = SolverConfig{};
    cfg.step_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
