#include "coilsketch/recon/coil_sketch.hpp"

#include <chrono>
#include <cmath>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/core/transforms.hpp"

namespace coilsketch {

std::string to_string(SolverKind k)
{
    switch (k) {
    case SolverKind::cg: return "cg";
    case SolverKind::fista: return "fista";
    case SolverKind::pdhg: return "pdhg";
    }
    return "?";
}

SolverKind parse_solver_kind(const std::string& s)
{
    if (s == "cg") return SolverKind::cg;
    if (s == "fista") return SolverKind::fista;
    if (s == "pdhg") return SolverKind::pdhg;
    throw ParameterError("unknown solver '" + s + "'");
}

// ---------------------------------------------------------------------------

Vec QuadraticModel::gradient(const Vec& x) const
{
    Vec shifted = anchor.size() != 0 ? Vec(x - anchor) : x;
    Vec r = op.forward(shifted);
    if (offset.size() != 0) {
        r -= offset;
    }
    Vec g = op.adjoint(r);
    if (linear.size() != 0) {
        g += linear;
    }
    return g;
}

double QuadraticModel::value(const Vec& x) const
{
    const SenseOperator silent = op.with_ledger(nullptr);
    Vec r = silent.forward(anchor.size() != 0 ? Vec(x - anchor) : x);
    if (offset.size() != 0) {
        r -= offset;
    }
    double v = 0.5 * r.squaredNorm();
    if (linear.size() != 0) {
        v += x.dot(linear).real();
    }
    return v;
}

bool StepCache::ready(SolverKind k) const
{
    switch (k) {
    case SolverKind::cg: return true;
    case SolverKind::fista: return lambda_max > 0.0;
    case SolverKind::pdhg: return pdhg_tau > 0.0 && pdhg_sigma > 0.0;
    }
    return false;
}

std::int64_t applications_per_iteration(SolverKind kind, const SolverConfig& cfg)
{
    return kind == SolverKind::pdhg ? 2 * static_cast<std::int64_t>(cfg.inner_cg_iters) : 2;
}

namespace {

// Bᴴ·offset − linear, the constant part of the normal-equation right-hand side.
Vec constant_rhs(const QuadraticModel& q)
{
    Vec rhs = q.offset.size() != 0 ? q.op.adjoint(q.offset) : Vec(Vec::Zero(q.op.in_dim()));
    if (q.linear.size() != 0) {
        rhs -= q.linear;
    }
    return rhs;
}

Vec anchor_of(const QuadraticModel& q)
{
    return q.anchor.size() != 0 ? q.anchor : Vec(Vec::Zero(q.op.in_dim()));
}

// G δ = BᴴB δ.
Vec gram(const QuadraticModel& q, const Vec& delta) { return q.op.adjoint(q.op.forward(delta)); }

SolveResult solve_cg(const QuadraticModel& q, const Regularizer& reg, const Vec& x0,
                     const SolverConfig& cfg)
{
    if (reg.kind != RegKind::l2) {
        throw ParameterError("cg needs the l2 regularizer");
    }
    const Vec a = anchor_of(q);
    const double lam = reg.lambda;
    Vec rhs = constant_rhs(q);
    if (lam != 0.0) {
        rhs -= lam * a;
    }
    auto apply_m = [&](const Vec& d) {
        Vec out = gram(q, d);
        if (lam != 0.0) {
            out += lam * d;
        }
        return out;
    };
    SolverConfig inner = cfg;
    ObjectiveFn objective;
    if (cfg.record_history) {
        objective = [&](const Vec& d) {
            const Vec x = a + d;
            return q.value(x) + reg.value(x);
        };
    }
    if (cfg.on_iterate) {
        inner.on_iterate = [&](int k, const Vec& d) { cfg.on_iterate(k, Vec(a + d)); };
    }
    SolveResult r = cg_solve(apply_m, rhs, Vec(x0 - a), inner, objective);
    r.x += a;
    return r;
}

// Data-consistency prox for PDHG:
//   argmin_x q(x) + ‖x − v‖²/(2τ)  ⇔  (G + I/τ) δ = Bᴴoffset − linear + (v − anchor)/τ.
// CG is warm-started at the previous solution whose G δ is carried along, so
// every call costs exactly inner_cg_iters Gram applications.
class DataProx {
public:
    DataProx(const QuadraticModel& q, const Vec& x0, int cg_iters)
        : q_(q), anchor_(anchor_of(q)), base_rhs_(constant_rhs(q)), cg_iters_(cg_iters)
    {
        delta_ = x0 - anchor_;
        gdelta_ = delta_.isZero(0.0) ? Vec(Vec::Zero(delta_.size())) : gram(q_, delta_);
    }

    Vec operator()(const Vec& v, double tau)
    {
        const double inv_tau = 1.0 / tau;
        const Vec rhs = base_rhs_ + inv_tau * (v - anchor_);
        Vec r = rhs - gdelta_ - inv_tau * delta_;
        Vec p = r;
        double rr = r.squaredNorm();
        for (int k = 0; k < cg_iters_ && rr > 0.0; ++k) {
            const Vec gp = gram(q_, p);
            const Vec mp = gp + inv_tau * p;
            const double alpha = rr / p.dot(mp).real();
            delta_ += alpha * p;
            gdelta_ += alpha * gp;
            r -= alpha * mp;
            const double rr_new = r.squaredNorm();
            p = r + (rr_new / rr) * p;
            rr = rr_new;
        }
        return anchor_ + delta_;
    }

private:
    const QuadraticModel& q_;
    Vec anchor_;
    Vec base_rhs_;
    Vec delta_;
    Vec gdelta_;
    int cg_iters_;
};

}  // namespace

SolveResult solve_model(const QuadraticModel& q, const Regularizer& reg, SolverKind kind,
                        const Vec& x0, const SolverConfig& cfg, StepCache& steps, bool reuse,
                        Vec* dual, const LedgerPtr& estimate_ledger)
{
    cfg.validate();
    if (x0.size() != q.op.in_dim()) {
        throw ShapeError("solve: initial image length mismatch");
    }
    // Counters over the whole call, including operator-side work done outside the solver loop.
    const LedgerPtr& ledger = q.op.ledger();
    const CostTags base = ledger ? ledger->snapshot() : CostTags{};
    const auto start = std::chrono::steady_clock::now();

    const bool estimate = !(reuse && steps.ready(kind));
    ObjectiveFn objective;
    if (cfg.record_history) {
        objective = [&](const Vec& x) { return q.value(x) + reg.value(x); };
    }

    SolveResult r;
    switch (kind) {
    case SolverKind::cg:
        r = solve_cg(q, reg, x0, cfg);
        break;
    case SolverKind::fista: {
        if (estimate) {
            const LinOp n = normal_op(q.op.with_ledger(estimate_ledger).as_linop());
            steps.lambda_max = max_eig_power(n, cfg.power_iters, cfg.seed);
            if (!(steps.lambda_max > 0.0)) {
                steps.lambda_max = 1.0;
            }
        }
        const GradFn grad = [&](const Vec& x) { return q.gradient(x); };
        r = fista(grad, make_prox(reg, cfg), steps.lambda_max / cfg.step_scale, x0, cfg,
                  objective);
        break;
    }
    case SolverKind::pdhg: {
        if (reg.kind == RegKind::l2) {
            throw ParameterError("pdhg needs an l1 regularizer");
        }
        SolverConfig pcfg = cfg;
        if (estimate) {
            // Power iteration approaches ‖K‖² from below; pad it so the bound holds.
            const double k2 =
                1.05 * max_eig_power(normal_op(reg.transform.with_ledger(nullptr)),
                                     std::max(cfg.power_iters, 50), cfg.seed);
            const double ratio = cfg.pdhg_sigma_tau_ratio;
            steps.pdhg_tau = k2 > 0.0 ? 1.0 / std::sqrt(k2 * ratio) : 1.0;
            steps.pdhg_sigma = k2 > 0.0 ? ratio * steps.pdhg_tau : 1.0;
        }
        pcfg.pdhg_tau = steps.pdhg_tau;
        pcfg.pdhg_sigma = steps.pdhg_sigma;
        auto prox = std::make_shared<DataProx>(q, x0, cfg.inner_cg_iters);
        const ProxFn prox_g = [prox](const Vec& v, double tau) { return (*prox)(v, tau); };
        const Vec u0 = dual != nullptr ? *dual : Vec();
        r = pdhg(reg.transform, l1_dual_prox(reg.lambda), prox_g, x0, pcfg, objective, u0);
        if (dual != nullptr) {
            *dual = r.dual;
        }
        break;
    }
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ledger) {
        const CostTags d = ledger->snapshot() - base;
        r.coil_transform_count = d.coil_transforms;
        r.sparse_transform_count = d.sparse_transforms;
    }
    return r;
}

// ---------------------------------------------------------------------------

double full_objective(const SenseOperator& a, const Vec& y, const Regularizer& reg, const Vec& x)
{
    const Vec r = a.with_ledger(nullptr).forward(x) - y;
    return 0.5 * r.squaredNorm() + reg.value(x);
}

Vec true_gradient(const SenseOperator& a, const Vec& x, const Vec& y)
{
    if (x.size() != a.in_dim() || y.size() != a.out_dim()) {
        throw ShapeError("true gradient: image or data length mismatch");
    }
    return a.adjoint(Vec(a.forward(x) - y));
}

QuadraticModel SketchSubproblem::model() const
{
    return {sketched_op, anchor, Vec(), true_grad};
}

double SketchSubproblem::value(const Vec& x) const { return model().value(x); }

Vec sketched_objective_grad(const SketchSubproblem& sub, const Vec& x)
{
    return sub.model().gradient(x);
}

SolveResult classical_sketch_solve(const SenseOperator& a, const Vec& y, const SketchMatrix& sk,
                                   const Regularizer& reg, SolverKind kind,
                                   const SolverConfig& cfg)
{
    const QuadraticModel q{build_sketched_operator(a, sk), Vec(), sketch_data(y, sk, a.samples()),
                           Vec()};
    StepCache steps;
    return solve_model(q, reg, kind, Vec::Zero(a.in_dim()), cfg, steps, false);
}

// ---------------------------------------------------------------------------

void CoilSketchConfig::validate(Index coils) const
{
    const Index c0 = c_hat0 == 0 ? coils : c_hat0;
    if (c0 < 1 || c0 > coils) {
        throw ParameterError("C_hat0 must be in [1, C]");
    }
    if (!(c_hat0_energy > 0.0 && c_hat0_energy <= 1.0)) {
        throw ParameterError("C_hat0 energy fraction must lie in (0, 1]");
    }
    sketch.validate();
    if (c_hat0 > 0 && sketch.c_hat > c0) {
        throw ParameterError("sketch C_hat exceeds C_hat0");
    }
    if (outer_iters < 1 || inner_iters < 1) {
        throw ParameterError("outer and inner iteration counts must be at least 1");
    }
    if (use_init && init_iters < 1) {
        throw ParameterError("init_iters must be at least 1");
    }
    if (solver == SolverKind::cg && reg.kind != RegKind::l2) {
        throw ParameterError("cg needs the l2 regularizer");
    }
    if (solver == SolverKind::pdhg && reg.kind == RegKind::l2) {
        throw ParameterError("pdhg needs an l1 regularizer");
    }
    if (!(divergence_factor > 1.0)) {
        throw ParameterError("divergence factor must exceed 1");
    }
    solver_cfg.validate();
}

Index resolve_c_hat0(const CoilSketchConfig& cfg, const KSpaceData& data)
{
    if (cfg.c_hat0 > 0) {
        return cfg.c_hat0;
    }
    return cfg.c_hat0_energy >= 1.0 ? data.count() : coils_for_energy(data, cfg.c_hat0_energy);
}

std::int64_t coil_sketch_cost(const CoilSketchConfig& cfg, Index c_hat0, Index coils)
{
    const std::int64_t c0 = c_hat0 == 0 ? coils : c_hat0;
    const std::int64_t ch = cfg.sketch.c_hat;
    const std::int64_t k = applications_per_iteration(cfg.solver, cfg.solver_cfg);
    std::int64_t init = 0;
    if (cfg.use_init) {
        init = (cfg.solver == SolverKind::fista ? 0 : ch) + cfg.init_iters * k * ch;
    }
    return init + cfg.outer_iters * (2 * c0 + cfg.inner_iters * k * ch);
}

ReconReport coil_sketching_recon(const SenseOperator& op, const KSpaceData& data,
                                 const CoilSketchConfig& cfg)
{
    cfg.validate(op.coils());
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const LedgerPtr ledger = op.ledger();
    const CostTags base = ledger ? ledger->snapshot() : CostTags{};
    auto counted = [&] { return ledger ? ledger->snapshot() - base : CostTags{}; };
    auto estimate_ledger = std::make_shared<CostLedger>();

    ReconReport rep;
    rep.c_hat0 = resolve_c_hat0(cfg, data);
    if (cfg.sketch.c_hat > rep.c_hat0) {
        throw ParameterError("sketch C_hat exceeds C_hat0 = " + std::to_string(rep.c_hat0));
    }

    // Initial compression into the energy-ordered virtual-coil basis.
    const CompressionResult cc = coil_compress_svd(data, op.maps(), rep.c_hat0);
    rep.energy_fraction = cc.energy_fraction;
    const SenseOperator a0 = op.with_maps(cc.maps);
    const Vec y = a0.weight_data(cc.data);

    SolverConfig inner = cfg.solver_cfg;
    inner.max_iters = cfg.inner_iters;
    inner.tol = cfg.solver_cfg.tol;
    inner.ledger = nullptr;
    std::vector<double>* history = cfg.solver_cfg.record_history ? &rep.objective_history : nullptr;

    Vec x = Vec::Zero(op.in_dim());
    if (cfg.use_init) {
        SketchConfig sc = cfg.sketch;
        sc.seed = seed_stream(cfg.sketch.seed, 0);
        SolverConfig icfg = inner;
        icfg.max_iters = cfg.init_iters;
        icfg.record_history = false;
        const SketchMatrix sk0 = gen_sketch_matrix(sc, rep.c_hat0);
        const QuadraticModel q{build_sketched_operator(a0, sk0), Vec(),
                               sketch_data(y, sk0, a0.samples()), Vec()};
        StepCache init_steps;
        x = solve_model(q, cfg.reg, cfg.solver, x, icfg, init_steps, false, nullptr,
                        estimate_ledger)
                .x;
        rep.init_cost = counted();
    }
    rep.x_init = x;
    rep.initial_objective = full_objective(a0, y, cfg.reg, x);

    StepCache steps;
    Vec dual;
    for (int t = 0; t < cfg.outer_iters; ++t) {
        SketchConfig sc = cfg.sketch;
        sc.seed = seed_stream(cfg.sketch.seed, static_cast<std::uint64_t>(t) + 1);
        const SketchMatrix sk = gen_sketch_matrix(sc, rep.c_hat0);
        const SketchSubproblem sub{x, true_gradient(a0, x, y), build_sketched_operator(a0, sk),
                                   cfg.reg};
        const QuadraticModel q = sub.model();
        const SolveResult r = solve_model(q, cfg.reg, cfg.solver, x, inner, steps,
                                          cfg.reuse_step_size, &dual, estimate_ledger);
        x = r.x;
        if (history != nullptr) {
            history->insert(history->end(), r.objective_history.begin(),
                            r.objective_history.end());
        }

        OuterRecord rec;
        rec.t = t + 1;
        rec.objective = full_objective(a0, y, cfg.reg, x);
        if (cfg.reference) {
            const double den = cfg.reference->norm();
            rec.distance = den > 0.0 ? (x - *cfg.reference).norm() / den : 0.0;
        }
        rec.cost = counted();
        rec.seconds = elapsed();
        rep.per_outer.push_back(rec);
        if (cfg.keep_iterates) {
            rep.iterates.push_back(x);
        }
        const double ref_obj = std::max(std::abs(rep.initial_objective),
                                        std::numeric_limits<double>::min());
        if (!std::isfinite(rec.objective) || rec.objective > cfg.divergence_factor * ref_obj) {
            rep.diverged = true;
            break;
        }
    }
    rep.x_final = std::move(x);
    rep.total = counted();
    rep.estimate_cost = estimate_ledger->snapshot();
    rep.wall_time = elapsed();
    return rep;
}

}  // namespace coilsketch
