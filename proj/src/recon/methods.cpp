#include "coilsketch/recon/methods.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/core/transforms.hpp"
#include "coilsketch/metrics/metrics.hpp"

namespace coilsketch {

std::string to_string(Method m)
{
    switch (m) {
    case Method::baseline: return "baseline";
    case Method::coil_compression: return "coil-compression";
    case Method::accproxsgd: return "accproxsgd";
    case Method::coil_sketching: return "coil-sketching";
    }
    return "?";
}

Method parse_method(const std::string& s)
{
    if (s == "baseline") return Method::baseline;
    if (s == "coil-compression") return Method::coil_compression;
    if (s == "accproxsgd") return Method::accproxsgd;
    if (s == "coil-sketching") return Method::coil_sketching;
    throw ParameterError("unknown method '" + s + "'");
}

Regularizer make_regularizer(RegKind kind, double lambda, const GridShape& shape,
                             LedgerPtr ledger)
{
    switch (kind) {
    case RegKind::l2: return Regularizer::l2(lambda, shape.size());
    case RegKind::l1_wavelet: return Regularizer::wavelet(lambda, shape, std::move(ledger));
    case RegKind::l1_tv: return Regularizer::tv(lambda, shape, std::move(ledger));
    }
    throw ParameterError("unknown regularizer");
}

namespace {

using Clock = std::chrono::steady_clock;

// Observer appending a trace point per iteration.
IterateObserver tracer(MethodResult& r, const LedgerPtr& ledger, const MethodSettings& s,
                       Clock::time_point start)
{
    return [&trace = r.trace, &snaps = r.snapshots, ledger, &reference = s.reference,
            &snapshot_at = s.snapshot_at, start](int k, const Vec& x) {
        TracePoint p;
        p.iteration = k;
        p.cost = ledger->snapshot();
        p.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (reference) {
            p.distance = (x - *reference).norm() / reference->norm();
        }
        trace.push_back(p);
        if (std::find(snapshot_at.begin(), snapshot_at.end(), k) != snapshot_at.end()) {
            snaps.push_back({k, p.cost, x});
        }
    };
}

void mark_converged(MethodResult& r)
{
    for (const TracePoint& p : r.trace) {
        if (p.distance < kConvergedDistance) {
            r.converged = p;
            return;
        }
    }
}

// Single-loop solve of the full or compressed problem.
MethodResult run_direct(Method method, const SenseOperator& op, const Vec& y, double lambda,
                        const MethodSettings& s)
{
    MethodResult r;
    r.method = method;
    auto ledger = op.ledger();
    auto estimate = std::make_shared<CostLedger>();
    const Regularizer reg = make_regularizer(s.reg_kind, lambda, op.shape(), ledger);
    const QuadraticModel q{op, Vec(), y, Vec()};
    SolverConfig cfg = s.solver_cfg;
    const auto start = Clock::now();
    cfg.on_iterate = tracer(r, ledger, s, start);
    StepCache steps;
    Vec dual;
    const SolveResult sr = solve_model(q, reg, s.solver, Vec::Zero(op.in_dim()), cfg, steps,
                                       false, &dual, estimate);
    r.x = sr.x;
    r.iterations = sr.iterations_run;
    r.objective_history = sr.objective_history;
    r.cost = ledger->snapshot();
    r.estimate_cost = estimate->snapshot();
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

}  // namespace

MethodResult run_method(Method method, const SenseOperator& full_op, const KSpaceData& data,
                        const MethodSettings& s)
{
    auto ledger = std::make_shared<CostLedger>();
    const SenseOperator op = full_op.with_ledger(ledger);
    const Vec y_full = op.weight_data(data);
    const Regularizer reg_eval = make_regularizer(s.reg_kind, s.lambda, op.shape());

    MethodResult r;
    switch (method) {
    case Method::baseline:
        r = run_direct(method, op, y_full, s.lambda, s);
        break;
    case Method::coil_compression: {
        const CompressionResult cc = coil_compress_svd(data, op.maps(), s.c_hat);
        const SenseOperator small = op.with_maps(cc.maps);
        r = run_direct(method, small, small.weight_data(cc.data), s.lambda_compressed, s);
        break;
    }
    case Method::accproxsgd: {
        const int iters = s.sgd_iters > 0 ? s.sgd_iters : s.solver_cfg.max_iters;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < s.sgd_seeds; ++k) {
            MethodResult cand;
            cand.method = method;
            auto run_ledger = std::make_shared<CostLedger>();
            const SenseOperator run_op = op.with_ledger(run_ledger);
            const Regularizer reg =
                make_regularizer(s.reg_kind, s.lambda, op.shape(), run_ledger);
            SolverConfig cfg = s.solver_cfg;
            cfg.max_iters = iters;
            cfg.seed = seed_stream(s.solver_cfg.seed, static_cast<std::uint64_t>(k));
            const auto start = Clock::now();
            cfg.on_iterate = tracer(cand, run_ledger, s, start);
            const SolveResult sr = accproxsgd(run_op, y_full, reg, s.c_hat, s.sgd,
                                              Vec::Zero(op.in_dim()), cfg);
            cand.x = sr.x;
            cand.iterations = sr.iterations_run;
            cand.cost = run_ledger->snapshot();
            cand.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            const double obj = full_objective(op, y_full, reg_eval, cand.x);
            if (obj < best) {
                best = obj;
                r = std::move(cand);
            }
        }
        break;
    }
    case Method::coil_sketching: {
        CoilSketchConfig cfg = s.sketch;
        cfg.solver = s.solver;
        cfg.reg = make_regularizer(s.reg_kind, s.lambda, op.shape(), ledger);
        cfg.solver_cfg = s.solver_cfg;
        cfg.reference = s.reference;
        cfg.keep_iterates = cfg.keep_iterates || !s.snapshot_at.empty();
        ReconReport rep = coil_sketching_recon(op, data, cfg);
        r.method = method;
        r.x = rep.x_final;
        r.iterations = static_cast<int>(rep.per_outer.size());
        r.cost = rep.total;
        r.estimate_cost = rep.estimate_cost;
        r.seconds = rep.wall_time;
        r.diverged = rep.diverged;
        r.objective_history = rep.objective_history;
        for (const OuterRecord& o : rep.per_outer) {
            r.trace.push_back({o.t, o.cost, o.seconds, o.distance});
            const auto i = static_cast<std::size_t>(o.t - 1);
            if (std::find(s.snapshot_at.begin(), s.snapshot_at.end(), o.t) != s.snapshot_at.end() &&
                i < rep.iterates.size()) {
                r.snapshots.push_back({o.t, o.cost, rep.iterates[i]});
            }
        }
        r.sketch_report = std::move(rep);
        break;
    }
    }
    r.objective = full_objective(op, y_full, reg_eval, r.x);
    mark_converged(r);
    return r;
}

Vec reference_solution(const SenseOperator& op, const KSpaceData& data,
                       const MethodSettings& settings, int iters)
{
    MethodSettings s = settings;
    s.solver_cfg.max_iters = iters;
    s.solver_cfg.tol = 0.0;
    s.solver_cfg.record_history = false;
    s.reference.reset();
    return run_method(Method::baseline, op, data, s).x;
}

}  // namespace coilsketch
