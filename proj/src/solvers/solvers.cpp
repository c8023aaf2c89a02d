#include "coilsketch/solvers/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "coilsketch/core/transforms.hpp"

namespace coilsketch {

std::string to_string(RegKind k)
{
    switch (k) {
    case RegKind::l2: return "l2";
    case RegKind::l1_wavelet: return "l1-wavelet";
    case RegKind::l1_tv: return "l1-tv";
    }
    return "?";
}

RegKind parse_reg_kind(const std::string& s)
{
    if (s == "l2") return RegKind::l2;
    if (s == "l1-wavelet") return RegKind::l1_wavelet;
    if (s == "l1-tv") return RegKind::l1_tv;
    throw ParameterError("unknown regularizer '" + s + "'");
}

Regularizer Regularizer::l2(double lambda, Index dim)
{
    if (lambda < 0.0) {
        throw ParameterError("regularization weight must be nonnegative");
    }
    return {RegKind::l2, lambda, identity_op(dim)};
}

Regularizer Regularizer::wavelet(double lambda, const GridShape& shape, LedgerPtr ledger)
{
    if (lambda < 0.0) {
        throw ParameterError("regularization weight must be nonnegative");
    }
    return {RegKind::l1_wavelet, lambda, wavelet_op(shape, -1, std::move(ledger))};
}

Regularizer Regularizer::tv(double lambda, const GridShape& shape, LedgerPtr ledger)
{
    if (lambda < 0.0) {
        throw ParameterError("regularization weight must be nonnegative");
    }
    return {RegKind::l1_tv, lambda, finite_diff_op(shape, std::move(ledger))};
}

double Regularizer::value(const Vec& x) const
{
    if (kind == RegKind::l2) {
        return 0.5 * lambda * x.squaredNorm();
    }
    const Vec c = transform.with_ledger(nullptr).forward(x);
    return lambda * c.cwiseAbs().sum();
}

void SolverConfig::validate() const
{
    if (max_iters < 1) {
        throw ParameterError("max_iters must be at least 1");
    }
    if (tol < 0.0) {
        throw ParameterError("tol must be nonnegative");
    }
    if (!(step_scale > 0.0 && step_scale <= 1.0)) {
        throw ParameterError("step_scale must lie in (0, 1]");
    }
}

namespace {

using Clock = std::chrono::steady_clock;

class RunMeter {
public:
    explicit RunMeter(const SolverConfig& cfg)
        : ledger_(cfg.ledger), start_(Clock::now()), base_(ledger_ ? ledger_->snapshot() : CostTags{})
    {
    }
    void finish(SolveResult& r) const
    {
        r.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
        if (ledger_) {
            const CostTags d = ledger_->snapshot() - base_;
            r.coil_transform_count = d.coil_transforms;
            r.sparse_transform_count = d.sparse_transforms;
        }
    }

private:
    LedgerPtr ledger_;
    Clock::time_point start_;
    CostTags base_;
};

bool small_update(const Vec& next, const Vec& prev, double tol)
{
    const double step = (next - prev).norm();
    const double ref = prev.norm();
    if (ref == 0.0) {
        return step == 0.0;
    }
    return step / ref < tol;
}

}  // namespace

// ---------------------------------------------------------------------------

Vec prox_l1(const Vec& v, double thresh)
{
    if (thresh < 0.0) {
        throw ParameterError("soft threshold must be nonnegative");
    }
    Vec out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        out[i] = mag > thresh ? v[i] * ((mag - thresh) / mag) : cplx(0.0);
    }
    return out;
}

ProxFn l1_dual_prox(double lambda)
{
    return [lambda](const Vec& v, double) {
        Vec out(v.size());
        for (Index i = 0; i < v.size(); ++i) {
            const double mag = std::abs(v[i]);
            out[i] = mag > lambda ? v[i] * (lambda / mag) : v[i];
        }
        return out;
    };
}

Vec prox_regularizer(const Regularizer& reg, const Vec& v, double t, const SolverConfig& cfg)
{
    const double thresh = t * reg.lambda;
    switch (reg.kind) {
    case RegKind::l2:
        return v / (1.0 + thresh);
    case RegKind::l1_wavelet:
        return reg.transform.adjoint(prox_l1(reg.transform.forward(v), thresh));
    case RegKind::l1_tv: {
        if (thresh == 0.0) {
            return v;
        }
        // min_x ½‖x − v‖² + thresh‖Tx‖₁ by PDHG with the quadratic in the primal.
        SolverConfig inner;
        inner.max_iters = cfg.prox_iters;
        inner.tol = 0.0;
        inner.seed = cfg.seed;
        inner.pdhg_sigma_tau_ratio = 1.0;
        const ProxFn prox_g = [&v](const Vec& z, double tau) {
            return Vec((z + tau * v) / (1.0 + tau));
        };
        return pdhg(reg.transform, l1_dual_prox(thresh), prox_g, v, inner).x;
    }
    }
    return v;
}

ProxFn make_prox(const Regularizer& reg, const SolverConfig& cfg)
{
    return [reg, cfg](const Vec& v, double t) { return prox_regularizer(reg, v, t, cfg); };
}

// ---------------------------------------------------------------------------

SolveResult cg_solve(const std::function<Vec(const Vec&)>& apply_m, const Vec& b, const Vec& x0,
                     const SolverConfig& cfg, const ObjectiveFn& objective)
{
    cfg.validate();
    RunMeter meter(cfg);
    SolveResult res;
    Vec x = x0;
    Vec r = x.isZero(0.0) ? b : Vec(b - apply_m(x));
    Vec p = r;
    double rr = r.squaredNorm();
    const double bnorm = b.norm();
    for (int k = 0; k < cfg.max_iters; ++k) {
        if (rr == 0.0 || std::sqrt(rr) <= cfg.tol * bnorm) {
            res.converged = true;
            break;
        }
        const Vec mp = apply_m(p);
        const double alpha = rr / p.dot(mp).real();
        x += alpha * p;
        r -= alpha * mp;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
        ++res.iterations_run;
        if (cfg.record_history && objective) {
            res.objective_history.push_back(objective(x));
        }
        if (cfg.on_iterate) {
            cfg.on_iterate(res.iterations_run, x);
        }
    }
    if (!res.converged && (rr == 0.0 || std::sqrt(rr) <= cfg.tol * bnorm)) {
        res.converged = true;
    }
    res.x = std::move(x);
    meter.finish(res);
    return res;
}

SolveResult cg_normal(const LinOp& a, const Vec& y, double lambda, const Vec& x0,
                      const SolverConfig& cfg)
{
    if (lambda < 0.0) {
        throw ParameterError("cg_normal: lambda must be nonnegative");
    }
    RunMeter meter(cfg);
    const Vec b = a.adjoint(y);
    auto apply_m = [&](const Vec& v) {
        Vec out = a.adjoint(a.forward(v));
        if (lambda != 0.0) {
            out += lambda * v;
        }
        return out;
    };
    const LinOp silent = a.with_ledger(nullptr);
    ObjectiveFn objective = [&](const Vec& v) {
        return 0.5 * (silent.forward(v) - y).squaredNorm() + 0.5 * lambda * v.squaredNorm();
    };
    SolveResult res = cg_solve(apply_m, b, x0, cfg, objective);
    meter.finish(res);
    return res;
}

// ---------------------------------------------------------------------------

SolveResult fista(const GradFn& grad, const ProxFn& prox, double lipschitz, const Vec& x0,
                  const SolverConfig& cfg, const ObjectiveFn& objective)
{
    cfg.validate();
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw ParameterError("fista: Lipschitz constant must be positive");
    }
    RunMeter meter(cfg);
    SolveResult res;
    const double step = 1.0 / lipschitz;
    Vec x = x0;
    Vec z = x0;
    double t = 1.0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        Vec x_next = prox(z - step * grad(z), step);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x_next + ((t - 1.0) / t_next) * (x_next - x);
        t = t_next;
        const bool done = small_update(x_next, x, cfg.tol);
        x = std::move(x_next);
        ++res.iterations_run;
        if (cfg.record_history && objective) {
            res.objective_history.push_back(objective(x));
        }
        if (cfg.on_iterate) {
            cfg.on_iterate(res.iterations_run, x);
        }
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    meter.finish(res);
    return res;
}

// ---------------------------------------------------------------------------

SolveResult pdhg(const LinOp& k, const ProxFn& prox_fdual, const ProxFn& prox_g, const Vec& x0,
                 const SolverConfig& cfg, const ObjectiveFn& objective, const Vec& dual0)
{
    cfg.validate();
    RunMeter meter(cfg);
    const LinOp silent = k.with_ledger(nullptr);
    double norm_k2 = 0.0;
    double tau = cfg.pdhg_tau;
    double sigma = cfg.pdhg_sigma;
    if (tau > 0.0 && sigma > 0.0) {
        norm_k2 = max_eig_power(normal_op(silent), std::max(cfg.power_iters, 50), cfg.seed);
        if (sigma * tau * norm_k2 > 1.0 + 1e-9) {
            throw ParameterError("pdhg: step sizes violate sigma*tau*|K|^2 <= 1");
        }
    } else {
        // Power iteration approaches ‖K‖² from below; pad it so the bound holds.
        norm_k2 = 1.05 * max_eig_power(normal_op(silent), std::max(cfg.power_iters, 50), cfg.seed);
        if (norm_k2 <= 0.0) {
            tau = sigma = 1.0;
        } else {
            const double ratio = cfg.pdhg_sigma_tau_ratio;
            tau = 1.0 / std::sqrt(norm_k2 * ratio);
            sigma = ratio * tau;
        }
    }

    SolveResult res;
    Vec x = x0;
    Vec x_bar = x0;
    Vec u = dual0.size() == k.out_dim() ? dual0 : Vec(Vec::Zero(k.out_dim()));
    for (int it = 0; it < cfg.max_iters; ++it) {
        u = prox_fdual(u + sigma * k.forward(x_bar), sigma);
        Vec x_next = prox_g(x - tau * k.adjoint(u), tau);
        x_bar = 2.0 * x_next - x;
        const bool done = small_update(x_next, x, cfg.tol);
        x = std::move(x_next);
        ++res.iterations_run;
        if (cfg.record_history && objective) {
            res.objective_history.push_back(objective(x));
        }
        if (cfg.on_iterate) {
            cfg.on_iterate(res.iterations_run, x);
        }
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    res.dual = std::move(u);
    meter.finish(res);
    return res;
}

// ---------------------------------------------------------------------------

Vec stochastic_gradient(const SenseOperator& op, const Vec& y, const Vec& x, Index batch,
                        Rng& rng)
{
    const Index c = op.coils();
    if (batch < 1 || batch > c) {
        throw ParameterError("coil batch must be in [1, " + std::to_string(c) + "]");
    }
    std::vector<Index> ids(static_cast<std::size_t>(c));
    std::iota(ids.begin(), ids.end(), Index{0});
    // Partial Fisher-Yates: the first `batch` entries are a uniform draw without replacement.
    for (Index i = 0; i < batch; ++i) {
        std::uniform_int_distribution<Index> pick(i, c - 1);
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(pick(rng))]);
    }
    ids.resize(static_cast<std::size_t>(batch));
    std::sort(ids.begin(), ids.end());

    const Index n = op.samples();
    const SenseOperator sub = op.subset(ids);
    Vec yb(batch * n);
    for (Index j = 0; j < batch; ++j) {
        yb.segment(j * n, n) = y.segment(ids[static_cast<std::size_t>(j)] * n, n);
    }
    const Vec g = sub.adjoint(Vec(sub.forward(x) - yb));
    return (static_cast<double>(c) / static_cast<double>(batch)) * g;
}

SolveResult accproxsgd(const SenseOperator& op, const Vec& y, const Regularizer& reg,
                       Index batch, SgdSchedule schedule, const Vec& x0,
                       const SolverConfig& cfg, const ObjectiveFn& objective)
{
    cfg.validate();
    if (batch < 1 || batch > op.coils()) {
        throw ParameterError("accproxsgd: batch must be in [1, C]");
    }
    RunMeter meter(cfg);
    if (schedule.alpha0 <= 0.0) {
        const double lmax =
            max_eig_power(normal_op(op.with_ledger(nullptr).as_linop()), cfg.power_iters, cfg.seed);
        schedule.alpha0 = lmax > 0.0 ? 1.0 / lmax : 1.0;
    }
    if (schedule.beta_min <= 0.0) {
        schedule.beta_min = 0.1 * schedule.alpha0;
    }
    const ProxFn prox = make_prox(reg, cfg);
    Rng rng = make_rng(cfg.seed, 0x59d);

    SolveResult res;
    Vec x = x0;
    Vec z = x0;
    double t = 1.0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        const double alpha =
            std::max(std::pow(schedule.beta, static_cast<double>(k)) * schedule.alpha0,
                     schedule.beta_min);
        const Vec g = stochastic_gradient(op, y, z, batch, rng);
        Vec x_next = prox(z - alpha * g, alpha);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x_next + ((t - 1.0) / t_next) * (x_next - x);
        t = t_next;
        const bool done = small_update(x_next, x, cfg.tol);
        x = std::move(x_next);
        ++res.iterations_run;
        if (cfg.record_history && objective) {
            res.objective_history.push_back(objective(x));
        }
        if (cfg.on_iterate) {
            cfg.on_iterate(res.iterations_run, x);
        }
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    meter.finish(res);
    return res;
}

}  // namespace coilsketch
