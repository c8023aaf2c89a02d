#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/rng.hpp"
#include "coilsketch/core/types.hpp"
#include "coilsketch/model/sense.hpp"

namespace coilsketch {

enum class RegKind { l2, l1_wavelet, l1_tv };

std::string to_string(RegKind k);
RegKind parse_reg_kind(const std::string& s);

/// g(x): λ/2‖x‖², λ‖Ψx‖₁ (Ψ unitary wavelet) or λ‖Tx‖₁ (periodic differences).
struct Regularizer {
    RegKind kind = RegKind::l2;
    double lambda = 0.0;
    LinOp transform;

    static Regularizer l2(double lambda, Index dim);
    static Regularizer wavelet(double lambda, const GridShape& shape, LedgerPtr ledger = nullptr);
    static Regularizer tv(double lambda, const GridShape& shape, LedgerPtr ledger = nullptr);

    /// Evaluates g without recording transform costs.
    [[nodiscard]] double value(const Vec& x) const;
};

using GradFn = std::function<Vec(const Vec&)>;
/// prox(v, t) = argmin_x t·g(x) + ½‖x − v‖²
using ProxFn = std::function<Vec(const Vec&, double)>;
using ObjectiveFn = std::function<double(const Vec&)>;
using IterateObserver = std::function<void(int, const Vec&)>;

struct SolverConfig {
    int max_iters = 100;
    double tol = 1e-6;            ///< relative update norm (CG: relative residual)
    double step_scale = 0.9;      ///< step = step_scale / λ_max
    double pdhg_sigma_tau_ratio = 1.0;
    double pdhg_tau = 0.0;        ///< 0: derive τ, σ from ‖K‖
    double pdhg_sigma = 0.0;
    int inner_cg_iters = 8;
    int prox_iters = 20;          ///< inner iterations for proxes without closed form
    int power_iters = 30;
    bool record_history = false;
    std::uint64_t seed = 0;
    LedgerPtr ledger;             ///< counters reported in SolveResult
    IterateObserver on_iterate;   ///< called after every iteration with x_k

    void validate() const;
};

struct SolveResult {
    Vec x;
    Vec dual;  ///< PDHG only
    int iterations_run = 0;
    bool converged = false;
    std::vector<double> objective_history;
    std::int64_t coil_transform_count = 0;
    std::int64_t sparse_transform_count = 0;
    double wall_time = 0.0;
};

/// Elementwise complex soft-thresholding: v·max(|v| − t, 0)/|v|.
Vec prox_l1(const Vec& v, double thresh);

/// Proximal map of t·g for the given regularizer. Wavelet prox is closed form;
/// TV runs cfg.prox_iters PDHG iterations on the denoising dual.
Vec prox_regularizer(const Regularizer& reg, const Vec& v, double t, const SolverConfig& cfg);
ProxFn make_prox(const Regularizer& reg, const SolverConfig& cfg);

/// Conjugate gradient on a Hermitian positive (semi)definite system M x = b.
SolveResult cg_solve(const std::function<Vec(const Vec&)>& apply_m, const Vec& b, const Vec& x0,
                     const SolverConfig& cfg, const ObjectiveFn& objective = {});

/// Solves (AᴴA + λI) x = Aᴴy by CG.
SolveResult cg_normal(const LinOp& a, const Vec& y, double lambda, const Vec& x0,
                      const SolverConfig& cfg);

/// FISTA with step 1/L and Nesterov momentum t_{k+1} = (1 + √(1 + 4t_k²))/2.
SolveResult fista(const GradFn& grad, const ProxFn& prox, double lipschitz, const Vec& x0,
                  const SolverConfig& cfg, const ObjectiveFn& objective = {});

/// Chambolle-Pock for min_x F(Kx) + G(x), θ = 1. `prox_fdual(v, σ)` is the prox of σF*.
SolveResult pdhg(const LinOp& k, const ProxFn& prox_fdual, const ProxFn& prox_g, const Vec& x0,
                 const SolverConfig& cfg, const ObjectiveFn& objective = {},
                 const Vec& dual0 = Vec());

/// prox of σ·(λ‖·‖₁)* : projection onto the ℓ∞ ball of radius λ.
ProxFn l1_dual_prox(double lambda);

/// (C/B) Σ_{c∈batch} A_cᴴ(A_c x − y_c) over `batch` coils drawn without replacement.
Vec stochastic_gradient(const SenseOperator& op, const Vec& y, const Vec& x, Index batch,
                        Rng& rng);

struct SgdSchedule {
    double alpha0 = 0.0;    ///< 0: 1/λ_max(AᴴA)
    double beta = 0.95;
    double beta_min = 0.0;  ///< 0: 0.1·α0
};

/// Accelerated proximal SGD over random coil batches with α_t = max(β^t α0, β_min).
SolveResult accproxsgd(const SenseOperator& op, const Vec& y, const Regularizer& reg,
                       Index batch, SgdSchedule schedule, const Vec& x0,
                       const SolverConfig& cfg, const ObjectiveFn& objective = {});

}  // namespace coilsketch
