#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/types.hpp"
#include "coilsketch/model/sense.hpp"
#include "coilsketch/sketch/sketching.hpp"
#include "coilsketch/solvers/solvers.hpp"

namespace coilsketch {

enum class SolverKind { cg, fista, pdhg };

std::string to_string(SolverKind k);
SolverKind parse_solver_kind(const std::string& s);

/// Data term q(x) = ½‖B(x − anchor) − offset‖² + Re⟨x, linear⟩.
///
/// The full problem uses anchor = 0, offset = y, linear = 0. A sketched
/// sub-problem uses B = A_S, anchor = x^t, no offset and linear = d.
/// Empty vectors stand for zero.
struct QuadraticModel {
    SenseOperator op;
    Vec anchor;
    Vec offset;
    Vec linear;

    /// Bᴴ(B(x − anchor) − offset) + linear; costs 2·coils transforms.
    [[nodiscard]] Vec gradient(const Vec& x) const;
    /// q(x) without recording costs.
    [[nodiscard]] double value(const Vec& x) const;
};

/// Step sizes carried between solves so they can be estimated once.
struct StepCache {
    double lambda_max = 0.0;  ///< λ_max(BᴴB) for FISTA
    double pdhg_tau = 0.0;
    double pdhg_sigma = 0.0;
    [[nodiscard]] bool ready(SolverKind k) const;
};

/// Minimizes q(x) + g(x) from x0 for cfg.max_iters iterations.
///   cg:    ℓ2 regularizer only; CG on the normal equations in δ = x − anchor.
///   fista: step cfg.step_scale/λ_max.
///   pdhg:  K = the regularizer transform; the data term enters through its
///          prox, solved by cfg.inner_cg_iters warm-started CG steps.
/// Steps come from `steps` when ready and `reuse` is set; otherwise they are
/// estimated by power iteration on an operator copy recording into
/// `estimate_ledger`. `dual` (PDHG) is used as the start and updated in place.
SolveResult solve_model(const QuadraticModel& q, const Regularizer& reg, SolverKind kind,
                        const Vec& x0, const SolverConfig& cfg, StepCache& steps, bool reuse,
                        Vec* dual = nullptr, const LedgerPtr& estimate_ledger = nullptr);

/// Per-iteration operator applications of each solver, in units of the
/// operator's coil count.
std::int64_t applications_per_iteration(SolverKind kind, const SolverConfig& cfg);

/// ½‖Ax − y‖² + g(x) without recording costs.
double full_objective(const SenseOperator& a, const Vec& y, const Regularizer& reg, const Vec& x);

/// d = Aᴴ(Ax − y).
Vec true_gradient(const SenseOperator& a, const Vec& x, const Vec& y);

/// Frozen state of one outer iteration.
struct SketchSubproblem {
    Vec anchor;
    Vec true_grad;
    SenseOperator sketched_op;
    Regularizer reg;

    [[nodiscard]] QuadraticModel model() const;
    /// ½‖A_S(x − x^t)‖² + Re⟨x, d⟩, without recording costs.
    [[nodiscard]] double value(const Vec& x) const;
};

/// A_Sᴴ A_S (x − x^t) + d.
Vec sketched_objective_grad(const SketchSubproblem& sub, const Vec& x);

/// Solves ½‖S A x − S y‖² + g(x) with the chosen solver from zero.
SolveResult classical_sketch_solve(const SenseOperator& a, const Vec& y, const SketchMatrix& sk,
                                   const Regularizer& reg, SolverKind kind,
                                   const SolverConfig& cfg);

struct CoilSketchConfig {
    Index c_hat0 = 0;  ///< coils kept by the initial compression; 0 defers to c_hat0_energy
    double c_hat0_energy = 1.0;  ///< smallest Ĉ₀ retaining this energy fraction; 1 keeps all
    SketchConfig sketch;
    int outer_iters = 10;
    int inner_iters = 20;
    bool use_init = false;
    int init_iters = 20;
    bool reuse_step_size = true;
    SolverKind solver = SolverKind::fista;
    Regularizer reg;
    SolverConfig solver_cfg;
    double divergence_factor = 10.0;
    std::optional<Vec> reference;   ///< x^∞ for the distance column
    bool keep_iterates = false;     ///< store x^t for every outer iteration

    void validate(Index coils) const;
};

struct OuterRecord {
    int t = 0;
    double distance = std::numeric_limits<double>::quiet_NaN();
    double objective = 0.0;
    CostTags cost;        ///< cumulative, excluding step estimation
    double seconds = 0.0; ///< cumulative
};

struct ReconReport {
    Vec x_final;
    Vec x_init;                     ///< x⁰ (zero or the classical-sketch solution)
    std::vector<OuterRecord> per_outer;
    std::vector<Vec> iterates;      ///< x^1..x^T when keep_iterates
    std::vector<double> objective_history;  ///< inner sub-problem objectives, when recorded
    CostTags total;                 ///< all counted work
    CostTags init_cost;             ///< classical-sketch initialization
    CostTags estimate_cost;         ///< power iterations for step sizes (reported apart)
    Index c_hat0 = 0;
    double energy_fraction = 1.0;
    double initial_objective = 0.0;
    bool diverged = false;
    double wall_time = 0.0;
};

/// Coil sketching: compress to Ĉ₀ virtual coils, optionally initialize with a
/// classical sketch, then for t = 0..T−1 compute the true gradient at x^t,
/// draw a fresh sketch from seed_stream(seed, t + 1), and solve the sketched
/// sub-problem warm-started at x^t. Stops early and sets `diverged` when the
/// objective exceeds divergence_factor times its value at x⁰.
///
/// `op` carries the full-coil maps, Fourier sampler, weights and ledger.
ReconReport coil_sketching_recon(const SenseOperator& op, const KSpaceData& data,
                                 const CoilSketchConfig& cfg);

/// Ĉ₀ used for `data`: the explicit count or the energy rule.
Index resolve_c_hat0(const CoilSketchConfig& cfg, const KSpaceData& data);

/// Closed-form coil-transform count of coil_sketching_recon for a completed
/// run (no early stopping of inner solvers).
std::int64_t coil_sketch_cost(const CoilSketchConfig& cfg, Index c_hat0, Index coils);

}  // namespace coilsketch
