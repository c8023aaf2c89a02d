#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coilsketch/recon/coil_sketch.hpp"

namespace coilsketch {

enum class Method { baseline, coil_compression, accproxsgd, coil_sketching };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct TracePoint {
    int iteration = 0;
    CostTags cost;  ///< cumulative
    double seconds = 0.0;
    double distance = std::numeric_limits<double>::quiet_NaN();
};

struct MethodSettings {
    RegKind reg_kind = RegKind::l1_wavelet;
    double lambda = 0.02;
    double lambda_compressed = 0.01;  ///< used by coil compression
    SolverKind solver = SolverKind::fista;
    SolverConfig solver_cfg;          ///< max_iters = iterations of single-loop methods
    Index c_hat = 4;                  ///< compression size and SGD batch
    CoilSketchConfig sketch;          ///< reg and solver are filled from the fields above
    SgdSchedule sgd;
    int sgd_iters = 0;                ///< 0: solver_cfg.max_iters
    int sgd_seeds = 20;
    std::optional<Vec> reference;     ///< x^∞ for distance traces
    std::vector<int> snapshot_at;     ///< iterations (outer for sketching) whose iterate is kept
};

struct Snapshot {
    int iteration = 0;
    CostTags cost;
    Vec x;
};

struct MethodResult {
    Method method = Method::baseline;
    Vec x;
    int iterations = 0;
    CostTags cost;                 ///< counted work
    CostTags estimate_cost;        ///< step-size power iterations, reported apart
    double seconds = 0.0;
    double objective = 0.0;        ///< full C-coil objective at x with the baseline λ
    bool diverged = false;
    std::vector<TracePoint> trace;
    std::vector<double> objective_history;
    std::optional<TracePoint> converged;  ///< first trace point with distance < 0.05
    std::optional<ReconReport> sketch_report;
    std::vector<Snapshot> snapshots;  ///< in iteration order
};

Regularizer make_regularizer(RegKind kind, double lambda, const GridShape& shape,
                             LedgerPtr ledger = nullptr);

/// Runs one method on coil data acquired through `op` (full C coils). Costs
/// are tallied on a private ledger, so `op`'s own ledger is left untouched.
MethodResult run_method(Method method, const SenseOperator& op, const KSpaceData& data,
                        const MethodSettings& settings);

/// Long baseline run used as x^∞.
Vec reference_solution(const SenseOperator& op, const KSpaceData& data,
                       const MethodSettings& settings, int iters);

}  // namespace coilsketch
