#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coilsketch/io/config.hpp"
#include "coilsketch/metrics/metrics.hpp"

namespace coilsketch {

/// Exit codes shared by all commands.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitDiverged = 4 };

/// Everything a command needs about one simulated acquisition.
struct Testbed {
    Image phantom;
    Mask support;
    SensitivityMaps maps;
    Trajectory traj;
    std::optional<DensityWeights> weights;
    double noise_sigma = 0.0;
    double accel = 1.0;
    KSpaceData data;
    SenseOperator op;  ///< full-coil encoding operator
};

/// Trajectory selected by the acquisition section.
Trajectory make_trajectory(const RunConfig& cfg, const GridShape& shape, double accel);

/// Deterministic phantom, maps, trajectory and noisy k-space from `cfg`.
Testbed build_testbed(const RunConfig& cfg);

/// One row of the benchmark table.
struct BenchRecord {
    std::string method;
    double seconds = 0.0;
    long long coil_transforms = 0;
    long long sparse_transforms = 0;
    long long estimate_transforms = 0;  ///< step-size power iterations
    double nrmse = 0.0;
    double ssim = 0.0;
    double hfen = 0.0;
    double distance = 0.0;               ///< final d(x) to x^∞, NaN without one
    long long converged_transforms = -1;  ///< coil transforms at d < 0.05, -1 if never
    double converged_seconds = -1.0;
    bool diverged = false;

    static std::vector<std::string> header();
};

BenchRecord bench_record(const MethodResult& r, const Image& phantom,
                         const std::optional<Vec>& reference);

/// FNV-1a 64-bit hash of the raw bytes of a vector, as 16 hex digits.
std::string content_hash(const Vec& v);

// Commands write into `out` and report progress on `log`. They throw
// ConfigError, ParameterError, IoError or ShapeError; main maps those to exit codes.

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_recon(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

struct AblateRow {
    Index v = 0;
    Index s = 0;
    SketchDistribution distribution = SketchDistribution::rademacher;
    int seed = 0;
    double objective = 0.0;
    double normalized_objective = 0.0;
    double nrmse = 0.0;
    double ssim = 0.0;
    double hfen = 0.0;
    bool diverged = false;
};

/// All (V, distribution, seed) cells plus the baseline objective used to normalize.
struct AblateResult {
    double baseline_objective = 0.0;
    std::vector<AblateRow> rows;
};

AblateResult run_ablation(const RunConfig& cfg, const Testbed& tb);
int cmd_ablate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

struct GFactorVariant {
    std::string name;   ///< baseline, compression, sketch-v<V>
    Method method = Method::baseline;
    Index c_hat = 0;
    Index v = 0;
    GFactorMap map;
};

std::vector<GFactorVariant> run_gfactor(const RunConfig& cfg, std::ostream& log);
int cmd_gfactor(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

struct BenchResult {
    Vec reference;
    std::string reference_hash;
    std::vector<MethodResult> runs;
    std::vector<BenchRecord> records;
};

BenchResult run_bench(const RunConfig& cfg, const Testbed& tb, std::ostream& log);
int cmd_bench(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Dispatches by command name; returns an ExitCode and never throws.
int run_command(const std::string& name, const std::filesystem::path& config,
                const std::filesystem::path& out, std::optional<std::uint64_t> seed,
                std::optional<std::string> method, std::ostream& log, std::ostream& err);

}  // namespace coilsketch
