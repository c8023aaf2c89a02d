#include "coilsketch/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/io/export.hpp"
#include "coilsketch/io/npy.hpp"

namespace coilsketch {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> history_header()
{
    return {"iteration", "coil_transforms", "sparse_transforms", "seconds", "distance"};
}

void write_history(const fs::path& path, const MethodResult& r)
{
    CsvWriter csv(path, history_header());
    for (const TracePoint& p : r.trace) {
        csv.cell(p.iteration)
            .cell(static_cast<long long>(p.cost.coil_transforms))
            .cell(static_cast<long long>(p.cost.sparse_transforms))
            .cell(p.seconds)
            .cell(p.distance);
        csv.end_row();
    }
}

void write_record(CsvWriter& csv, const BenchRecord& b)
{
    csv.cell(b.method)
        .cell(b.seconds)
        .cell(b.coil_transforms)
        .cell(b.sparse_transforms)
        .cell(b.estimate_transforms)
        .cell(b.nrmse)
        .cell(b.ssim)
        .cell(b.hfen)
        .cell(b.distance)
        .cell(b.converged_transforms)
        .cell(b.converged_seconds)
        .cell(b.diverged);
    csv.end_row();
}

void write_image(const fs::path& stem, const Image& img)
{
    write_npy(fs::path(stem).replace_extension(".npy"),
              NpyArray::complex_array(img.values, img.shape.dims()));
    write_pgm16(fs::path(stem).replace_extension(".pgm"), img);
}

// Evenly spaced iterations 1..n, `count` of them, ending at n.
std::vector<int> checkpoints(int n, int count)
{
    std::vector<int> out;
    for (int j = 1; j <= count && n > 0; ++j) {
        const int k = std::max(1, static_cast<int>(std::lround(static_cast<double>(n) * j / count)));
        if (out.empty() || out.back() != k) {
            out.push_back(k);
        }
    }
    return out;
}

int iteration_count(Method m, const MethodSettings& s)
{
    if (m == Method::coil_sketching) {
        return s.sketch.outer_iters;
    }
    if (m == Method::accproxsgd && s.sgd_iters > 0) {
        return s.sgd_iters;
    }
    return s.solver_cfg.max_iters;
}

double variance(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) {
            return std::numeric_limits<double>::infinity();
        }
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return ss / static_cast<double>(v.size() - 1);
}

SketchConfig sketch_with_v(Index c_hat, Index v, SketchDistribution dist, std::uint64_t seed)
{
    return {c_hat, v, c_hat - v, dist, seed};
}

}  // namespace

std::vector<std::string> BenchRecord::header()
{
    return {"method",       "seconds",           "coil_transforms",
            "sparse_transforms", "estimate_transforms", "nrmse",
            "ssim",         "hfen",              "distance",
            "converged_coil_transforms", "converged_seconds", "diverged"};
}

BenchRecord bench_record(const MethodResult& r, const Image& phantom,
                         const std::optional<Vec>& reference)
{
    BenchRecord b;
    b.method = to_string(r.method);
    b.seconds = r.seconds;
    b.coil_transforms = r.cost.coil_transforms;
    b.sparse_transforms = r.cost.sparse_transforms;
    b.estimate_transforms = r.estimate_cost.coil_transforms;
    const MetricReport m = compare(Image(phantom.shape, r.x), phantom);
    b.nrmse = m.nrmse;
    b.ssim = m.ssim;
    b.hfen = m.hfen;
    b.distance = reference ? convergence_distance(r.x, *reference) : kNaN;
    if (r.converged) {
        b.converged_transforms = r.converged->cost.coil_transforms;
        b.converged_seconds = r.converged->seconds;
    }
    b.diverged = r.diverged;
    return b;
}

std::string content_hash(const Vec& v)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    const std::size_t n = static_cast<std::size_t>(v.size()) * sizeof(cplx);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Trajectory make_trajectory(const RunConfig& cfg, const GridShape& shape, double accel)
{
    const AcquisitionSection& a = cfg.acquisition;
    const Index readout = a.readout > 0 ? a.readout : 2 * shape[0];
    switch (a.trajectory) {
    case TrajectoryChoice::radial: return radial_traj(shape, a.spokes, readout, a.golden);
    case TrajectoryChoice::radial_stack:
        return radial_stack_traj(shape, a.spokes, readout, a.golden);
    case TrajectoryChoice::cartesian:
        return cartesian_mask(shape, accel, a.mask, a.acs, derived_seed(cfg, SeedUse::mask));
    }
    throw ConfigError("acquisition.trajectory: unsupported");
}

namespace {

std::optional<DensityWeights> weights_for(const RunConfig& cfg, const Trajectory& traj)
{
    switch (cfg.acquisition.trajectory) {
    case TrajectoryChoice::cartesian: return std::nullopt;
    case TrajectoryChoice::radial: return radial_density_weights(traj);
    case TrajectoryChoice::radial_stack: {
        // In-plane ramp; every kz partition is a full radial plane.
        Trajectory plane = traj;
        plane.points = traj.points.leftCols(2);
        return radial_density_weights(plane);
    }
    }
    return std::nullopt;
}

NufftBackend backend_for(const RunConfig& cfg)
{
    return cfg.acquisition.gridding ? NufftBackend::gridding : NufftBackend::direct;
}

}  // namespace

Testbed build_testbed(const RunConfig& cfg)
{
    cfg.validate();
    const GridShape shape(cfg.phantom.shape);
    Image phantom = make_phantom({cfg.phantom.kind, shape, cfg.phantom.contrast});
    Mask support = support_mask(phantom);
    SensitivityMaps maps =
        make_coil_maps(cfg.coils.count, shape, derived_seed(cfg, SeedUse::coils),
                       cfg.coils.object_support ? support : Mask(),
                       {cfg.coils.ring, cfg.coils.width});
    Trajectory traj = make_trajectory(cfg, shape, cfg.acquisition.accel);
    std::optional<DensityWeights> weights = weights_for(cfg, traj);
    const double accel = realized_acceleration(shape, traj);
    const double sigma = cfg.acquisition.noise_sigma >= 0.0
                             ? cfg.acquisition.noise_sigma
                             : noise_for_snr(phantom, support, cfg.acquisition.snr_db);
    SenseOperator op = build_sense(maps, traj, weights, backend_for(cfg));
    KSpaceData data =
        acquire(phantom, op, {traj, sigma, derived_seed(cfg, SeedUse::noise), accel});
    return Testbed{std::move(phantom), std::move(support), std::move(maps), std::move(traj),
                   std::move(weights), sigma, accel, std::move(data), std::move(op)};
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log)
{
    const Testbed tb = build_testbed(cfg);
    fs::create_directories(out);
    const std::vector<Index>& dims = tb.phantom.shape.dims();
    write_npy(out / "phantom.npy", NpyArray::complex_array(tb.phantom.values, dims));
    write_npy(out / "maps.npy", NpyArray::coil_stack(tb.maps.coils, tb.maps.shape));
    write_npy(out / "trajectory.npy", NpyArray::real_matrix(tb.traj.points));
    const RVec w = tb.weights ? RVec(tb.weights->w.col(0)) : RVec::Ones(tb.traj.samples());
    write_npy(out / "weights.npy", NpyArray::real_array(w, {w.size()}));
    write_npy(out / "kspace.npy",
              NpyArray::complex_array(Eigen::Map<const Vec>(tb.data.coils.data(),
                                                            tb.data.coils.size()),
                                      {tb.data.count(), tb.data.samples()}));

    // SNR of the noisy data relative to the noise floor, per sample.
    const double signal = tb.op.without_weights().forward(tb.phantom.values).norm();
    const double noise = tb.noise_sigma * std::sqrt(static_cast<double>(tb.data.coils.size()));
    const double snr = noise > 0.0 ? 20.0 * std::log10(signal / noise)
                                   : std::numeric_limits<double>::infinity();
    if (cfg.acquisition.trajectory == TrajectoryChoice::cartesian) {
        log << "realized R = " << format_number(tb.accel) << "\n";
    } else {
        // Radial: Nyquist needs π/2·n spokes for an n-wide grid.
        const double nyquist = std::acos(-1.0) / 2.0 * static_cast<double>(tb.phantom.shape[0]);
        log << "realized R = " << format_number(nyquist / static_cast<double>(cfg.acquisition.spokes))
            << " (Nyquist spokes over acquired spokes)\n";
    }
    log << "k-space SNR = " << format_number(snr) << " dB (noise sigma "
        << format_number(tb.noise_sigma) << ")\n";
    return kExitOk;
}

namespace {

// Operator and data rebuilt from the files written by cmd_simulate.
struct LoadedAcquisition {
    Image phantom;
    SenseOperator op;
    KSpaceData data;
};

LoadedAcquisition load_acquisition(const RunConfig& cfg, const fs::path& dir)
{
    const NpyArray ph = read_npy(dir / "phantom.npy");
    const GridShape shape(ph.shape);
    Image phantom(shape, ph.to_complex());
    SensitivityMaps maps{shape, coil_columns(read_npy(dir / "maps.npy"), shape.size())};
    Trajectory traj;
    traj.points = read_npy(dir / "trajectory.npy").to_real_matrix();
    traj.kind = cfg.acquisition.trajectory == TrajectoryChoice::cartesian
                    ? TrajectoryKind::cartesian_mask
                    : TrajectoryKind::non_cartesian;
    std::optional<DensityWeights> weights;
    if (traj.kind == TrajectoryKind::non_cartesian) {
        weights = DensityWeights(read_npy(dir / "weights.npy").to_real());
    }
    const NpyArray ks = read_npy(dir / "kspace.npy");
    if (ks.shape.size() != 2 || ks.shape[0] != maps.count() || ks.shape[1] != traj.samples()) {
        throw IoError("kspace.npy does not match the maps and trajectory");
    }
    KSpaceData data{traj, Eigen::Map<const CMat>(ks.to_complex().data(), ks.shape[1], ks.shape[0]),
                    false};
    SenseOperator op = build_sense(maps, traj, weights, backend_for(cfg));
    return {std::move(phantom), std::move(op), std::move(data)};
}

}  // namespace

int cmd_recon(const RunConfig& cfg, const fs::path& out, std::ostream& log)
{
    cfg.validate();
    const LoadedAcquisition acq = load_acquisition(cfg, out);
    MethodSettings ms = method_settings(cfg);
    const fs::path ref_path = out / "reference.npy";
    if (fs::exists(ref_path)) {
        ms.reference = read_npy(ref_path).to_complex();
    }
    const Method method = cfg.recon.method;
    if (method == Method::coil_sketching) {
        for (int t = 1; t <= ms.sketch.outer_iters; ++t) {
            ms.snapshot_at.push_back(t);
        }
    }
    const MethodResult r = run_method(method, acq.op, acq.data, ms);
    const std::string name = to_string(method);
    write_image(out / ("recon_" + name), Image(acq.phantom.shape, r.x));
    write_history(out / ("history_" + name + ".csv"), r);
    {
        CsvWriter csv(out / ("record_" + name + ".csv"), BenchRecord::header());
        write_record(csv, bench_record(r, acq.phantom, ms.reference));
    }
    for (const Snapshot& s : r.snapshots) {
        write_npy(out / ("snapshot_" + name + "_t" + std::to_string(s.iteration) + ".npy"),
                  NpyArray::complex_array(s.x, acq.phantom.shape.dims()));
    }
    const BenchRecord b = bench_record(r, acq.phantom, ms.reference);
    log << name << ": " << r.iterations << " iterations, " << b.coil_transforms
        << " coil transforms, NRMSE " << format_number(b.nrmse) << "\n";
    if (r.diverged) {
        log << name << ": diverged (objective exceeded " << format_number(cfg.sketch.divergence_factor)
            << "x its initial value)\n";
        return kExitDiverged;
    }
    return kExitOk;
}

AblateResult run_ablation(const RunConfig& cfg, const Testbed& tb)
{
    const MethodSettings base = method_settings(cfg);
    AblateResult res;
    res.baseline_objective = run_method(Method::baseline, tb.op, tb.data, base).objective;
    const std::uint64_t root = derived_seed(cfg, SeedUse::sketch);
    for (Index v : cfg.ablate.v_values) {
        for (SketchDistribution dist : cfg.ablate.distributions) {
            for (int k = 0; k < cfg.ablate.seeds; ++k) {
                MethodSettings ms = base;
                ms.sketch.sketch = sketch_with_v(cfg.sketch.c_hat, v, dist,
                                                 seed_stream(root, static_cast<std::uint64_t>(k)));
                const MethodResult r = run_method(Method::coil_sketching, tb.op, tb.data, ms);
                const MetricReport m = compare(Image(tb.phantom.shape, r.x), tb.phantom);
                res.rows.push_back({v, cfg.sketch.c_hat - v, dist, k, r.objective,
                                    r.objective / res.baseline_objective, m.nrmse, m.ssim, m.hfen,
                                    r.diverged});
            }
        }
    }
    return res;
}

int cmd_ablate(const RunConfig& cfg, const fs::path& out, std::ostream& log)
{
    const Testbed tb = build_testbed(cfg);
    fs::create_directories(out);
    const AblateResult res = run_ablation(cfg, tb);
    {
        CsvWriter csv(out / "ablation.csv",
                      {"v", "s", "distribution", "seed", "objective", "normalized_objective",
                       "nrmse", "ssim", "hfen", "diverged"});
        for (const AblateRow& r : res.rows) {
            csv.cell(static_cast<long long>(r.v))
                .cell(static_cast<long long>(r.s))
                .cell(to_string(r.distribution))
                .cell(r.seed)
                .cell(r.objective)
                .cell(r.normalized_objective)
                .cell(r.nrmse)
                .cell(r.ssim)
                .cell(r.hfen)
                .cell(r.diverged);
            csv.end_row();
        }
    }
    // Summary per (V, distribution); diverged runs count at their stopping objective.
    std::map<std::pair<Index, std::string>, std::vector<const AblateRow*>> groups;
    for (const AblateRow& r : res.rows) {
        groups[{r.v, to_string(r.distribution)}].push_back(&r);
    }
    CsvWriter csv(out / "ablation_summary.csv",
                  {"v", "s", "distribution", "runs", "diverged_runs", "mean_normalized_objective",
                   "variance_normalized_objective", "baseline_objective"});
    for (const auto& [key, rows] : groups) {
        std::vector<double> f;
        long long diverged = 0;
        for (const AblateRow* r : rows) {
            f.push_back(r->normalized_objective);
            diverged += r->diverged ? 1 : 0;
        }
        double mean = 0.0;
        for (double x : f) {
            mean += x;
        }
        mean /= static_cast<double>(f.size());
        csv.cell(static_cast<long long>(key.first))
            .cell(static_cast<long long>(cfg.sketch.c_hat - key.first))
            .cell(key.second)
            .cell(static_cast<long long>(f.size()))
            .cell(diverged)
            .cell(mean)
            .cell(variance(f))
            .cell(res.baseline_objective);
        csv.end_row();
        log << "V=" << key.first << " " << key.second << ": variance "
            << format_number(variance(f)) << ", " << diverged << "/" << f.size()
            << " diverged\n";
    }
    return kExitOk;
}

std::vector<GFactorVariant> run_gfactor(const RunConfig& cfg, std::ostream& log)
{
    if (cfg.acquisition.trajectory != TrajectoryChoice::cartesian) {
        throw ConfigError("gfactor: acquisition.trajectory must be cartesian");
    }
    const Testbed tb = build_testbed(cfg);
    const GridShape& shape = tb.phantom.shape;
    const Trajectory full = cartesian_mask(shape, 1.0, MaskKind::regular, 0, 0);
    const SenseOperator a_full = build_sense(tb.maps, full, std::nullopt, backend_for(cfg));
    const double sigma = cfg.gfactor.noise_sigma > 0.0 ? cfg.gfactor.noise_sigma : tb.noise_sigma;
    const std::uint64_t seed = derived_seed(cfg, SeedUse::gfactor);

    MethodSettings ms = method_settings(cfg);
    ms.reg_kind = RegKind::l2;
    ms.solver = SolverKind::cg;
    ms.lambda = cfg.gfactor.lambda;
    ms.lambda_compressed = cfg.gfactor.lambda;
    ms.solver_cfg.max_iters = cfg.gfactor.cg_iters;
    ms.solver_cfg.tol = 0.0;
    ms.c_hat = cfg.gfactor.c_hat;

    auto recon = [](Method m, const SenseOperator& op, const MethodSettings& s) {
        return ReconFn([m, op, s](const KSpaceData& d) { return run_method(m, op, d, s).x; });
    };
    const ReconFn full_recon = recon(Method::baseline, a_full, ms);
    auto evaluate = [&](GFactorVariant v, const MethodSettings& s) {
        v.map = gfactor_montecarlo(recon(v.method, tb.op, s), full_recon, a_full, full, tb.op,
                                   tb.traj, tb.phantom, sigma, cfg.gfactor.trials, tb.accel, seed,
                                   tb.support);
        log << v.name << ": mean inverse g " << format_number(v.map.mean()) << "\n";
        return v;
    };

    std::vector<GFactorVariant> out;
    out.push_back(evaluate({"baseline", Method::baseline, cfg.coils.count, 0, {}}, ms));
    out.push_back(
        evaluate({"compression", Method::coil_compression, cfg.gfactor.c_hat, 0, {}}, ms));
    for (Index v : cfg.gfactor.v_values) {
        MethodSettings s = ms;
        s.sketch.sketch = sketch_with_v(cfg.gfactor.c_hat, v, cfg.sketch.distribution,
                                        derived_seed(cfg, SeedUse::sketch));
        out.push_back(evaluate(
            {"sketch-v" + std::to_string(v), Method::coil_sketching, cfg.gfactor.c_hat, v, {}}, s));
    }
    return out;
}

int cmd_gfactor(const RunConfig& cfg, const fs::path& out, std::ostream& log)
{
    fs::create_directories(out);
    const std::vector<GFactorVariant> variants = run_gfactor(cfg, log);
    const GridShape shape(cfg.phantom.shape);
    CsvWriter csv(out / "gfactor_summary.csv",
                  {"variant", "method", "c_hat", "v", "s", "trials", "accel", "mean_inverse_g"});
    for (const GFactorVariant& v : variants) {
        const bool sketch = v.method == Method::coil_sketching;
        write_npy(out / ("inverse_g_" + v.name + ".npy"),
                  NpyArray::real_array(v.map.inverse_g, shape.dims()));
        write_pgm16(out / ("inverse_g_" + v.name + ".pgm"),
                    Image(shape, v.map.inverse_g.cast<cplx>()));
        csv.cell(v.name)
            .cell(to_string(v.method))
            .cell(static_cast<long long>(v.c_hat))
            .cell(static_cast<long long>(sketch ? v.v : v.c_hat))
            .cell(static_cast<long long>(sketch ? v.c_hat - v.v : 0))
            .cell(v.map.trials)
            .cell(v.map.accel)
            .cell(v.map.mean());
        csv.end_row();
    }
    return kExitOk;
}

BenchResult run_bench(const RunConfig& cfg, const Testbed& tb, std::ostream& log)
{
    BenchResult res;
    MethodSettings ms = method_settings(cfg);
    res.reference = reference_solution(tb.op, tb.data, ms, cfg.recon.reference_iters);
    res.reference_hash = content_hash(res.reference);
    ms.reference = res.reference;

    // Sketching runs first so SGD can be held to its coil-transform budget.
    std::vector<Method> order = cfg.bench.methods;
    std::stable_partition(order.begin(), order.end(),
                          [](Method m) { return m == Method::coil_sketching; });
    std::optional<std::int64_t> sketch_budget;
    std::map<Method, MethodResult> done;
    for (Method m : order) {
        MethodSettings s = ms;
        if (m == Method::accproxsgd && cfg.sgd.iters == 0 && sketch_budget) {
            s.sgd_iters = static_cast<int>(
                std::max<std::int64_t>(1, *sketch_budget / (2 * cfg.recon.c_hat)));
        }
        s.snapshot_at = checkpoints(iteration_count(m, s), cfg.bench.difference_images);
        MethodResult r = run_method(m, tb.op, tb.data, s);
        if (m == Method::coil_sketching) {
            sketch_budget = r.cost.coil_transforms;
        }
        log << to_string(m) << ": " << r.cost.coil_transforms << " coil transforms, final d "
            << format_number(convergence_distance(r.x, res.reference)) << "\n";
        done.emplace(m, std::move(r));
    }
    for (Method m : cfg.bench.methods) {
        res.records.push_back(bench_record(done.at(m), tb.phantom, res.reference));
        res.runs.push_back(std::move(done.at(m)));
    }
    return res;
}

int cmd_bench(const RunConfig& cfg, const fs::path& out, std::ostream& log)
{
    const Testbed tb = build_testbed(cfg);
    fs::create_directories(out);
    const BenchResult res = run_bench(cfg, tb, log);
    const GridShape& shape = tb.phantom.shape;
    write_npy(out / "reference.npy", NpyArray::complex_array(res.reference, shape.dims()));
    {
        CsvWriter csv(out / "reference.csv", {"iterations", "fnv1a64"});
        csv.cell(cfg.recon.reference_iters).cell(res.reference_hash);
        csv.end_row();
    }
    {
        CsvWriter csv(out / "bench.csv", BenchRecord::header());
        for (const BenchRecord& b : res.records) {
            write_record(csv, b);
        }
    }
    CsvWriter curves(out / "curves.csv", {"method", "iteration", "coil_transforms",
                                          "sparse_transforms", "seconds", "distance"});
    for (const MethodResult& r : res.runs) {
        const std::string name = to_string(r.method);
        for (const TracePoint& p : r.trace) {
            curves.cell(name)
                .cell(p.iteration)
                .cell(static_cast<long long>(p.cost.coil_transforms))
                .cell(static_cast<long long>(p.cost.sparse_transforms))
                .cell(p.seconds)
                .cell(p.distance);
            curves.end_row();
        }
        write_image(out / ("recon_" + name), Image(shape, r.x));
        for (const Snapshot& s : r.snapshots) {
            write_pgm16(out / ("difference_" + name + "_it" + std::to_string(s.iteration) + ".pgm"),
                        Image(shape, Vec(s.x - res.reference)));
        }
    }
    log << "reference " << res.reference_hash << "\n";
    return kExitOk;
}

int run_command(const std::string& name, const fs::path& config, const fs::path& out,
                std::optional<std::uint64_t> seed, std::optional<std::string> method,
                std::ostream& log, std::ostream& err)
{
    try {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        apply_seed_env(cfg);
        if (seed) {
            cfg.seed = *seed;
        }
        if (method) {
            try {
                cfg.recon.method = parse_method(*method);
            } catch (const ParameterError& e) {
                throw ConfigError(std::string("--method: ") + e.what());
            }
        }
        cfg.validate();
        if (name == "simulate") return cmd_simulate(cfg, out, log);
        if (name == "recon") return cmd_recon(cfg, out, log);
        if (name == "ablate") return cmd_ablate(cfg, out, log);
        if (name == "gfactor") return cmd_gfactor(cfg, out, log);
        if (name == "bench") return cmd_bench(cfg, out, log);
        err << "unknown command '" << name << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ShapeError& e) {
        err << "inconsistent input: " << e.what() << "\n";
        return kExitIo;
    } catch (const ParameterError& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace coilsketch
