#include "coilsketch/io/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/io/export.hpp"
#include "coilsketch/io/npy.hpp"

namespace coilsketch {

std::string to_string(TrajectoryChoice t)
{
    switch (t) {
    case TrajectoryChoice::radial: return "radial";
    case TrajectoryChoice::cartesian: return "cartesian";
    case TrajectoryChoice::radial_stack: return "radial-stack";
    }
    return "radial";
}

TrajectoryChoice parse_trajectory_choice(const std::string& s)
{
    if (s == "radial") return TrajectoryChoice::radial;
    if (s == "cartesian") return TrajectoryChoice::cartesian;
    if (s == "radial-stack") return TrajectoryChoice::radial_stack;
    throw ParameterError("unknown trajectory '" + s + "'");
}

namespace {

// --- value codecs ----------------------------------------------------------

template <class T>
T parse_integer(const std::string& s)
{
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("expected an integer, got '" + s + "'");
    }
    return v;
}

double parse_real(const std::string& s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("expected a number, got '" + s + "'");
    }
    return v;
}

bool parse_bool(const std::string& s)
{
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(' ');
        const auto e = tok.find_last_not_of(' ');
        if (b == std::string::npos) {
            throw ConfigError("empty list element in '" + s + "'");
        }
        out.push_back(tok.substr(b, e - b + 1));
    }
    if (out.empty()) {
        throw ConfigError("empty list");
    }
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += f(v[i]) + (i + 1 < v.size() ? "," : "");
    }
    return s;
}

// Wraps enum parse functions that throw ParameterError.
template <class F>
auto parse_enum(F&& f, const std::string& s)
{
    try {
        return f(s);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

// --- schema ------------------------------------------------------------------

struct Field {
    std::string section;
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define CS_FIELD(SEC, KEY, EXPR, PARSE, FORMAT)                                        \
    Field                                                                              \
    {                                                                                  \
        SEC, KEY, [](RunConfig& c, const std::string& s) { c.EXPR = PARSE(s); },       \
            [](const RunConfig& c) { return FORMAT(c.EXPR); }                          \
    }

std::string fmt_int(long long v) { return std::to_string(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }
std::string fmt_real(double v) { return format_number(v); }
Index parse_index(const std::string& s) { return parse_integer<Index>(s); }
int parse_int(const std::string& s) { return parse_integer<int>(s); }
std::uint64_t parse_u64(const std::string& s) { return parse_integer<std::uint64_t>(s); }
std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

std::vector<Index> parse_index_list(const std::string& s)
{
    std::vector<Index> v;
    for (const auto& t : split_list(s)) {
        v.push_back(parse_index(t));
    }
    return v;
}
std::string fmt_index_list(const std::vector<Index>& v)
{
    return join(v, [](Index i) { return std::to_string(i); });
}

PhantomKind parse_phantom(const std::string& s) { return parse_enum(parse_phantom_kind, s); }
TrajectoryChoice parse_traj(const std::string& s) { return parse_enum(parse_trajectory_choice, s); }
MaskKind parse_mask(const std::string& s) { return parse_enum(parse_mask_kind, s); }
Method parse_meth(const std::string& s) { return parse_enum(parse_method, s); }
RegKind parse_reg(const std::string& s) { return parse_enum(parse_reg_kind, s); }
SolverKind parse_solver(const std::string& s) { return parse_enum(parse_solver_kind, s); }
SketchDistribution parse_dist(const std::string& s) { return parse_enum(parse_distribution, s); }

template <class E>
std::string fmt_enum(E e)
{
    return to_string(e);
}

std::vector<SketchDistribution> parse_dist_list(const std::string& s)
{
    std::vector<SketchDistribution> v;
    for (const auto& t : split_list(s)) {
        v.push_back(parse_dist(t));
    }
    return v;
}
std::string fmt_dist_list(const std::vector<SketchDistribution>& v)
{
    return join(v, [](SketchDistribution d) { return to_string(d); });
}

std::vector<Method> parse_method_list(const std::string& s)
{
    std::vector<Method> v;
    for (const auto& t : split_list(s)) {
        v.push_back(parse_meth(t));
    }
    return v;
}
std::string fmt_method_list(const std::vector<Method>& v)
{
    return join(v, [](Method m) { return to_string(m); });
}

const std::vector<Field>& schema()
{
    static const std::vector<Field> fields = {
        CS_FIELD("run", "seed", seed, parse_u64, fmt_u64),

        CS_FIELD("phantom", "kind", phantom.kind, parse_phantom, fmt_enum),
        CS_FIELD("phantom", "shape", phantom.shape, parse_index_list, fmt_index_list),
        CS_FIELD("phantom", "contrast", phantom.contrast, parse_real, fmt_real),

        CS_FIELD("coils", "count", coils.count, parse_index, fmt_int),
        CS_FIELD("coils", "ring", coils.ring, parse_real, fmt_real),
        CS_FIELD("coils", "width", coils.width, parse_real, fmt_real),
        CS_FIELD("coils", "object_support", coils.object_support, parse_bool, fmt_bool),

        CS_FIELD("acquisition", "trajectory", acquisition.trajectory, parse_traj, fmt_enum),
        CS_FIELD("acquisition", "spokes", acquisition.spokes, parse_index, fmt_int),
        CS_FIELD("acquisition", "readout", acquisition.readout, parse_index, fmt_int),
        CS_FIELD("acquisition", "golden", acquisition.golden, parse_bool, fmt_bool),
        CS_FIELD("acquisition", "accel", acquisition.accel, parse_real, fmt_real),
        CS_FIELD("acquisition", "mask", acquisition.mask, parse_mask, fmt_enum),
        CS_FIELD("acquisition", "acs", acquisition.acs, parse_index, fmt_int),
        CS_FIELD("acquisition", "snr_db", acquisition.snr_db, parse_real, fmt_real),
        CS_FIELD("acquisition", "noise_sigma", acquisition.noise_sigma, parse_real, fmt_real),
        CS_FIELD("acquisition", "gridding", acquisition.gridding, parse_bool, fmt_bool),

        CS_FIELD("recon", "method", recon.method, parse_meth, fmt_enum),
        CS_FIELD("recon", "regularizer", recon.regularizer, parse_reg, fmt_enum),
        CS_FIELD("recon", "lambda", recon.lambda, parse_real, fmt_real),
        CS_FIELD("recon", "lambda_compressed", recon.lambda_compressed, parse_real, fmt_real),
        CS_FIELD("recon", "solver", recon.solver, parse_solver, fmt_enum),
        CS_FIELD("recon", "iters", recon.iters, parse_int, fmt_int),
        CS_FIELD("recon", "tol", recon.tol, parse_real, fmt_real),
        CS_FIELD("recon", "step_scale", recon.step_scale, parse_real, fmt_real),
        CS_FIELD("recon", "inner_cg_iters", recon.inner_cg_iters, parse_int, fmt_int),
        CS_FIELD("recon", "prox_iters", recon.prox_iters, parse_int, fmt_int),
        CS_FIELD("recon", "power_iters", recon.power_iters, parse_int, fmt_int),
        CS_FIELD("recon", "pdhg_ratio", recon.pdhg_ratio, parse_real, fmt_real),
        CS_FIELD("recon", "c_hat", recon.c_hat, parse_index, fmt_int),
        CS_FIELD("recon", "reference_iters", recon.reference_iters, parse_int, fmt_int),

        CS_FIELD("sketch", "c_hat0", sketch.c_hat0, parse_index, fmt_int),
        CS_FIELD("sketch", "c_hat0_energy", sketch.c_hat0_energy, parse_real, fmt_real),
        CS_FIELD("sketch", "c_hat", sketch.c_hat, parse_index, fmt_int),
        CS_FIELD("sketch", "v", sketch.v, parse_index, fmt_int),
        CS_FIELD("sketch", "s", sketch.s, parse_index, fmt_int),
        CS_FIELD("sketch", "distribution", sketch.distribution, parse_dist, fmt_enum),
        CS_FIELD("sketch", "outer", sketch.outer, parse_int, fmt_int),
        CS_FIELD("sketch", "inner", sketch.inner, parse_int, fmt_int),
        CS_FIELD("sketch", "init", sketch.init, parse_bool, fmt_bool),
        CS_FIELD("sketch", "init_iters", sketch.init_iters, parse_int, fmt_int),
        CS_FIELD("sketch", "reuse_step_size", sketch.reuse_step_size, parse_bool, fmt_bool),
        CS_FIELD("sketch", "divergence_factor", sketch.divergence_factor, parse_real, fmt_real),

        CS_FIELD("sgd", "alpha0", sgd.alpha0, parse_real, fmt_real),
        CS_FIELD("sgd", "beta", sgd.beta, parse_real, fmt_real),
        CS_FIELD("sgd", "beta_min", sgd.beta_min, parse_real, fmt_real),
        CS_FIELD("sgd", "iters", sgd.iters, parse_int, fmt_int),
        CS_FIELD("sgd", "seeds", sgd.seeds, parse_int, fmt_int),

        CS_FIELD("ablate", "v_values", ablate.v_values, parse_index_list, fmt_index_list),
        CS_FIELD("ablate", "distributions", ablate.distributions, parse_dist_list, fmt_dist_list),
        CS_FIELD("ablate", "seeds", ablate.seeds, parse_int, fmt_int),

        CS_FIELD("gfactor", "trials", gfactor.trials, parse_int, fmt_int),
        CS_FIELD("gfactor", "noise_sigma", gfactor.noise_sigma, parse_real, fmt_real),
        CS_FIELD("gfactor", "lambda", gfactor.lambda, parse_real, fmt_real),
        CS_FIELD("gfactor", "cg_iters", gfactor.cg_iters, parse_int, fmt_int),
        CS_FIELD("gfactor", "c_hat", gfactor.c_hat, parse_index, fmt_int),
        CS_FIELD("gfactor", "v_values", gfactor.v_values, parse_index_list, fmt_index_list),

        CS_FIELD("bench", "methods", bench.methods, parse_method_list, fmt_method_list),
        CS_FIELD("bench", "difference_images", bench.difference_images, parse_int, fmt_int),
    };
    return fields;
}

#undef CS_FIELD

}  // namespace

void RunConfig::validate() const
{
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    const bool three_d = phantom.kind == PhantomKind::ellipsoids_3d;
    if (phantom.shape.size() != (three_d ? 3u : 2u)) {
        fail("phantom.shape must have " + std::to_string(three_d ? 3 : 2) + " entries");
    }
    for (Index d : phantom.shape) {
        if (d < 8) fail("phantom.shape entries must be at least 8");
    }
    if (!(phantom.contrast > 0.0)) fail("phantom.contrast must be positive");
    if (coils.count < 1) fail("coils.count must be positive");
    if (!(coils.width > 0.0) || coils.ring < 0.0) fail("coils.width/ring out of range");
    if (acquisition.spokes < 1 || acquisition.readout < 0) fail("acquisition.spokes/readout out of range");
    if (!(acquisition.accel >= 1.0)) fail("acquisition.accel must be >= 1");
    if (acquisition.trajectory == TrajectoryChoice::radial_stack && !three_d) {
        fail("radial-stack needs a 3D phantom");
    }
    if (acquisition.trajectory == TrajectoryChoice::radial && three_d) {
        fail("radial needs a 2D phantom; use radial-stack");
    }
    if (recon.lambda < 0.0 || recon.lambda_compressed < 0.0) fail("recon.lambda must be >= 0");
    if (recon.iters < 1 || recon.reference_iters < 1) fail("recon.iters must be positive");
    if (recon.c_hat < 1 || recon.c_hat > coils.count) fail("recon.c_hat must lie in [1, coils.count]");
    if (sketch.c_hat != sketch.v + sketch.s) fail("sketch.c_hat must equal sketch.v + sketch.s");
    if (sketch.c_hat0 < 0 || sketch.c_hat0 > coils.count) fail("sketch.c_hat0 out of range");
    if (!(sketch.c_hat0_energy > 0.0 && sketch.c_hat0_energy <= 1.0)) {
        fail("sketch.c_hat0_energy must lie in (0, 1]");
    }
    if (sketch.outer < 1 || sketch.inner < 1 || sketch.init_iters < 1) {
        fail("sketch iteration counts must be positive");
    }
    if (sgd.seeds < 1) fail("sgd.seeds must be positive");
    if (ablate.seeds < 1) fail("ablate.seeds must be positive");
    if (gfactor.trials < 2) fail("gfactor.trials must be at least 2");
    if (gfactor.c_hat < 1 || gfactor.c_hat > coils.count) fail("gfactor.c_hat out of range");
    for (Index v : gfactor.v_values) {
        if (v < 0 || v > gfactor.c_hat) fail("gfactor.v_values must lie in [0, gfactor.c_hat]");
    }
    for (Index v : ablate.v_values) {
        if (v < 0 || v > sketch.c_hat) fail("ablate.v_values must lie in [0, sketch.c_hat]");
    }
    if (bench.methods.empty()) fail("bench.methods is empty");
}

RunConfig parse_config(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    std::map<std::string, std::map<std::string, const Field*>> index;
    for (const Field& f : schema()) {
        index[f.section][f.key] = &f;
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        const auto sec = index.find(section);
        if (sec == index.end()) {
            throw ConfigError(body.empty() ? "top-level key '" + section + "' outside a section"
                                           : "unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            const auto f = sec->second.find(key);
            if (f == sec->second.end()) {
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            }
            try {
                f->second->set(cfg, node.get_value<std::string>());
            } catch (const ConfigError& e) {
                throw ConfigError(section + "." + key + ": " + e.what());
            }
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg)
{
    std::string out;
    std::string current;
    for (const Field& f : schema()) {
        if (f.section != current) {
            out += (current.empty() ? "[" : "\n[") + f.section + "]\n";
            current = f.section;
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

void apply_seed_env(RunConfig& cfg)
{
    const char* env = std::getenv("SKETCHRECON_SEED");
    if (env == nullptr) {
        return;
    }
    try {
        cfg.seed = parse_integer<std::uint64_t>(env);
    } catch (const ConfigError&) {
        throw ConfigError(std::string("SKETCHRECON_SEED is not an unsigned integer: '") + env + "'");
    }
}

std::uint64_t derived_seed(const RunConfig& cfg, SeedUse use)
{
    return seed_stream(cfg.seed, static_cast<std::uint64_t>(use));
}

MethodSettings method_settings(const RunConfig& cfg)
{
    MethodSettings s;
    s.reg_kind = cfg.recon.regularizer;
    s.lambda = cfg.recon.lambda;
    s.lambda_compressed = cfg.recon.lambda_compressed;
    s.solver = cfg.recon.solver;
    s.solver_cfg.max_iters = cfg.recon.iters;
    s.solver_cfg.tol = cfg.recon.tol;
    s.solver_cfg.step_scale = cfg.recon.step_scale;
    s.solver_cfg.inner_cg_iters = cfg.recon.inner_cg_iters;
    s.solver_cfg.prox_iters = cfg.recon.prox_iters;
    s.solver_cfg.power_iters = cfg.recon.power_iters;
    s.solver_cfg.pdhg_sigma_tau_ratio = cfg.recon.pdhg_ratio;
    s.solver_cfg.seed = derived_seed(cfg, SeedUse::sgd);
    s.c_hat = cfg.recon.c_hat;

    CoilSketchConfig& k = s.sketch;
    k.c_hat0 = cfg.sketch.c_hat0;
    k.c_hat0_energy = cfg.sketch.c_hat0_energy;
    k.sketch = {cfg.sketch.c_hat, cfg.sketch.v, cfg.sketch.s, cfg.sketch.distribution,
                derived_seed(cfg, SeedUse::sketch)};
    k.outer_iters = cfg.sketch.outer;
    k.inner_iters = cfg.sketch.inner;
    k.use_init = cfg.sketch.init;
    k.init_iters = cfg.sketch.init_iters;
    k.reuse_step_size = cfg.sketch.reuse_step_size;
    k.divergence_factor = cfg.sketch.divergence_factor;

    s.sgd = {cfg.sgd.alpha0, cfg.sgd.beta, cfg.sgd.beta_min};
    s.sgd_iters = cfg.sgd.iters;
    s.sgd_seeds = cfg.sgd.seeds;
    return s;
}

}  // namespace coilsketch
