#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "coilsketch/recon/methods.hpp"
#include "coilsketch/sim/simulate.hpp"

namespace coilsketch {

/// Raised for malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TrajectoryChoice { radial, cartesian, radial_stack };

std::string to_string(TrajectoryChoice t);
TrajectoryChoice parse_trajectory_choice(const std::string& s);

struct PhantomSection {
    PhantomKind kind = PhantomKind::shepp_logan_2d;
    std::vector<Index> shape{64, 64};
    double contrast = 1.0;
};

struct CoilSection {
    Index count = 8;
    double ring = 1.2;
    double width = 0.65;
    bool object_support = false;  ///< zero the maps outside the phantom support
};

struct AcquisitionSection {
    TrajectoryChoice trajectory = TrajectoryChoice::radial;
    Index spokes = 50;
    Index readout = 0;  ///< 0: twice the first grid dimension
    bool golden = true;
    double accel = 3.0;  ///< Cartesian masks only
    MaskKind mask = MaskKind::regular;
    Index acs = 0;
    double snr_db = 30.0;
    double noise_sigma = -1.0;  ///< >= 0 overrides snr_db
    bool gridding = true;       ///< false: direct NUDFT
};

struct ReconSection {
    Method method = Method::baseline;
    RegKind regularizer = RegKind::l1_wavelet;
    double lambda = 0.02;
    double lambda_compressed = 0.01;
    SolverKind solver = SolverKind::fista;
    int iters = 200;
    double tol = 0.0;
    double step_scale = 0.9;
    int inner_cg_iters = 8;
    int prox_iters = 20;
    int power_iters = 30;
    double pdhg_ratio = 1.0;
    Index c_hat = 4;  ///< compression size and SGD batch
    int reference_iters = 2000;
};

struct SketchSection {
    Index c_hat0 = 0;          ///< 0: use c_hat0_energy
    double c_hat0_energy = 1.0; ///< smallest Ĉ₀ keeping this energy fraction; 1 keeps all
    Index c_hat = 4;
    Index v = 3;
    Index s = 1;
    SketchDistribution distribution = SketchDistribution::rademacher;
    int outer = 10;
    int inner = 20;
    bool init = false;
    int init_iters = 20;
    bool reuse_step_size = true;
    double divergence_factor = 10.0;
};

struct SgdSection {
    double alpha0 = 0.0;
    double beta = 0.95;
    double beta_min = 0.0;
    int iters = 0;
    int seeds = 20;
};

struct AblateSection {
    std::vector<Index> v_values{0, 1, 2, 3, 4};
    std::vector<SketchDistribution> distributions{SketchDistribution::rademacher,
                                                  SketchDistribution::gaussian};
    int seeds = 50;
};

struct GFactorSection {
    int trials = 60;
    double noise_sigma = 0.0;  ///< 0: derived from acquisition
    double lambda = 0.01;      ///< ℓ2 weight of the linear reconstruction
    int cg_iters = 30;
    Index c_hat = 3;
    std::vector<Index> v_values{0, 1, 2, 3};
};

struct BenchSection {
    std::vector<Method> methods{Method::baseline, Method::coil_compression, Method::accproxsgd,
                                Method::coil_sketching};
    int difference_images = 3;  ///< checkpoints exported per method
};

/// Every setting of every command, with defaults. See README for the grammar.
struct RunConfig {
    std::uint64_t seed = 1;
    PhantomSection phantom;
    CoilSection coils;
    AcquisitionSection acquisition;
    ReconSection recon;
    SketchSection sketch;
    SgdSection sgd;
    AblateSection ablate;
    GFactorSection gfactor;
    BenchSection bench;

    /// Cross-field checks; throws ConfigError.
    void validate() const;
};

/// Parses INI text. Unknown sections or keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical INI text with every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// Applies SKETCHRECON_SEED when set to an unsigned integer.
void apply_seed_env(RunConfig& cfg);

/// Independent seeds derived from the run seed.
enum class SeedUse : std::uint64_t { coils = 1, noise = 2, mask = 3, sketch = 4, sgd = 5, gfactor = 6 };
std::uint64_t derived_seed(const RunConfig& cfg, SeedUse use);

/// Method settings assembled from the recon, sketch and sgd sections.
MethodSettings method_settings(const RunConfig& cfg);

}  // namespace coilsketch
