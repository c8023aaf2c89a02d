#include "coilsketch/sim/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "coilsketch/core/rng.hpp"

namespace coilsketch {

std::string to_string(PhantomKind k)
{
    return k == PhantomKind::shepp_logan_2d ? "shepp-logan-2d" : "ellipsoids-3d";
}

PhantomKind parse_phantom_kind(const std::string& s)
{
    if (s == "shepp-logan-2d") return PhantomKind::shepp_logan_2d;
    if (s == "ellipsoids-3d") return PhantomKind::ellipsoids_3d;
    throw ParameterError("unknown phantom '" + s + "'");
}

std::string to_string(MaskKind k) { return k == MaskKind::regular ? "regular" : "random"; }

MaskKind parse_mask_kind(const std::string& s)
{
    if (s == "regular") return MaskKind::regular;
    if (s == "random") return MaskKind::random;
    throw ParameterError("unknown mask kind '" + s + "'");
}

namespace {

struct Ellipsoid {
    double amp, a, b, c, x0, y0, z0, phi_deg;
};

// Modified (high-contrast) Shepp-Logan; c and z0 give the 3D variant.
constexpr std::array<Ellipsoid, 10> kSheppLogan = {{
    {1.0, 0.69, 0.92, 0.81, 0.0, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.78, 0.0, -0.0184, 0.0, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.22, 0.0, 0.0, -18.0},
    {-0.2, 0.16, 0.41, 0.28, -0.22, 0.0, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.41, 0.0, 0.35, -0.15, 0.0},
    {0.1, 0.046, 0.046, 0.05, 0.0, 0.1, 0.25, 0.0},
    {0.1, 0.046, 0.046, 0.05, 0.0, -0.1, 0.25, 0.0},
    {0.1, 0.046, 0.023, 0.05, -0.08, -0.605, 0.0, 0.0},
    {0.1, 0.023, 0.023, 0.02, 0.0, -0.606, 0.0, 0.0},
    {0.1, 0.023, 0.046, 0.02, 0.06, -0.605, 0.0, 0.0},
}};

// Voxel-center coordinate in [-1, 1], symmetric about the origin.
double unit_coord(Index i, Index n)
{
    return (2.0 * static_cast<double>(i) + 1.0 - static_cast<double>(n)) / static_cast<double>(n);
}

// Calls f(voxel, y, x, z) for every voxel in C order; z = 0 in 2D.
template <class F>
void for_each_voxel(const GridShape& shape, F&& f)
{
    const Index nz = shape.ndim() == 3 ? shape[2] : 1;
    Index v = 0;
    for (Index i = 0; i < shape[0]; ++i) {
        // Row 0 is the top of the image.
        const double y = -unit_coord(i, shape[0]);
        for (Index j = 0; j < shape[1]; ++j) {
            const double x = unit_coord(j, shape[1]);
            for (Index k = 0; k < nz; ++k) {
                const double z = shape.ndim() == 3 ? unit_coord(k, nz) : 0.0;
                f(v++, y, x, z);
            }
        }
    }
}

}  // namespace

Image make_phantom(const PhantomSpec& spec)
{
    const GridShape& shape = spec.shape;
    const bool three_d = spec.kind == PhantomKind::ellipsoids_3d;
    if (three_d != (shape.ndim() == 3)) {
        throw ShapeError("phantom " + to_string(spec.kind) + " does not fit grid " +
                         shape.to_string());
    }
    if (!(spec.contrast > 0.0) || !std::isfinite(spec.contrast)) {
        throw ParameterError("phantom contrast must be positive");
    }
    Vec values = Vec::Zero(shape.size());
    for_each_voxel(shape, [&](Index v, double y, double x, double z) {
        double sum = 0.0;
        for (const Ellipsoid& e : kSheppLogan) {
            const double phi = e.phi_deg * std::numbers::pi / 180.0;
            const double dx = x - e.x0;
            const double dy = y - e.y0;
            const double u = dx * std::cos(phi) + dy * std::sin(phi);
            const double w = -dx * std::sin(phi) + dy * std::cos(phi);
            double r2 = (u * u) / (e.a * e.a) + (w * w) / (e.b * e.b);
            if (three_d) {
                const double dz = z - e.z0;
                r2 += dz * dz / (e.c * e.c);
            }
            if (r2 <= 1.0) {
                sum += e.amp;
            }
        }
        values[v] = std::clamp(sum, 0.0, 1.0) * spec.contrast;
    });
    return {shape, std::move(values)};
}

Mask support_mask(const Image& img, double rel)
{
    const RVec mag = img.values.cwiseAbs();
    const double peak = mag.size() > 0 ? mag.maxCoeff() : 0.0;
    return (mag.array() > rel * peak);
}

SensitivityMaps make_coil_maps(Index coils, const GridShape& shape, std::uint64_t seed,
                               const Mask& support, CoilGeometry geom)
{
    if (coils < 1) {
        throw ParameterError("need at least one coil");
    }
    if (support.size() != 0 && support.size() != shape.size()) {
        throw ShapeError("support mask length does not match the grid");
    }
    Rng rng = make_rng(seed, 0xc011);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    struct Lobe {
        double cy, cx, cz, phase0, gy, gx, quad;
    };
    if (!(geom.width > 0.0) || !(geom.ring >= 0.0)) {
        throw ParameterError("coil lobes need positive width and nonnegative ring radius");
    }
    const double kRing = geom.ring;
    const double kWidth = geom.width;
    std::vector<Lobe> lobes(static_cast<std::size_t>(coils));
    for (Index c = 0; c < coils; ++c) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(c) /
                                 static_cast<double>(coils) +
                             0.1 * unit(rng);
        Lobe& l = lobes[static_cast<std::size_t>(c)];
        l.cy = kRing * std::sin(theta);
        l.cx = kRing * std::cos(theta);
        l.cz = shape.ndim() == 3 ? (c % 2 == 0 ? 0.6 : -0.6) : 0.0;
        l.phase0 = std::numbers::pi * unit(rng);
        l.gy = 0.5 * std::numbers::pi * unit(rng);
        l.gx = 0.5 * std::numbers::pi * unit(rng);
        l.quad = 0.5 * unit(rng);
    }

    SensitivityMaps maps{shape, CMat::Zero(shape.size(), coils)};
    for_each_voxel(shape, [&](Index v, double y, double x, double z) {
        if (support.size() != 0 && !support[v]) {
            return;
        }
        double sos = 0.0;
        for (Index c = 0; c < coils; ++c) {
            const Lobe& l = lobes[static_cast<std::size_t>(c)];
            const double d2 = (y - l.cy) * (y - l.cy) + (x - l.cx) * (x - l.cx) +
                              (z - l.cz) * (z - l.cz);
            const double mag = std::exp(-d2 / (2.0 * kWidth * kWidth));
            const double phase = l.phase0 + l.gy * y + l.gx * x + l.quad * (x * x + y * y);
            maps.coils(v, c) = std::polar(mag, phase);
            sos += mag * mag;
        }
        maps.coils.row(v) /= std::sqrt(sos);
    });
    return maps;
}

// ---------------------------------------------------------------------------

namespace {

Trajectory lines_to_mask(const GridShape& shape, const std::vector<Index>& lines)
{
    const Index per_line = shape.size() / shape[0];
    RMat pts(static_cast<Index>(lines.size()) * per_line, shape.ndim());
    Index row = 0;
    for (Index line : lines) {
        for (Index r = 0; r < per_line; ++r) {
            pts(row, 0) = static_cast<double>(centered_coord(line, shape[0]));
            Index rem = r;
            for (Index a = shape.ndim() - 1; a >= 1; --a) {
                pts(row, a) = static_cast<double>(centered_coord(rem % shape[a], shape[a]));
                rem /= shape[a];
            }
            ++row;
        }
    }
    return {pts, TrajectoryKind::cartesian_mask};
}

}  // namespace

Trajectory cartesian_mask(const GridShape& shape, double accel, MaskKind kind, Index acs,
                          std::uint64_t seed)
{
    const Index n = shape[0];
    if (!(accel >= 1.0) || !std::isfinite(accel)) {
        throw ParameterError("acceleration must be >= 1");
    }
    if (acs < 0 || acs > n) {
        throw ParameterError("ACS block of " + std::to_string(acs) + " lines exceeds " +
                             std::to_string(n) + " phase encodes");
    }
    std::set<Index> keep;
    const Index acs_start = n / 2 - acs / 2;
    for (Index i = 0; i < acs; ++i) {
        keep.insert(acs_start + i);
    }
    if (kind == MaskKind::regular) {
        for (Index k = 0;; ++k) {
            const auto line = static_cast<Index>(std::floor(static_cast<double>(k) * accel + 1e-9));
            if (line >= n) {
                break;
            }
            keep.insert(line);
        }
    } else {
        const auto target = std::max<Index>(
            static_cast<Index>(keep.size()),
            static_cast<Index>(std::llround(static_cast<double>(n) / accel)));
        // Variable density: weight decays linearly from the center toward the edge.
        std::vector<Index> pool;
        std::vector<double> weight;
        for (Index i = 0; i < n; ++i) {
            if (keep.count(i) == 0) {
                pool.push_back(i);
                const double r = std::abs(static_cast<double>(centered_coord(i, n))) /
                                 (0.5 * static_cast<double>(n));
                weight.push_back(std::pow(1.0 - 0.9 * r, 2));
            }
        }
        Rng rng = make_rng(seed, 0x3a5c);
        while (static_cast<Index>(keep.size()) < target && !pool.empty()) {
            std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
            const std::size_t j = pick(rng);
            keep.insert(pool[j]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
            weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
    return lines_to_mask(shape, std::vector<Index>(keep.begin(), keep.end()));
}

std::vector<Index> mask_lines(const GridShape& shape, const Trajectory& mask)
{
    std::set<Index> lines;
    for (Index i = 0; i < mask.samples(); ++i) {
        lines.insert(static_cast<Index>(std::llround(mask.points(i, 0))) + shape[0] / 2);
    }
    return {lines.begin(), lines.end()};
}

double realized_acceleration(const GridShape& shape, const Trajectory& traj)
{
    return static_cast<double>(shape.size()) / static_cast<double>(traj.samples());
}

RVec spoke_angles(Index spokes, bool golden)
{
    if (spokes < 1) {
        throw ParameterError("need at least one spoke");
    }
    constexpr double kGoldenConjugate = 0.6180339887498949;
    RVec angles(spokes);
    for (Index k = 0; k < spokes; ++k) {
        const double kd = static_cast<double>(k);
        angles[k] = golden ? std::fmod(kd * std::numbers::pi * kGoldenConjugate, std::numbers::pi)
                           : kd * std::numbers::pi / static_cast<double>(spokes);
    }
    return angles;
}

Trajectory radial_traj(const GridShape& shape, Index spokes, Index readout, bool golden)
{
    if (readout < 1) {
        throw ParameterError("need at least one readout point");
    }
    const RVec angles = spoke_angles(spokes, golden);
    RMat pts(spokes * readout, 2);
    const double hy = 0.5 * static_cast<double>(shape[0]);
    const double hx = 0.5 * static_cast<double>(shape[1]);
    for (Index s = 0; s < spokes; ++s) {
        const double sn = std::sin(angles[s]);
        const double cs = std::cos(angles[s]);
        for (Index j = 0; j < readout; ++j) {
            const double r = (static_cast<double>(j) - 0.5 * static_cast<double>(readout)) * 2.0 /
                             static_cast<double>(readout);
            pts(s * readout + j, 0) = r * sn * hy;
            pts(s * readout + j, 1) = r * cs * hx;
        }
    }
    return {pts, TrajectoryKind::non_cartesian};
}

Trajectory radial_stack_traj(const GridShape& shape, Index spokes, Index readout, bool golden)
{
    if (shape.ndim() != 3) {
        throw ShapeError("radial stack needs a 3D grid");
    }
    const Trajectory plane = radial_traj(GridShape({shape[0], shape[1]}), spokes, readout, golden);
    const Index nz = shape[2];
    const Index per = plane.samples();
    RMat pts(per * nz, 3);
    for (Index kz = 0; kz < nz; ++kz) {
        pts.block(kz * per, 0, per, 2) = plane.points;
        pts.block(kz * per, 2, per, 1).setConstant(static_cast<double>(centered_coord(kz, nz)));
    }
    return {pts, TrajectoryKind::non_cartesian};
}

// ---------------------------------------------------------------------------

Vec complex_noise(Index n, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("noise sigma must be finite and nonnegative");
    }
    Vec out = Vec::Zero(n);
    if (sigma == 0.0) {
        return out;
    }
    Rng rng = make_rng(seed, 0x4015e);
    std::normal_distribution<double> g(0.0, sigma / std::numbers::sqrt2);
    for (Index i = 0; i < n; ++i) {
        const double re = g(rng);
        const double im = g(rng);
        out[i] = {re, im};
    }
    return out;
}

KSpaceData acquire(const Image& x, const SenseOperator& op, const AcquisitionSpec& spec)
{
    if (!(x.shape == op.shape())) {
        throw ShapeError("acquire: image grid does not match the operator");
    }
    if (spec.traj.samples() != op.samples()) {
        throw ShapeError("acquire: trajectory does not match the operator sample count");
    }
    const SenseOperator plain = op.without_weights().with_ledger(nullptr);
    Vec k = plain.forward(x.values);
    k += complex_noise(k.size(), spec.noise_sigma, spec.seed);
    KSpaceData data;
    data.traj = spec.traj;
    data.coils = Eigen::Map<const CMat>(k.data(), op.samples(), op.coils());
    data.weights_applied = false;
    return data;
}

double noise_for_snr(const Image& x, const Mask& support, double snr_db)
{
    if (support.size() != x.shape.size()) {
        throw ShapeError("support mask length does not match the image");
    }
    double sum = 0.0;
    Index count = 0;
    for (Index v = 0; v < support.size(); ++v) {
        if (support[v]) {
            sum += std::abs(x.values[v]);
            ++count;
        }
    }
    if (count == 0) {
        throw ParameterError("empty support");
    }
    return sum / static_cast<double>(count) * std::pow(10.0, -snr_db / 20.0);
}

}  // namespace coilsketch
