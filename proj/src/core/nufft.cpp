#include "coilsketch/core/nufft.hpp"

#include <cmath>
#include <numbers>

namespace coilsketch {

Vec FourierSampler::forward(const Vec& x) const
{
    if (x.size() != shape().size()) {
        throw ShapeError("sampler forward: expected " + std::to_string(shape().size()) + " voxels");
    }
    Vec out(samples());
    forward(x.data(), out.data());
    return out;
}

Vec FourierSampler::adjoint(const Vec& k) const
{
    if (k.size() != samples()) {
        throw ShapeError("sampler adjoint: expected " + std::to_string(samples()) + " samples");
    }
    Vec out(shape().size());
    adjoint(k.data(), out.data());
    return out;
}

// ---------------------------------------------------------------------------

CartesianSampler::CartesianSampler(GridShape shape, const Trajectory& mask) : fft_(shape)
{
    if (mask.kind != TrajectoryKind::cartesian_mask) {
        throw ParameterError("CartesianSampler requires a cartesian-mask trajectory");
    }
    mask.validate(shape);
    bins_.reserve(static_cast<std::size_t>(mask.samples()));
    for (Index i = 0; i < mask.samples(); ++i) {
        Index flat = 0;
        for (Index a = 0; a < shape.ndim(); ++a) {
            const auto f = static_cast<Index>(std::lround(mask.points(i, a)));
            flat = flat * shape[a] + (f + shape[a] / 2);
        }
        bins_.push_back(flat);
    }
}

void CartesianSampler::forward(const cplx* img, cplx* ksp) const
{
    std::vector<cplx> full(static_cast<std::size_t>(shape().size()));
    fft_.forward(img, full.data());
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        ksp[i] = full[static_cast<std::size_t>(bins_[i])];
    }
}

void CartesianSampler::adjoint(const cplx* ksp, cplx* img) const
{
    std::vector<cplx> full(static_cast<std::size_t>(shape().size()), cplx(0.0));
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        full[static_cast<std::size_t>(bins_[i])] += ksp[i];
    }
    fft_.adjoint(full.data(), img);
}

// ---------------------------------------------------------------------------

DirectNudft::DirectNudft(GridShape shape, const Trajectory& traj, kernels::Exec exec)
    : exec_(exec)
{
    traj.validate(shape);
    tables_ = kernels::make_phase_tables(shape, traj.points);
}

void DirectNudft::forward(const cplx* img, cplx* ksp) const
{
    kernels::nudft_forward(tables_, img, ksp, exec_);
}

void DirectNudft::adjoint(const cplx* ksp, cplx* img) const
{
    kernels::nudft_adjoint(tables_, ksp, img, exec_);
}

// ---------------------------------------------------------------------------

namespace {

Index oversampled_length(Index n, double alpha)
{
    auto m = static_cast<Index>(std::ceil(alpha * static_cast<double>(n)));
    return m + (m % 2);
}

double kb_kernel(double dist, int width, double beta)
{
    const double x = 2.0 * dist / width;
    if (std::abs(x) > 1.0) {
        return 0.0;
    }
    return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x));
}

// Continuous Fourier transform of kb_kernel at frequency nu (cycles per grid cell).
double kb_spectrum(double nu, int width, double beta)
{
    const double z = beta * beta - std::pow(std::numbers::pi * width * nu, 2);
    if (z > 0.0) {
        const double s = std::sqrt(z);
        return width * std::sinh(s) / s;
    }
    if (z < 0.0) {
        const double s = std::sqrt(-z);
        return width * std::sin(s) / s;
    }
    return width;
}

}  // namespace

GriddingNufft::GriddingNufft(GridShape shape, const Trajectory& traj, GriddingParams params,
                             kernels::Exec exec)
    : shape_(shape),
      fft_([&] {
          std::vector<Index> m;
          for (Index n : shape.dims()) {
              m.push_back(oversampled_length(n, params.oversampling));
          }
          return GridShape(m);
      }()),
      exec_(exec)
{
    if (params.width < 2 || params.oversampling < 1.0) {
        throw ParameterError("gridding needs width >= 2 and oversampling >= 1");
    }
    traj.validate(shape);
    const GridShape& over = fft_.shape();
    const Index nd = shape.ndim();
    const int w = params.width;

    // Beatty et al. design rule for the KB shape parameter, per axis since
    // rounding to an even length changes the effective oversampling.
    std::vector<double> beta(static_cast<std::size_t>(nd));
    for (Index a = 0; a < nd; ++a) {
        const double alpha = static_cast<double>(over[a]) / static_cast<double>(shape[a]);
        beta[static_cast<std::size_t>(a)] =
            std::numbers::pi * std::sqrt(std::pow(w / alpha * (alpha - 0.5), 2) - 0.8);
    }
    beta_ = beta[0];

    Index taps = 1;
    for (Index a = 0; a < nd; ++a) {
        taps *= w;
    }
    table_.samples = traj.samples();
    table_.taps = taps;
    table_.index.resize(static_cast<std::size_t>(table_.samples * taps));
    table_.weight.resize(static_cast<std::size_t>(table_.samples * taps));

    std::vector<std::vector<Index>> axis_idx(static_cast<std::size_t>(nd), std::vector<Index>(w));
    std::vector<std::vector<double>> axis_w(static_cast<std::size_t>(nd), std::vector<double>(w));
    for (Index i = 0; i < traj.samples(); ++i) {
        for (Index a = 0; a < nd; ++a) {
            const Index m = over[a];
            const double u = traj.points(i, a) * static_cast<double>(m) /
                             static_cast<double>(shape[a]);
            const auto start = static_cast<Index>(std::ceil(u - 0.5 * w));
            for (int j = 0; j < w; ++j) {
                const Index k = start + j;
                axis_idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] =
                    ((k + m / 2) % m + m) % m;
                axis_w[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] =
                    kb_kernel(u - static_cast<double>(k), w, beta[static_cast<std::size_t>(a)]);
            }
        }
        for (Index t = 0; t < taps; ++t) {
            Index rem = t;
            Index flat = 0;
            double weight = 1.0;
            // tap digits, last axis fastest
            std::vector<Index> digit(static_cast<std::size_t>(nd));
            for (Index a = nd - 1; a >= 0; --a) {
                digit[static_cast<std::size_t>(a)] = rem % w;
                rem /= w;
            }
            for (Index a = 0; a < nd; ++a) {
                const auto j = static_cast<std::size_t>(digit[static_cast<std::size_t>(a)]);
                flat = flat * over[a] + axis_idx[static_cast<std::size_t>(a)][j];
                weight *= axis_w[static_cast<std::size_t>(a)][j];
            }
            table_.index[static_cast<std::size_t>(i * taps + t)] = flat;
            table_.weight[static_cast<std::size_t>(i * taps + t)] = weight;
        }
    }

    // Image voxel r sits at oversampled index r + m/2; deapodize by the kernel spectrum.
    const double scale = std::sqrt(static_cast<double>(over.size()) /
                                   static_cast<double>(shape.size()));
    pad_index_.resize(static_cast<std::size_t>(shape.size()));
    apodization_.resize(shape.size());
    std::vector<Index> idx(static_cast<std::size_t>(nd), 0);
    for (Index v = 0; v < shape.size(); ++v) {
        Index flat = 0;
        double apod = scale;
        for (Index a = 0; a < nd; ++a) {
            const Index r = centered_coord(idx[static_cast<std::size_t>(a)], shape[a]);
            flat = flat * over[a] + (r + over[a] / 2);
            apod /= kb_spectrum(static_cast<double>(r) / static_cast<double>(over[a]), w,
                                beta[static_cast<std::size_t>(a)]);
        }
        pad_index_[static_cast<std::size_t>(v)] = flat;
        apodization_[v] = apod;
        for (Index a = nd - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < shape[a]) {
                break;
            }
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
}

void GriddingNufft::forward(const cplx* img, cplx* ksp) const
{
    std::vector<cplx> grid(static_cast<std::size_t>(fft_.shape().size()), cplx(0.0));
    for (Index v = 0; v < shape_.size(); ++v) {
        grid[static_cast<std::size_t>(pad_index_[static_cast<std::size_t>(v)])] =
            img[v] * apodization_[v];
    }
    fft_.forward(grid.data(), grid.data());
    kernels::grid_gather(table_, grid.data(), ksp, exec_);
}

void GriddingNufft::adjoint(const cplx* ksp, cplx* img) const
{
    std::vector<cplx> grid(static_cast<std::size_t>(fft_.shape().size()), cplx(0.0));
    kernels::grid_scatter(table_, ksp, grid.data());
    fft_.adjoint(grid.data(), grid.data());
    for (Index v = 0; v < shape_.size(); ++v) {
        img[v] = grid[static_cast<std::size_t>(pad_index_[static_cast<std::size_t>(v)])] *
                 apodization_[v];
    }
}

// ---------------------------------------------------------------------------

SamplerPtr make_sampler(const GridShape& shape, const Trajectory& traj, NufftBackend backend)
{
    if (traj.kind == TrajectoryKind::cartesian_mask) {
        return std::make_shared<CartesianSampler>(shape, traj);
    }
    if (backend == NufftBackend::direct) {
        return std::make_shared<DirectNudft>(shape, traj);
    }
    return std::make_shared<GriddingNufft>(shape, traj);
}

Vec dft_nonuniform(const Image& img, const Trajectory& traj)
{
    if (traj.kind != TrajectoryKind::non_cartesian) {
        throw ParameterError("dft_nonuniform expects a non-cartesian trajectory");
    }
    if (img.values.size() != img.shape.size()) {
        throw ShapeError("dft_nonuniform: image values do not match its shape");
    }
    return DirectNudft(img.shape, traj).forward(img.values);
}

LinOp sampler_op(SamplerPtr sampler, LedgerPtr ledger)
{
    const Index d = sampler->shape().size();
    const Index n = sampler->samples();
    return LinOp(
        d, n, [sampler](const Vec& x) { return sampler->forward(x); },
        [sampler](const Vec& k) { return sampler->adjoint(k); }, CostTags{1, 0}, std::move(ledger),
        "sampler");
}

}  // namespace coilsketch
