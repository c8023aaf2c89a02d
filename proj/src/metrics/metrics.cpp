#include "coilsketch/metrics/metrics.hpp"

#include <cmath>
#include <numbers>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/sim/simulate.hpp"

namespace coilsketch {

double nrmse(const Vec& x, const Vec& ref)
{
    if (x.size() != ref.size()) {
        throw ShapeError("nrmse: length mismatch");
    }
    const double den = ref.norm();
    if (den == 0.0) {
        throw ParameterError("nrmse: zero reference");
    }
    return (x.cwiseAbs() - ref.cwiseAbs()).norm() / den;
}

double convergence_distance(const Vec& x, const Vec& x_inf)
{
    if (x.size() != x_inf.size()) {
        throw ShapeError("convergence distance: length mismatch");
    }
    const double den = x_inf.norm();
    if (den == 0.0) {
        throw ParameterError("convergence distance: zero reference");
    }
    return (x - x_inf).norm() / den;
}

RMat gaussian_kernel(int size, double sigma)
{
    RMat k(size, size);
    const double c = 0.5 * (size - 1);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double r2 = (i - c) * (i - c) + (j - c) * (j - c);
            k(i, j) = std::exp(-r2 / (2.0 * sigma * sigma));
        }
    }
    return k / k.sum();
}

RMat log_kernel(int size, double sigma)
{
    RMat k(size, size);
    const double c = 0.5 * (size - 1);
    const double s2 = sigma * sigma;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double r2 = (i - c) * (i - c) + (j - c) * (j - c);
            k(i, j) = -(1.0 / (std::numbers::pi * s2 * s2)) * (1.0 - r2 / (2.0 * s2)) *
                      std::exp(-r2 / (2.0 * s2));
        }
    }
    // Zero mean so constant offsets vanish exactly.
    k.array() -= k.mean();
    return k;
}

namespace {

Index reflect(Index i, Index n)
{
    while (i < 0 || i >= n) {
        i = i < 0 ? -i - 1 : 2 * n - i - 1;
    }
    return i;
}

Index slice_count(const GridShape& shape) { return shape.ndim() == 3 ? shape[2] : 1; }

// Plane z of a C-order image as an (ny x nx) matrix.
RMat plane(const GridShape& shape, const RVec& img, Index z)
{
    const Index nz = slice_count(shape);
    RMat p(shape[0], shape[1]);
    for (Index i = 0; i < shape[0]; ++i) {
        for (Index j = 0; j < shape[1]; ++j) {
            p(i, j) = img[(i * shape[1] + j) * nz + z];
        }
    }
    return p;
}

RMat filter_same(const RMat& img, const RMat& k)
{
    const Index h = k.rows() / 2;
    RMat out(img.rows(), img.cols());
    for (Index i = 0; i < img.rows(); ++i) {
        for (Index j = 0; j < img.cols(); ++j) {
            double acc = 0.0;
            for (Index a = 0; a < k.rows(); ++a) {
                const Index ii = reflect(i + a - h, img.rows());
                for (Index b = 0; b < k.cols(); ++b) {
                    acc += k(a, b) * img(ii, reflect(j + b - h, img.cols()));
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

RMat filter_valid(const RMat& img, const RMat& k)
{
    RMat out(img.rows() - k.rows() + 1, img.cols() - k.cols() + 1);
    for (Index i = 0; i < out.rows(); ++i) {
        for (Index j = 0; j < out.cols(); ++j) {
            out(i, j) = (img.block(i, j, k.rows(), k.cols()).array() * k.array()).sum();
        }
    }
    return out;
}

void check_pair(const Image& x, const Image& ref)
{
    if (!(x.shape == ref.shape)) {
        throw ShapeError("metric inputs have different grids");
    }
}

}  // namespace

RVec filter_slices(const GridShape& shape, const RVec& img, const RMat& kernel)
{
    const Index nz = slice_count(shape);
    RVec out(img.size());
    for (Index z = 0; z < nz; ++z) {
        const RMat f = filter_same(plane(shape, img, z), kernel);
        for (Index i = 0; i < shape[0]; ++i) {
            for (Index j = 0; j < shape[1]; ++j) {
                out[(i * shape[1] + j) * nz + z] = f(i, j);
            }
        }
    }
    return out;
}

double ssim(const Image& x, const Image& ref)
{
    check_pair(x, ref);
    constexpr int kWin = 11;
    if (x.shape[0] < kWin || x.shape[1] < kWin) {
        throw ShapeError("ssim needs images of at least 11x11");
    }
    const RVec mx = x.values.cwiseAbs();
    const RVec my = ref.values.cwiseAbs();
    const double range = my.maxCoeff();
    if (range == 0.0) {
        throw ParameterError("ssim: zero reference");
    }
    const double c1 = std::pow(0.01 * range, 2);
    const double c2 = std::pow(0.03 * range, 2);
    const RMat g = gaussian_kernel(kWin, 1.5);
    const Index nz = slice_count(x.shape);
    double total = 0.0;
    for (Index z = 0; z < nz; ++z) {
        const RMat a = plane(x.shape, mx, z);
        const RMat b = plane(x.shape, my, z);
        const RMat ma = filter_valid(a, g);
        const RMat mb = filter_valid(b, g);
        const RMat saa = filter_valid(a.cwiseProduct(a), g) - ma.cwiseProduct(ma);
        const RMat sbb = filter_valid(b.cwiseProduct(b), g) - mb.cwiseProduct(mb);
        const RMat sab = filter_valid(a.cwiseProduct(b), g) - ma.cwiseProduct(mb);
        const auto num = (2.0 * ma.array() * mb.array() + c1) * (2.0 * sab.array() + c2);
        const auto den = (ma.array().square() + mb.array().square() + c1) *
                         (saa.array() + sbb.array() + c2);
        total += (num / den).mean();
    }
    return total / static_cast<double>(nz);
}

double hfen(const Image& x, const Image& ref)
{
    check_pair(x, ref);
    const RMat k = log_kernel(15, 1.5);
    const Index nz = slice_count(x.shape);
    double total = 0.0;
    for (Index z = 0; z < nz; ++z) {
        const RMat lx = filter_same(plane(x.shape, x.values.cwiseAbs(), z), k);
        const RMat lr = filter_same(plane(x.shape, ref.values.cwiseAbs(), z), k);
        const double den = lr.norm();
        if (den == 0.0) {
            throw ParameterError("hfen: reference has no high-frequency content");
        }
        total += (lx - lr).norm() / den;
    }
    return total / static_cast<double>(nz);
}

MetricReport compare(const Image& x, const Image& ref)
{
    return {nrmse(x.values, ref.values), ssim(x, ref), hfen(x, ref)};
}

// ---------------------------------------------------------------------------

double GFactorMap::mean() const
{
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < valid.size(); ++i) {
        if (valid[i]) {
            sum += inverse_g[i];
            ++count;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

RVec montecarlo_std(const ReconFn& recon, const SenseOperator& acq, const Trajectory& traj,
                    const Image& x, double noise_sigma, int trials, std::uint64_t seed)
{
    if (trials < 2) {
        throw ParameterError("Monte-Carlo g-factor needs at least 2 trials");
    }
    const Index d = x.shape.size();
    CMat runs(d, trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        const AcquisitionSpec spec{traj, noise_sigma, seed_stream(seed, static_cast<std::uint64_t>(t)),
                                   1.0};
        runs.col(t) = recon(acquire(x, acq, spec));
    }
    const Vec mean = runs.rowwise().mean();
    RVec var = RVec::Zero(d);
    for (int t = 0; t < trials; ++t) {
        var += (runs.col(t) - mean).cwiseAbs2();
    }
    return (var / static_cast<double>(trials - 1)).cwiseSqrt();
}

GFactorMap inverse_gfactor(const RVec& std_full, const RVec& std_under, double accel,
                           const Mask& support, int trials)
{
    if (std_full.size() != std_under.size() || support.size() != std_full.size()) {
        throw ShapeError("g-factor inputs differ in length");
    }
    GFactorMap g{RVec::Zero(std_full.size()), Mask::Constant(std_full.size(), false), trials,
                 accel};
    const double root_r = std::sqrt(accel);
    for (Index i = 0; i < std_full.size(); ++i) {
        if (support[i] && std_under[i] > 0.0 && std_full[i] > 0.0) {
            g.inverse_g[i] = std_full[i] * root_r / std_under[i];
            g.valid[i] = true;
        }
    }
    return g;
}

GFactorMap gfactor_montecarlo(const ReconFn& recon_under, const ReconFn& recon_full,
                              const SenseOperator& a_full, const Trajectory& traj_full,
                              const SenseOperator& a_under, const Trajectory& traj_under,
                              const Image& x, double noise_sigma, int trials, double accel,
                              std::uint64_t seed, const Mask& support)
{
    const RVec s_full =
        montecarlo_std(recon_full, a_full, traj_full, x, noise_sigma, trials, seed_stream(seed, 1));
    const RVec s_under = montecarlo_std(recon_under, a_under, traj_under, x, noise_sigma, trials,
                                        seed_stream(seed, 2));
    return inverse_gfactor(s_full, s_under, accel, support, trials);
}

}  // namespace coilsketch
