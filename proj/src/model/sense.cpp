#include "coilsketch/model/sense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coilsketch {

void SensitivityMaps::validate() const
{
    if (coils.cols() < 1) {
        throw ParameterError("sensitivity maps need at least one coil");
    }
    if (coils.rows() != shape.size()) {
        throw ShapeError("sensitivity maps have " + std::to_string(coils.rows()) +
                         " voxels, grid " + shape.to_string() + " has " +
                         std::to_string(shape.size()));
    }
}

DensityWeights::DensityWeights(RVec shared) : w(std::move(shared)) { validate(); }
DensityWeights::DensityWeights(RMat per_coil) : w(std::move(per_coil)) { validate(); }

bool DensityWeights::shared() const
{
    for (Index c = 1; c < w.cols(); ++c) {
        if (w.col(c) != w.col(0)) {
            return false;
        }
    }
    return true;
}

void DensityWeights::validate() const
{
    if (!w.allFinite()) {
        throw ParameterError("density weights must be finite");
    }
    if (w.size() > 0 && w.minCoeff() < 0.0) {
        throw ParameterError("density weights must be nonnegative");
    }
}

Vec KSpaceData::stacked() const
{
    return Eigen::Map<const Vec>(coils.data(), coils.size());
}

// ---------------------------------------------------------------------------

SenseOperator::SenseOperator(SensitivityMaps maps, SamplerPtr sampler,
                             std::optional<DensityWeights> weights, LedgerPtr ledger)
    : maps_(std::move(maps)),
      sampler_(std::move(sampler)),
      weights_(std::move(weights)),
      ledger_(std::move(ledger))
{
    maps_.validate();
    if (!sampler_) {
        throw ParameterError("SENSE operator needs a Fourier sampler");
    }
    if (!(sampler_->shape() == maps_.shape)) {
        throw ShapeError("maps grid " + maps_.shape.to_string() + " does not match sampler grid " +
                         sampler_->shape().to_string());
    }
    if (weights_) {
        weights_->validate();
        if (weights_->samples() != sampler_->samples()) {
            throw ShapeError("density weights length does not match the sample count");
        }
        if (weights_->w.cols() != 1 && weights_->w.cols() != maps_.count()) {
            throw ShapeError("per-coil density weights need one column per coil");
        }
        sqrt_w_ = weights_->w.cwiseSqrt();
    }
}

const double* SenseOperator::sqrt_weight(Index c) const
{
    if (!weights_) {
        return nullptr;
    }
    return sqrt_w_.col(sqrt_w_.cols() == 1 ? 0 : c).data();
}

Vec SenseOperator::forward(const Vec& x) const
{
    if (x.size() != in_dim()) {
        throw ShapeError("SENSE forward: image length mismatch");
    }
    const Index n = samples();
    const Index ncoil = coils();
    Vec out(out_dim());
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < ncoil; ++c) {
        const Vec img = maps_.coils.col(c).cwiseProduct(x);
        cplx* dst = out.data() + c * n;
        sampler_->forward(img.data(), dst);
        if (const double* sw = sqrt_weight(c)) {
            for (Index i = 0; i < n; ++i) {
                dst[i] *= sw[i];
            }
        }
    }
    if (ledger_) {
        ledger_->record({ncoil, 0});
    }
    return out;
}

Vec SenseOperator::adjoint(const Vec& y) const
{
    if (y.size() != out_dim()) {
        throw ShapeError("SENSE adjoint: data length mismatch");
    }
    const Index n = samples();
    const Index d = in_dim();
    const Index ncoil = coils();
    CMat per_coil(d, ncoil);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < ncoil; ++c) {
        Vec yc = y.segment(c * n, n);
        if (const double* sw = sqrt_weight(c)) {
            for (Index i = 0; i < n; ++i) {
                yc[i] *= sw[i];
            }
        }
        sampler_->adjoint(yc.data(), per_coil.col(c).data());
        per_coil.col(c).array() *= maps_.coils.col(c).conjugate().array();
    }
    // Fixed coil order keeps the reduction independent of the thread count.
    Vec out = Vec::Zero(d);
    for (Index c = 0; c < ncoil; ++c) {
        out += per_coil.col(c);
    }
    if (ledger_) {
        ledger_->record({ncoil, 0});
    }
    return out;
}

Vec SenseOperator::forward_coil(Index c, const Vec& x) const
{
    const Vec img = maps_.coils.col(c).cwiseProduct(x);
    Vec out = sampler_->forward(img);
    if (const double* sw = sqrt_weight(c)) {
        out.array() *= Eigen::Map<const RVec>(sw, samples()).array();
    }
    if (ledger_) {
        ledger_->record({1, 0});
    }
    return out;
}

Vec SenseOperator::adjoint_coil(Index c, const Vec& yc) const
{
    Vec tmp = yc;
    if (const double* sw = sqrt_weight(c)) {
        tmp.array() *= Eigen::Map<const RVec>(sw, samples()).array();
    }
    Vec out = sampler_->adjoint(tmp);
    out.array() *= maps_.coils.col(c).conjugate().array();
    if (ledger_) {
        ledger_->record({1, 0});
    }
    return out;
}

Vec SenseOperator::weight_data(const KSpaceData& data) const
{
    if (data.samples() != samples() || data.count() != coils()) {
        throw ShapeError("k-space data (" + std::to_string(data.count()) + " coils x " +
                         std::to_string(data.samples()) + ") does not match operator (" +
                         std::to_string(coils()) + " x " + std::to_string(samples()) + ")");
    }
    Vec y = data.stacked();
    if (weights_ && !data.weights_applied) {
        const Index n = samples();
        for (Index c = 0; c < coils(); ++c) {
            y.segment(c * n, n).array() *=
                Eigen::Map<const RVec>(sqrt_weight(c), n).array();
        }
    }
    return y;
}

SenseOperator SenseOperator::with_maps(SensitivityMaps maps) const
{
    std::optional<DensityWeights> w = weights_;
    if (w && w->w.cols() != 1) {
        if (!w->shared()) {
            throw ParameterError("per-coil density weights cannot follow a change of coil basis");
        }
        w = DensityWeights(RVec(w->w.col(0)));
    }
    return SenseOperator(std::move(maps), sampler_, std::move(w), ledger_);
}

SenseOperator SenseOperator::with_ledger(LedgerPtr ledger) const
{
    SenseOperator copy = *this;
    copy.ledger_ = std::move(ledger);
    return copy;
}

SenseOperator SenseOperator::without_weights() const
{
    return SenseOperator(maps_, sampler_, std::nullopt, ledger_);
}

SenseOperator SenseOperator::subset(std::span<const Index> coil_ids) const
{
    SensitivityMaps sub{maps_.shape, CMat(maps_.shape.size(), static_cast<Index>(coil_ids.size()))};
    std::optional<DensityWeights> w;
    if (weights_) {
        if (weights_->w.cols() == 1) {
            w = weights_;
        } else {
            RMat cols(samples(), static_cast<Index>(coil_ids.size()));
            for (std::size_t k = 0; k < coil_ids.size(); ++k) {
                cols.col(static_cast<Index>(k)) = weights_->w.col(coil_ids[k]);
            }
            w = DensityWeights(std::move(cols));
        }
    }
    for (std::size_t k = 0; k < coil_ids.size(); ++k) {
        if (coil_ids[k] < 0 || coil_ids[k] >= coils()) {
            throw ParameterError("coil index out of range");
        }
        sub.coils.col(static_cast<Index>(k)) = maps_.coils.col(coil_ids[k]);
    }
    return SenseOperator(std::move(sub), sampler_, std::move(w), ledger_);
}

LinOp SenseOperator::as_linop() const
{
    // The SENSE operator records its own costs; the wrapper must not record again.
    auto self = std::make_shared<const SenseOperator>(*this);
    return LinOp(
        in_dim(), out_dim(), [self](const Vec& x) { return self->forward(x); },
        [self](const Vec& y) { return self->adjoint(y); }, CostTags{coils(), 0}, nullptr, "sense");
}

SenseOperator build_sense(const SensitivityMaps& maps, const Trajectory& traj,
                          std::optional<DensityWeights> weights, NufftBackend backend,
                          LedgerPtr ledger)
{
    maps.validate();
    traj.validate(maps.shape);
    return SenseOperator(maps, make_sampler(maps.shape, traj, backend), std::move(weights),
                         std::move(ledger));
}

// ---------------------------------------------------------------------------

DensityWeights radial_density_weights(const Trajectory& traj)
{
    const Index n = traj.samples();
    RVec radius(n);
    for (Index i = 0; i < n; ++i) {
        radius[i] = traj.points.row(i).norm();
    }
    constexpr double kZero = 1e-12;
    double smallest = std::numeric_limits<double>::infinity();
    double largest = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (radius[i] > kZero) {
            smallest = std::min(smallest, radius[i]);
        }
        largest = std::max(largest, radius[i]);
    }
    RVec w(n);
    if (largest <= kZero) {
        w.setOnes();
        return DensityWeights(std::move(w));
    }
    for (Index i = 0; i < n; ++i) {
        w[i] = radius[i] > kZero ? radius[i] : 0.5 * smallest;
    }
    w /= w.maxCoeff();
    return DensityWeights(std::move(w));
}

// ---------------------------------------------------------------------------

namespace {

struct CoilBasis {
    CMat u;       // C x C, columns ordered by descending energy
    RVec sigma2;  // descending
};

CoilBasis coil_basis(const KSpaceData& data)
{
    // Gram matrix of the C x N stacked data: M Mᴴ = Kᵀ conj(K).
    const CMat gram = data.coils.transpose() * data.coils.conjugate();
    Eigen::SelfAdjointEigenSolver<CMat> eig(gram);
    const Index c = gram.rows();
    CoilBasis b{CMat(c, c), RVec(c)};
    for (Index k = 0; k < c; ++k) {
        b.u.col(k) = eig.eigenvectors().col(c - 1 - k);
        b.sigma2[k] = std::max(0.0, eig.eigenvalues()[c - 1 - k]);
    }
    return b;
}

}  // namespace

CompressionResult coil_compress_svd(const KSpaceData& data, const SensitivityMaps& maps,
                                    Index keep)
{
    const Index c = data.count();
    if (maps.count() != c) {
        throw ShapeError("coil compression: data and maps coil counts differ");
    }
    if (keep < 1 || keep > c) {
        throw ParameterError("coil compression: keep must be in [1, " + std::to_string(c) + "]");
    }
    const CoilBasis basis = coil_basis(data);
    CompressionResult r;
    r.matrix = basis.u.leftCols(keep).adjoint();
    r.singular_values = basis.sigma2.cwiseSqrt();
    const double total = basis.sigma2.sum();
    r.energy_fraction = total > 0.0 ? basis.sigma2.head(keep).sum() / total : 1.0;

    // Virtual coil j = Σ_c matrix(j, c) · coil c, for data and maps alike.
    r.data.traj = data.traj;
    r.data.weights_applied = data.weights_applied;
    r.data.coils = data.coils * r.matrix.transpose();
    r.maps.shape = maps.shape;
    r.maps.coils = maps.coils * r.matrix.transpose();
    return r;
}

Index coils_for_energy(const KSpaceData& data, double fraction)
{
    const CoilBasis basis = coil_basis(data);
    const double total = basis.sigma2.sum();
    double acc = 0.0;
    for (Index k = 0; k < basis.sigma2.size(); ++k) {
        acc += basis.sigma2[k];
        if (total <= 0.0 || acc >= fraction * total - 1e-12 * total) {
            return k + 1;
        }
    }
    return basis.sigma2.size();
}

}  // namespace coilsketch
