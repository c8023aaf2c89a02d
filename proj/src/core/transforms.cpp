#include "coilsketch/core/transforms.hpp"

#include <numeric>

#include "coilsketch/core/rng.hpp"

namespace coilsketch {

namespace {

std::vector<Index> row_major_strides(const std::vector<Index>& dims)
{
    std::vector<Index> s(dims.size(), 1);
    for (std::size_t a = dims.size(); a-- > 1;) {
        s[a - 1] = s[a] * dims[a];
    }
    return s;
}

Index product(const std::vector<Index>& dims)
{
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

constexpr std::size_t kTaps = kDb4Lowpass.size();

constexpr std::array<double, kTaps> highpass()
{
    std::array<double, kTaps> g{};
    for (std::size_t j = 0; j < kTaps; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        g[j] = sign * kDb4Lowpass[kTaps - 1 - j];
    }
    return g;
}

constexpr std::array<double, kTaps> kDb4Highpass = highpass();

}  // namespace

// ---------------------------------------------------------------------------

int Wavelet::default_levels(const std::vector<Index>& dims)
{
    int levels = 0;
    while (levels < 4) {
        const Index f = Index{1} << (levels + 1);
        bool ok = true;
        for (Index d : dims) {
            ok = ok && (d % f == 0);
        }
        if (!ok) {
            break;
        }
        ++levels;
    }
    return levels;
}

Wavelet::Wavelet(std::vector<Index> dims, int levels)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)), size_(product(dims_))
{
    if (dims_.empty()) {
        throw ShapeError("wavelet: empty grid");
    }
    levels_ = levels < 0 ? default_levels(dims_) : levels;
    if (levels_ == 0) {
        throw ShapeError("wavelet: grid dimensions are not divisible by 2");
    }
    const Index f = Index{1} << levels_;
    for (Index d : dims_) {
        if (d % f != 0) {
            throw ShapeError("wavelet: dimension " + std::to_string(d) + " not divisible by 2^" +
                             std::to_string(levels_));
        }
    }
}

void Wavelet::transform_axis(Vec& data, const std::vector<Index>& block, std::size_t axis,
                             bool inverse) const
{
    const Index n = block[axis];
    const Index half = n / 2;
    const Index stride = strides_[axis];
    std::vector<cplx> line(static_cast<std::size_t>(n));
    std::vector<cplx> out(static_cast<std::size_t>(n));

    // Enumerate every line along `axis` inside the leading `block` sub-array.
    std::vector<Index> other;
    for (std::size_t a = 0; a < block.size(); ++a) {
        if (a != axis) {
            other.push_back(static_cast<Index>(a));
        }
    }
    std::vector<Index> idx(other.size(), 0);
    while (true) {
        Index base = 0;
        for (std::size_t k = 0; k < other.size(); ++k) {
            base += idx[k] * strides_[static_cast<std::size_t>(other[k])];
        }
        for (Index i = 0; i < n; ++i) {
            line[static_cast<std::size_t>(i)] = data[base + i * stride];
        }
        std::fill(out.begin(), out.end(), cplx(0.0));
        if (!inverse) {
            for (Index k = 0; k < half; ++k) {
                cplx lo = 0.0, hi = 0.0;
                for (std::size_t j = 0; j < kTaps; ++j) {
                    const cplx v = line[static_cast<std::size_t>((2 * k + static_cast<Index>(j)) % n)];
                    lo += kDb4Lowpass[j] * v;
                    hi += kDb4Highpass[j] * v;
                }
                out[static_cast<std::size_t>(k)] = lo;
                out[static_cast<std::size_t>(half + k)] = hi;
            }
        } else {
            for (Index k = 0; k < half; ++k) {
                const cplx lo = line[static_cast<std::size_t>(k)];
                const cplx hi = line[static_cast<std::size_t>(half + k)];
                for (std::size_t j = 0; j < kTaps; ++j) {
                    out[static_cast<std::size_t>((2 * k + static_cast<Index>(j)) % n)] +=
                        kDb4Lowpass[j] * lo + kDb4Highpass[j] * hi;
                }
            }
        }
        for (Index i = 0; i < n; ++i) {
            data[base + i * stride] = out[static_cast<std::size_t>(i)];
        }

        std::size_t k = other.size();
        while (k > 0) {
            --k;
            if (++idx[k] < block[static_cast<std::size_t>(other[k])]) {
                break;
            }
            idx[k] = 0;
            if (k == 0) {
                return;
            }
        }
        if (other.empty()) {
            return;
        }
    }
}

Vec Wavelet::forward(const Vec& x) const
{
    if (x.size() != size_) {
        throw ShapeError("wavelet forward: size mismatch");
    }
    Vec data = x;
    std::vector<Index> block = dims_;
    for (int l = 0; l < levels_; ++l) {
        for (std::size_t a = 0; a < block.size(); ++a) {
            transform_axis(data, block, a, false);
        }
        for (auto& b : block) {
            b /= 2;
        }
    }
    return data;
}

Vec Wavelet::adjoint(const Vec& c) const
{
    if (c.size() != size_) {
        throw ShapeError("wavelet adjoint: size mismatch");
    }
    Vec data = c;
    for (int l = levels_ - 1; l >= 0; --l) {
        std::vector<Index> block = dims_;
        for (auto& b : block) {
            b >>= l;
        }
        for (std::size_t a = block.size(); a-- > 0;) {
            transform_axis(data, block, a, true);
        }
    }
    return data;
}

Vec wavelet_forward(const Image& img, int levels)
{
    return Wavelet(img.shape.dims(), levels).forward(img.values);
}

Vec wavelet_adjoint(const GridShape& shape, const Vec& coeffs, int levels)
{
    return Wavelet(shape.dims(), levels).adjoint(coeffs);
}

LinOp wavelet_op(const GridShape& shape, int levels, LedgerPtr ledger)
{
    auto w = std::make_shared<const Wavelet>(shape.dims(), levels);
    return LinOp(
        shape.size(), shape.size(), [w](const Vec& x) { return w->forward(x); },
        [w](const Vec& c) { return w->adjoint(c); }, CostTags{0, 1}, std::move(ledger), "wavelet");
}

// ---------------------------------------------------------------------------

FiniteDiff::FiniteDiff(std::vector<Index> dims)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)), size_(product(dims_))
{
    if (dims_.empty()) {
        throw ShapeError("finite differences: empty grid");
    }
}

Vec FiniteDiff::forward(const Vec& x) const
{
    if (x.size() != size_) {
        throw ShapeError("finite difference forward: size mismatch");
    }
    Vec out(axes() * size_);
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        const Index n = dims_[a];
        const Index s = strides_[a];
        const Index off = static_cast<Index>(a) * size_;
        for (Index v = 0; v < size_; ++v) {
            const Index coord = (v / s) % n;
            const Index next = coord + 1 == n ? v - coord * s : v + s;
            out[off + v] = x[next] - x[v];
        }
    }
    return out;
}

Vec FiniteDiff::adjoint(const Vec& y) const
{
    if (y.size() != axes() * size_) {
        throw ShapeError("finite difference adjoint: size mismatch");
    }
    Vec out = Vec::Zero(size_);
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        const Index n = dims_[a];
        const Index s = strides_[a];
        const Index off = static_cast<Index>(a) * size_;
        for (Index v = 0; v < size_; ++v) {
            const Index coord = (v / s) % n;
            const Index prev = coord == 0 ? v + (n - 1) * s : v - s;
            out[v] += y[off + prev] - y[off + v];
        }
    }
    return out;
}

Vec finite_diff_forward(const Image& img)
{
    return FiniteDiff(img.shape.dims()).forward(img.values);
}

Vec finite_diff_adjoint(const GridShape& shape, const Vec& diffs)
{
    return FiniteDiff(shape.dims()).adjoint(diffs);
}

LinOp finite_diff_op(const GridShape& shape, LedgerPtr ledger)
{
    auto t = std::make_shared<const FiniteDiff>(shape.dims());
    return LinOp(
        shape.size(), shape.ndim() * shape.size(), [t](const Vec& x) { return t->forward(x); },
        [t](const Vec& y) { return t->adjoint(y); }, CostTags{0, 1}, std::move(ledger),
        "finite_diff");
}

// ---------------------------------------------------------------------------

double max_eig_power(const LinOp& op, int iters, std::uint64_t seed)
{
    if (op.in_dim() != op.out_dim()) {
        throw ShapeError("max_eig_power needs a square operator");
    }
    Rng rng = make_rng(seed, 0x9e);
    std::normal_distribution<double> n01;
    Vec v(op.in_dim());
    for (Index i = 0; i < v.size(); ++i) {
        v[i] = cplx(n01(rng), n01(rng));
    }
    v /= v.norm();
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vec w = op.forward(v);
        lambda = v.dot(w).real();
        const double nw = w.norm();
        if (nw == 0.0) {
            return 0.0;
        }
        v = w / nw;
    }
    return lambda;
}

}  // namespace coilsketch
