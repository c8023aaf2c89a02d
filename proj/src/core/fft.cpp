#include "coilsketch/core/fft.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace coilsketch {

namespace {

// FFTW's planner is not re-entrant; execution with fftw_execute_dft is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

std::vector<Index> centered_shift(const GridShape& shape)
{
    const Index n = shape.size();
    const Index nd = shape.ndim();
    std::vector<Index> shift(static_cast<std::size_t>(n));
    std::vector<Index> idx(static_cast<std::size_t>(nd), 0);
    for (Index flat = 0; flat < n; ++flat) {
        Index target = 0;
        for (Index a = 0; a < nd; ++a) {
            const Index len = shape[a];
            const Index moved = (idx[static_cast<std::size_t>(a)] - len / 2 + len) % len;
            target = target * len + moved;
        }
        shift[static_cast<std::size_t>(flat)] = target;
        for (Index a = nd - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < shape[a]) {
                break;
            }
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return shift;
}

}  // namespace

CenteredFFT::CenteredFFT(GridShape shape) : shape_(std::move(shape)), shift_(centered_shift(shape_))
{
    std::vector<int> n(shape_.dims().begin(), shape_.dims().end());
    std::vector<cplx> scratch(static_cast<std::size_t>(shape_.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    scale_ = 1.0 / std::sqrt(static_cast<double>(shape_.size()));
}

CenteredFFT::~CenteredFFT()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void CenteredFFT::run(const cplx* in, cplx* out, bool inverse) const
{
    const auto n = static_cast<std::size_t>(shape_.size());
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[static_cast<std::size_t>(shift_[i])] = in[i];
    }
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(static_cast<fftw_plan>(inverse ? plan_bwd_ : plan_fwd_), p, p);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = buf[static_cast<std::size_t>(shift_[i])] * scale_;
    }
}

void CenteredFFT::forward(const cplx* in, cplx* out) const { run(in, out, false); }
void CenteredFFT::adjoint(const cplx* in, cplx* out) const { run(in, out, true); }

Vec CenteredFFT::forward(const Vec& x) const
{
    if (x.size() != shape_.size()) {
        throw ShapeError("fft: input length does not match grid " + shape_.to_string());
    }
    Vec out(x.size());
    forward(x.data(), out.data());
    return out;
}

Vec CenteredFFT::adjoint(const Vec& k) const
{
    if (k.size() != shape_.size()) {
        throw ShapeError("ifft: input length does not match grid " + shape_.to_string());
    }
    Vec out(k.size());
    adjoint(k.data(), out.data());
    return out;
}

Vec fft_centered(const Image& img)
{
    if (img.values.size() != img.shape.size()) {
        throw ShapeError("fft_centered: image values do not match its shape");
    }
    return CenteredFFT(img.shape).forward(img.values);
}

Vec ifft_centered(const GridShape& shape, const Vec& k)
{
    return CenteredFFT(shape).adjoint(k);
}

LinOp fft_op(const GridShape& shape, LedgerPtr ledger)
{
    auto f = std::make_shared<const CenteredFFT>(shape);
    return LinOp(
        shape.size(), shape.size(), [f](const Vec& x) { return f->forward(x); },
        [f](const Vec& y) { return f->adjoint(y); }, CostTags{1, 0}, std::move(ledger), "fft");
}

}  // namespace coilsketch
