#pragma once

#include <memory>
#include <vector>

#include "coilsketch/core/linop.hpp"
#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// Unitary, DC-centered multidimensional DFT over a grid of any size.
///
/// X[k] = D^{-1/2} Σ_r x[r] exp(-i2π Σ_a k_a r_a / n_a), with k and r both
/// centered integer coordinates (index n/2 holds the origin). Immutable and
/// safe to share between threads.
class CenteredFFT {
public:
    explicit CenteredFFT(GridShape shape);
    ~CenteredFFT();
    CenteredFFT(const CenteredFFT&) = delete;
    CenteredFFT& operator=(const CenteredFFT&) = delete;

    [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }

    /// `in` and `out` each hold shape().size() values; they may alias.
    void forward(const cplx* in, cplx* out) const;
    void adjoint(const cplx* in, cplx* out) const;

    [[nodiscard]] Vec forward(const Vec& x) const;
    [[nodiscard]] Vec adjoint(const Vec& k) const;

private:
    void run(const cplx* in, cplx* out, bool inverse) const;

    GridShape shape_;
    std::vector<Index> shift_;  // flat index after ifftshift
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    double scale_ = 1.0;
};

Vec fft_centered(const Image& img);
Vec ifft_centered(const GridShape& shape, const Vec& k);

/// fft_centered as a LinOp (one coil transform per application).
LinOp fft_op(const GridShape& shape, LedgerPtr ledger = nullptr);

}  // namespace coilsketch
