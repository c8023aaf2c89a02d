#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// Static cost of one forward or adjoint application, by label.
struct CostTags {
    std::int64_t coil_transforms = 0;   ///< per-coil (NU)FFTs
    std::int64_t sparse_transforms = 0; ///< wavelet / finite-difference applications

    CostTags& operator+=(const CostTags& o) noexcept
    {
        coil_transforms += o.coil_transforms;
        sparse_transforms += o.sparse_transforms;
        return *this;
    }
    friend CostTags operator+(CostTags a, const CostTags& b) noexcept { return a += b; }
    friend CostTags operator-(CostTags a, const CostTags& b) noexcept
    {
        a.coil_transforms -= b.coil_transforms;
        a.sparse_transforms -= b.sparse_transforms;
        return a;
    }
    bool operator==(const CostTags&) const = default;
};

/// Shared, thread-safe tally of operator applications.
class CostLedger {
public:
    void record(const CostTags& t) noexcept
    {
        coil_.fetch_add(t.coil_transforms, std::memory_order_relaxed);
        sparse_.fetch_add(t.sparse_transforms, std::memory_order_relaxed);
    }
    [[nodiscard]] CostTags snapshot() const noexcept
    {
        return {coil_.load(std::memory_order_relaxed), sparse_.load(std::memory_order_relaxed)};
    }
    void reset() noexcept
    {
        coil_ = 0;
        sparse_ = 0;
    }

private:
    std::atomic<std::int64_t> coil_{0};
    std::atomic<std::int64_t> sparse_{0};
};

using LedgerPtr = std::shared_ptr<CostLedger>;

/// Type-erased linear map C^in_dim -> C^out_dim with its adjoint.
///
/// Leaf operators record their CostTags into an optional ledger on every
/// application. Composite operators do not record themselves; their leaves do,
/// so counts add naturally.
class LinOp {
public:
    using Apply = std::function<Vec(const Vec&)>;

    LinOp() = default;
    LinOp(Index in_dim, Index out_dim, Apply forward, Apply adjoint, CostTags tags = {},
          LedgerPtr ledger = nullptr, std::string name = "op");

    [[nodiscard]] Index in_dim() const noexcept { return in_dim_; }
    [[nodiscard]] Index out_dim() const noexcept { return out_dim_; }
    [[nodiscard]] const CostTags& tags() const noexcept { return tags_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const LedgerPtr& ledger() const noexcept { return ledger_; }

    [[nodiscard]] Vec forward(const Vec& x) const;
    [[nodiscard]] Vec adjoint(const Vec& y) const;

    /// Same maps, recording into `ledger` (or nowhere when null).
    [[nodiscard]] LinOp with_ledger(LedgerPtr ledger) const;

    /// Adjoint as an operator in its own right.
    [[nodiscard]] LinOp hermitian() const;

private:
    Index in_dim_ = 0;
    Index out_dim_ = 0;
    Apply forward_;
    Apply adjoint_;
    CostTags tags_;
    LedgerPtr ledger_;
    std::string name_;
};

LinOp identity_op(Index n);
LinOp zero_op(Index in_dim, Index out_dim);
LinOp diag_op(Vec diag);
LinOp scale_op(const LinOp& a, cplx s);
/// a ∘ b (apply b first).
LinOp compose(const LinOp& a, const LinOp& b);
/// [a; b]: stacks outputs of two operators sharing an input.
LinOp vstack(const LinOp& a, const LinOp& b);
/// AᴴA (+ shift·I) as a self-adjoint operator.
LinOp normal_op(const LinOp& a, double shift = 0.0);
/// Dense matrix as an operator; mostly for tests and oracles.
LinOp dense_op(CMat m);

/// max |⟨Au, v⟩ − ⟨u, Aᴴv⟩| / (‖u‖‖v‖) over `draws` random pairs.
double adjointness_error(const LinOp& a, int draws, std::uint64_t seed);

}  // namespace coilsketch
