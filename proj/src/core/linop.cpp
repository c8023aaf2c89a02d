#include "coilsketch/core/linop.hpp"

#include <algorithm>
#include <cmath>

#include "coilsketch/core/rng.hpp"

namespace coilsketch {

LinOp::LinOp(Index in_dim, Index out_dim, Apply forward, Apply adjoint, CostTags tags,
             LedgerPtr ledger, std::string name)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      tags_(tags),
      ledger_(std::move(ledger)),
      name_(std::move(name))
{
}

Vec LinOp::forward(const Vec& x) const
{
    if (x.size() != in_dim_) {
        throw ShapeError(name_ + ": forward input has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(in_dim_));
    }
    if (ledger_) {
        ledger_->record(tags_);
    }
    return forward_(x);
}

Vec LinOp::adjoint(const Vec& y) const
{
    if (y.size() != out_dim_) {
        throw ShapeError(name_ + ": adjoint input has length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(out_dim_));
    }
    if (ledger_) {
        ledger_->record(tags_);
    }
    return adjoint_(y);
}

LinOp LinOp::with_ledger(LedgerPtr ledger) const
{
    LinOp copy = *this;
    copy.ledger_ = std::move(ledger);
    return copy;
}

LinOp LinOp::hermitian() const
{
    auto self = std::make_shared<const LinOp>(*this);
    return LinOp(
        out_dim_, in_dim_, [self](const Vec& y) { return self->adjoint(y); },
        [self](const Vec& x) { return self->forward(x); }, tags_, nullptr, name_ + "^H");
}

LinOp identity_op(Index n)
{
    return LinOp(
        n, n, [](const Vec& x) { return x; }, [](const Vec& y) { return y; }, {}, nullptr,
        "identity");
}

LinOp zero_op(Index in_dim, Index out_dim)
{
    return LinOp(
        in_dim, out_dim, [out_dim](const Vec&) { return Vec(Vec::Zero(out_dim)); },
        [in_dim](const Vec&) { return Vec(Vec::Zero(in_dim)); }, {}, nullptr, "zero");
}

LinOp diag_op(Vec diag)
{
    const Index n = diag.size();
    auto d = std::make_shared<const Vec>(std::move(diag));
    return LinOp(
        n, n, [d](const Vec& x) { return Vec(d->cwiseProduct(x)); },
        [d](const Vec& y) { return Vec(d->conjugate().cwiseProduct(y)); }, {}, nullptr, "diag");
}

LinOp scale_op(const LinOp& a, cplx s)
{
    auto inner = std::make_shared<const LinOp>(a);
    return LinOp(
        a.in_dim(), a.out_dim(), [inner, s](const Vec& x) { return Vec(s * inner->forward(x)); },
        [inner, s](const Vec& y) { return Vec(std::conj(s) * inner->adjoint(y)); }, a.tags(),
        nullptr, "scaled(" + a.name() + ")");
}

LinOp compose(const LinOp& a, const LinOp& b)
{
    if (a.in_dim() != b.out_dim()) {
        throw ShapeError("compose: " + a.name() + " takes " + std::to_string(a.in_dim()) +
                         " but " + b.name() + " yields " + std::to_string(b.out_dim()));
    }
    auto pa = std::make_shared<const LinOp>(a);
    auto pb = std::make_shared<const LinOp>(b);
    return LinOp(
        b.in_dim(), a.out_dim(), [pa, pb](const Vec& x) { return pa->forward(pb->forward(x)); },
        [pa, pb](const Vec& y) { return pb->adjoint(pa->adjoint(y)); }, a.tags() + b.tags(),
        nullptr, a.name() + "*" + b.name());
}

LinOp vstack(const LinOp& a, const LinOp& b)
{
    if (a.in_dim() != b.in_dim()) {
        throw ShapeError("vstack: input dimensions differ");
    }
    auto pa = std::make_shared<const LinOp>(a);
    auto pb = std::make_shared<const LinOp>(b);
    const Index na = a.out_dim();
    const Index nb = b.out_dim();
    return LinOp(
        a.in_dim(), na + nb,
        [pa, pb, na, nb](const Vec& x) {
            Vec out(na + nb);
            out.head(na) = pa->forward(x);
            out.tail(nb) = pb->forward(x);
            return out;
        },
        [pa, pb, na, nb](const Vec& y) {
            return Vec(pa->adjoint(y.head(na)) + pb->adjoint(y.tail(nb)));
        },
        a.tags() + b.tags(), nullptr, "[" + a.name() + ";" + b.name() + "]");
}

LinOp normal_op(const LinOp& a, double shift)
{
    auto pa = std::make_shared<const LinOp>(a);
    auto apply = [pa, shift](const Vec& x) {
        Vec out = pa->adjoint(pa->forward(x));
        if (shift != 0.0) {
            out += shift * x;
        }
        return out;
    };
    CostTags t = a.tags();
    t += a.tags();
    return LinOp(a.in_dim(), a.in_dim(), apply, apply, t, nullptr, "normal(" + a.name() + ")");
}

LinOp dense_op(CMat m)
{
    auto pm = std::make_shared<const CMat>(std::move(m));
    return LinOp(
        pm->cols(), pm->rows(), [pm](const Vec& x) { return Vec(*pm * x); },
        [pm](const Vec& y) { return Vec(pm->adjoint() * y); }, {}, nullptr, "dense");
}

double adjointness_error(const LinOp& a, int draws, std::uint64_t seed)
{
    Rng rng = make_rng(seed, 0xad1);
    std::normal_distribution<double> n01;
    auto draw = [&](Index n) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) {
            v[i] = cplx(n01(rng), n01(rng));
        }
        return v;
    };
    double worst = 0.0;
    for (int k = 0; k < draws; ++k) {
        const Vec u = draw(a.in_dim());
        const Vec v = draw(a.out_dim());
        const cplx lhs = a.forward(u).dot(v);   // ⟨Au, v⟩ with conjugation on the left
        const cplx rhs = u.dot(a.adjoint(v));   // ⟨u, Aᴴv⟩
        worst = std::max(worst, std::abs(lhs - rhs) / (u.norm() * v.norm()));
    }
    return worst;
}

}  // namespace coilsketch
