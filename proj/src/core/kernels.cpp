#include "coilsketch/core/kernels.hpp"

#include <cmath>
#include <numbers>

namespace coilsketch::kernels {

PhaseTables make_phase_tables(const GridShape& shape, const RMat& points)
{
    PhaseTables t;
    t.shape = shape;
    t.samples = points.rows();
    t.scale = 1.0 / std::sqrt(static_cast<double>(shape.size()));
    t.table.resize(static_cast<std::size_t>(shape.ndim()));
    for (Index a = 0; a < shape.ndim(); ++a) {
        const Index n = shape[a];
        auto& tab = t.table[static_cast<std::size_t>(a)];
        tab.resize(static_cast<std::size_t>(t.samples * n));
        for (Index i = 0; i < t.samples; ++i) {
            const double f = points(i, a);
            for (Index j = 0; j < n; ++j) {
                const double phase = -2.0 * std::numbers::pi * f *
                                     static_cast<double>(centered_coord(j, n)) /
                                     static_cast<double>(n);
                tab[static_cast<std::size_t>(i * n + j)] = std::polar(1.0, phase);
            }
        }
    }
    return t;
}

namespace {

cplx forward_sample(const PhaseTables& t, const cplx* img, Index i)
{
    const auto& dims = t.shape.dims();
    if (dims.size() == 2) {
        const Index n0 = dims[0], n1 = dims[1];
        const cplx* e0 = t.table[0].data() + i * n0;
        const cplx* e1 = t.table[1].data() + i * n1;
        cplx acc = 0.0;
        for (Index r0 = 0; r0 < n0; ++r0) {
            const cplx* row = img + r0 * n1;
            cplx inner = 0.0;
            for (Index r1 = 0; r1 < n1; ++r1) {
                inner += e1[r1] * row[r1];
            }
            acc += e0[r0] * inner;
        }
        return acc * t.scale;
    }
    const Index n0 = dims[0], n1 = dims[1], n2 = dims[2];
    const cplx* e0 = t.table[0].data() + i * n0;
    const cplx* e1 = t.table[1].data() + i * n1;
    const cplx* e2 = t.table[2].data() + i * n2;
    cplx acc = 0.0;
    for (Index r0 = 0; r0 < n0; ++r0) {
        cplx mid = 0.0;
        for (Index r1 = 0; r1 < n1; ++r1) {
            const cplx* row = img + (r0 * n1 + r1) * n2;
            cplx inner = 0.0;
            for (Index r2 = 0; r2 < n2; ++r2) {
                inner += e2[r2] * row[r2];
            }
            mid += e1[r1] * inner;
        }
        acc += e0[r0] * mid;
    }
    return acc * t.scale;
}

// Accumulates the contribution of every sample into the r0-th slab of img.
void adjoint_slab(const PhaseTables& t, const cplx* ksp, cplx* img, Index r0)
{
    const auto& dims = t.shape.dims();
    const Index n0 = dims[0];
    const Index slab = t.shape.size() / n0;
    cplx* out = img + r0 * slab;
    for (Index v = 0; v < slab; ++v) {
        out[v] = 0.0;
    }
    if (dims.size() == 2) {
        const Index n1 = dims[1];
        for (Index i = 0; i < t.samples; ++i) {
            const cplx w = std::conj(t.table[0][static_cast<std::size_t>(i * n0 + r0)]) * ksp[i];
            const cplx* e1 = t.table[1].data() + i * n1;
            for (Index r1 = 0; r1 < n1; ++r1) {
                out[r1] += w * std::conj(e1[r1]);
            }
        }
    } else {
        const Index n1 = dims[1], n2 = dims[2];
        for (Index i = 0; i < t.samples; ++i) {
            const cplx w = std::conj(t.table[0][static_cast<std::size_t>(i * n0 + r0)]) * ksp[i];
            const cplx* e1 = t.table[1].data() + i * n1;
            const cplx* e2 = t.table[2].data() + i * n2;
            for (Index r1 = 0; r1 < n1; ++r1) {
                const cplx w1 = w * std::conj(e1[r1]);
                cplx* row = out + r1 * n2;
                for (Index r2 = 0; r2 < n2; ++r2) {
                    row[r2] += w1 * std::conj(e2[r2]);
                }
            }
        }
    }
    for (Index v = 0; v < slab; ++v) {
        out[v] *= t.scale;
    }
}

}  // namespace

void nudft_forward(const PhaseTables& t, const cplx* img, cplx* ksp, Exec exec)
{
    const Index n = t.samples;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Index i = 0; i < n; ++i) {
            ksp[i] = forward_sample(t, img, i);
        }
    } else {
        for (Index i = 0; i < n; ++i) {
            ksp[i] = forward_sample(t, img, i);
        }
    }
}

void nudft_adjoint(const PhaseTables& t, const cplx* ksp, cplx* img, Exec exec)
{
    const Index n0 = t.shape[0];
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Index r0 = 0; r0 < n0; ++r0) {
            adjoint_slab(t, ksp, img, r0);
        }
    } else {
        for (Index r0 = 0; r0 < n0; ++r0) {
            adjoint_slab(t, ksp, img, r0);
        }
    }
}

void grid_gather(const InterpTable& t, const cplx* grid, cplx* out, Exec exec)
{
    auto one = [&](Index i) {
        const Index base = i * t.taps;
        cplx acc = 0.0;
        for (Index j = 0; j < t.taps; ++j) {
            const auto k = static_cast<std::size_t>(base + j);
            acc += t.weight[k] * grid[t.index[k]];
        }
        out[i] = acc;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Index i = 0; i < t.samples; ++i) {
            one(i);
        }
    } else {
        for (Index i = 0; i < t.samples; ++i) {
            one(i);
        }
    }
}

void grid_scatter(const InterpTable& t, const cplx* in, cplx* grid)
{
    for (Index i = 0; i < t.samples; ++i) {
        const Index base = i * t.taps;
        const cplx v = in[i];
        for (Index j = 0; j < t.taps; ++j) {
            const auto k = static_cast<std::size_t>(base + j);
            grid[t.index[k]] += t.weight[k] * v;
        }
    }
}

}  // namespace coilsketch::kernels
