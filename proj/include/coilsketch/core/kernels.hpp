#pragma once

// Inner loops of the non-uniform Fourier transforms. Every kernel has a
// serial reference variant and an OpenMP variant; both visit the data in the
// same per-output order, so their results are bitwise identical.

#include <vector>

#include "coilsketch/core/types.hpp"

namespace coilsketch::kernels {

enum class Exec { serial, parallel };

/// Separable phase tables for direct evaluation of the non-uniform DFT.
/// table[a][i * n_a + j] = exp(-i2π f_{i,a} (j - n_a/2) / n_a).
struct PhaseTables {
    GridShape shape;
    Index samples = 0;
    std::vector<std::vector<cplx>> table;
    double scale = 1.0;  // D^{-1/2}
};

PhaseTables make_phase_tables(const GridShape& shape, const RMat& points);

void nudft_forward(const PhaseTables& t, const cplx* img, cplx* ksp, Exec exec);
void nudft_adjoint(const PhaseTables& t, const cplx* ksp, cplx* img, Exec exec);

/// Sparse interpolation matrix from an oversampled grid to the samples:
/// `taps` entries per sample, stored sample-major.
struct InterpTable {
    Index samples = 0;
    Index taps = 0;
    std::vector<Index> index;
    std::vector<double> weight;
};

/// out[i] = Σ_j weight[i,j] grid[index[i,j]]
void grid_gather(const InterpTable& t, const cplx* grid, cplx* out, Exec exec);
/// grid[index[i,j]] += weight[i,j] in[i]; scatter, so always serial.
void grid_scatter(const InterpTable& t, const cplx* in, cplx* grid);

}  // namespace coilsketch::kernels
