#pragma once

#include <random>

#include "coilsketch/core/rng.hpp"
#include "coilsketch/core/types.hpp"

namespace testutil {

inline coilsketch::Vec random_vec(coilsketch::Index n, std::uint64_t seed)
{
    coilsketch::Rng rng = coilsketch::make_rng(seed, 77);
    std::normal_distribution<double> g;
    coilsketch::Vec v(n);
    for (auto& e : v) {
        e = {g(rng), g(rng)};
    }
    return v;
}

inline double rel_err(const coilsketch::Vec& a, const coilsketch::Vec& b)
{
    const double ref = b.norm();
    return ref == 0.0 ? a.norm() : (a - b).norm() / ref;
}

}  // namespace testutil
