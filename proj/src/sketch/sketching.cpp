#include "coilsketch/sketch/sketching.hpp"

#include "coilsketch/core/rng.hpp"

namespace coilsketch {

std::string to_string(SketchDistribution d)
{
    return d == SketchDistribution::gaussian ? "gaussian" : "rademacher";
}

SketchDistribution parse_distribution(const std::string& s)
{
    if (s == "gaussian") {
        return SketchDistribution::gaussian;
    }
    if (s == "rademacher") {
        return SketchDistribution::rademacher;
    }
    throw ParameterError("unknown sketch distribution '" + s + "'");
}

void SketchConfig::validate() const
{
    if (v < 0 || s < 0 || c_hat < 1 || v + s != c_hat) {
        throw ParameterError("sketch config needs V, S >= 0 and V + S = C_hat (got V=" +
                             std::to_string(v) + ", S=" + std::to_string(s) +
                             ", C_hat=" + std::to_string(c_hat) + ")");
    }
}

SketchMatrix gen_sketch_matrix(const SketchConfig& cfg, Index coils)
{
    cfg.validate();
    if (cfg.v > coils) {
        throw ParameterError("sketch: V exceeds the number of coils");
    }
    if (cfg.s > coils - cfg.v) {
        throw ParameterError("sketch: S exceeds the number of low-energy coils C - V");
    }
    SketchMatrix sk{RMat::Zero(cfg.c_hat, coils), cfg};
    for (Index i = 0; i < cfg.v; ++i) {
        sk.mat(i, i) = 1.0;
    }
    Rng rng = make_rng(cfg.seed, 0x5c);
    if (cfg.distribution == SketchDistribution::gaussian) {
        std::normal_distribution<double> g(0.0, 1.0 / static_cast<double>(std::max<Index>(cfg.s, 1)));
        for (Index r = 0; r < cfg.s; ++r) {
            for (Index c = cfg.v; c < coils; ++c) {
                sk.mat(cfg.v + r, c) = g(rng);
            }
        }
    } else {
        std::bernoulli_distribution coin(0.5);
        for (Index r = 0; r < cfg.s; ++r) {
            for (Index c = cfg.v; c < coils; ++c) {
                sk.mat(cfg.v + r, c) = coin(rng) ? 1.0 : -1.0;
            }
        }
    }
    return sk;
}

SensitivityMaps sketch_maps(const SensitivityMaps& maps, const SketchMatrix& sk)
{
    if (sk.cols() != maps.count()) {
        throw ShapeError("sketch has " + std::to_string(sk.cols()) + " columns but maps have " +
                         std::to_string(maps.count()) + " coils");
    }
    SensitivityMaps out{maps.shape, CMat(maps.coils.rows(), sk.rows())};
    // Column j = Σ_c S̃(j, c) c_c. Written as explicit sums so identity rows copy exactly.
    for (Index j = 0; j < sk.rows(); ++j) {
        auto col = out.coils.col(j);
        col.setZero();
        for (Index c = 0; c < sk.cols(); ++c) {
            const double s = sk.mat(j, c);
            if (s == 1.0) {
                col += maps.coils.col(c);
            } else if (s != 0.0) {
                col += s * maps.coils.col(c);
            }
        }
    }
    return out;
}

Vec sketch_data(const Vec& y, const SketchMatrix& sk, Index samples)
{
    if (y.size() != sk.cols() * samples) {
        throw ShapeError("sketch_data: data length does not match C x N");
    }
    const Eigen::Map<const CMat> k(y.data(), samples, sk.cols());
    const CMat out = k * sk.mat.transpose().cast<cplx>();
    return Eigen::Map<const Vec>(out.data(), out.size());
}

SenseOperator build_sketched_operator(const SenseOperator& op, const SketchMatrix& sk)
{
    if (op.weights() && !op.weights()->shared()) {
        throw ParameterError("sketching needs identical density weights for every coil");
    }
    return op.with_maps(sketch_maps(op.maps(), sk));
}

}  // namespace coilsketch
