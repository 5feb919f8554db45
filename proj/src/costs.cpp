#include "spp/costs.hpp"

#include <cmath>
#include <random>

#include "spp/errors.hpp"

namespace spp {

namespace {

// Symmetric (edge-duplicating) index reflection; valid while |i| < 2n.
inline Index reflect(Index i, Index n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - 1 - i;
    return i;
}

RealGrid correlate3Symmetric(const RealGrid& image, const Eigen::Matrix3d& kernel) {
    RealGrid out(image.rows(), image.cols());
    for (Index i = 0; i < image.rows(); ++i) {
        for (Index j = 0; j < image.cols(); ++j) {
            double acc = 0.0;
            for (Index a = 0; a < 3; ++a)
                for (Index b = 0; b < 3; ++b)
                    acc += kernel(a, b) *
                           image(reflect(i + a - 1, image.rows()), reflect(j + b - 1, image.cols()));
            out(i, j) = acc;
        }
    }
    return out;
}

// Box mean with symmetric padding, via an integral image over the padded grid.
RealGrid boxMeanSymmetric(const RealGrid& image, Index radius) {
    const Index rows = image.rows(), cols = image.cols();
    const Index pr = rows + 2 * radius, pc = cols + 2 * radius;
    RealGrid padded(pr, pc);
    for (Index i = 0; i < pr; ++i)
        for (Index j = 0; j < pc; ++j)
            padded(i, j) = image(reflect(i - radius, rows), reflect(j - radius, cols));
    // integral(i,j) = sum of padded[0..i) x [0..j)
    RealGrid integral = RealGrid::Zero(pr + 1, pc + 1);
    for (Index i = 0; i < pr; ++i)
        for (Index j = 0; j < pc; ++j)
            integral(i + 1, j + 1) =
                padded(i, j) + integral(i, j + 1) + integral(i + 1, j) - integral(i, j);
    const double inv = 1.0 / static_cast<double>((2 * radius + 1) * (2 * radius + 1));
    RealGrid out(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            out(i, j) = inv * (integral(i + 2 * radius + 1, j + 2 * radius + 1) -
                               integral(i, j + 2 * radius + 1) - integral(i + 2 * radius + 1, j) +
                               integral(i, j));
    return out;
}

}  // namespace

CostMap hillCost(const GrayImage& cover) {
    if (cover.rows() < 8 || cover.cols() < 8)
        throw UsageError("cover must be at least 8x8 for the 15x15 smoothing pass");
    Eigen::Matrix3d kb;
    kb << -1, 2, -1, 2, -4, 2, -1, 2, -1;
    const RealGrid response = correlate3Symmetric(toReal(cover), kb).abs();
    const RealGrid smoothed = boxMeanSymmetric(response, 1);
    const RealGrid inverted =
        smoothed.unaryExpr([](double v) { return std::min(1.0 / std::max(v, 1e-10), kWetCost); });
    RealGrid rho = boxMeanSymmetric(inverted, 7).min(kWetCost);
    CostMap map;
    map.rho_plus = rho;
    map.rho_minus = std::move(rho);
    return map;
}

CostMap uerdCost(const JpegCoeffGrid& cover) {
    const Index brs = cover.blockRows(), bcs = cover.blockCols();
    RealGrid energy(brs, bcs);
    for (Index br = 0; br < brs; ++br) {
        for (Index bc = 0; bc < bcs; ++bc) {
            double e = 0.0;
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v)
                    if (u || v)
                        e += std::abs(static_cast<double>(cover.coefficients(br * 8 + u, bc * 8 + v)) *
                                      cover.quant(u, v));
            energy(br, bc) = e;
        }
    }
    RealGrid rho(cover.rows(), cover.cols());
    for (Index br = 0; br < brs; ++br) {
        for (Index bc = 0; bc < bcs; ++bc) {
            double context = 0.0;
            for (Index a = -1; a <= 1; ++a)
                for (Index b = -1; b <= 1; ++b)
                    if (br + a >= 0 && br + a < brs && bc + b >= 0 && bc + b < bcs)
                        context += energy(br + a, bc + b);
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v)
                    rho(br * 8 + u, bc * 8 + v) =
                        context > 0.0 ? std::min(cover.quant(u, v) / context, kWetCost) : kWetCost;
        }
    }
    CostMap map;
    map.rho_plus = rho;
    map.rho_minus = std::move(rho);
    return map;
}

namespace {

inline double changeProb(double rho, double lambda, double z) {
    return std::exp(-lambda * rho) / z;
}

inline double entropyTerm(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

double totalEntropy(const RealGrid& rho_plus, const RealGrid& rho_minus, double lambda,
                    RealGrid* p_plus = nullptr, RealGrid* p_minus = nullptr) {
    const Index n = rho_plus.size();
    const double* rp = rho_plus.data();
    const double* rm = rho_minus.data();
    double bits = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double ep = std::exp(-lambda * rp[i]);
        const double em = std::exp(-lambda * rm[i]);
        const double z = 1.0 + ep + em;
        const double pp = ep / z, pm = em / z;
        bits += entropyTerm(pp) + entropyTerm(pm) + entropyTerm(1.0 - pp - pm);
        if (p_plus) p_plus->data()[i] = pp;
        if (p_minus) p_minus->data()[i] = pm;
    }
    return bits;
}

}  // namespace

EmbeddingPlan solveEmbeddingPlan(const RealGrid& rho_plus, const RealGrid& rho_minus,
                                 double target_bits) {
    if (rho_plus.rows() != rho_minus.rows() || rho_plus.cols() != rho_minus.cols())
        throw UsageError("cost map shape mismatch");
    if (!((rho_plus >= 0.0).all() && (rho_minus >= 0.0).all()))
        throw UsageError("costs must be nonnegative");
    if (target_bits <= 0.0) throw UsageError("target entropy must be positive");

    double lo = 1e-5, hi = 1e5;
    if (totalEntropy(rho_plus, rho_minus, lo) < target_bits)
        throw AlgorithmError("payload exceeds the entropy capacity of this cover");
    while (totalEntropy(rho_plus, rho_minus, hi) > target_bits && hi < 1e15) hi *= 2.0;

    EmbeddingPlan plan;
    plan.p_plus.resize(rho_plus.rows(), rho_plus.cols());
    plan.p_minus.resize(rho_plus.rows(), rho_plus.cols());
    double bits = 0.0, lambda = lo;
    for (int it = 0; it < 60; ++it) {
        lambda = 0.5 * (lo + hi);
        bits = totalEntropy(rho_plus, rho_minus, lambda);
        ++plan.iterations;
        if (std::abs(bits - target_bits) <= 1e-4 * target_bits) break;
        (bits > target_bits ? lo : hi) = lambda;
    }
    bits = totalEntropy(rho_plus, rho_minus, lambda, &plan.p_plus, &plan.p_minus);
    if (std::abs(bits - target_bits) > 1e-3 * target_bits)
        throw AlgorithmError("entropy solver failed to reach the requested payload");
    plan.lambda = lambda;
    plan.entropy_bits = bits;
    return plan;
}

namespace {

// Portable uniform double in [0,1) from raw engine output.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void validatePayload(double payload) {
    if (!(payload > 0.0) || payload > 1.58)
        throw UsageError("payload must be in (0, 1.58] bits per unit");
}

}  // namespace

GrayImage simulateEmbedding(const GrayImage& cover, const CostMap& costs, double payload,
                            std::uint64_t seed) {
    validatePayload(payload);
    if (costs.rho_plus.rows() != cover.rows() || costs.rho_plus.cols() != cover.cols())
        throw UsageError("cost map shape mismatch");
    const Index n = cover.size();

    // Saturated pixels cannot move outward: wet that direction.
    RealGrid rp = costs.rho_plus, rm = costs.rho_minus;
    for (Index i = 0; i < n; ++i) {
        if (cover.data()[i] == 255) rp.data()[i] = kWetCost;
        if (cover.data()[i] == 0) rm.data()[i] = kWetCost;
    }
    const EmbeddingPlan plan = solveEmbeddingPlan(rp, rm, payload * static_cast<double>(n));

    GrayImage stego = cover;
    std::mt19937_64 rng(seed);
    for (Index i = 0; i < n; ++i) {
        const double u = uniform01(rng);
        if (u < plan.p_plus.data()[i])
            stego.data()[i] = static_cast<std::uint8_t>(stego.data()[i] + 1);
        else if (u < plan.p_plus.data()[i] + plan.p_minus.data()[i])
            stego.data()[i] = static_cast<std::uint8_t>(stego.data()[i] - 1);
    }
    return stego;
}

JpegCoeffGrid simulateEmbedding(const JpegCoeffGrid& cover, const CostMap& costs, double payload,
                                std::uint64_t seed) {
    validatePayload(payload);
    if (costs.rho_plus.rows() != cover.rows() || costs.rho_plus.cols() != cover.cols())
        throw UsageError("cost map shape mismatch");
    const Index n = cover.coefficients.size();

    RealGrid rp = costs.rho_plus, rm = costs.rho_minus;
    Index nonzero_ac = 0;
    for (Index br = 0; br < cover.blockRows(); ++br)
        for (Index bc = 0; bc < cover.blockCols(); ++bc)
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v) {
                    const Index r = br * 8 + u, c = bc * 8 + v;
                    const int value = cover.coefficients(r, c);
                    const bool usable = (u || v) && value != 0;
                    if (usable) ++nonzero_ac;
                    else rp(r, c) = rm(r, c) = kWetCost;
                    if (value >= kCoeffLimit) rp(r, c) = kWetCost;
                    if (value <= -kCoeffLimit) rm(r, c) = kWetCost;
                }
    if (nonzero_ac == 0) throw AlgorithmError("cover has no nonzero AC coefficients");

    const EmbeddingPlan plan = solveEmbeddingPlan(rp, rm, payload * static_cast<double>(nonzero_ac));

    JpegCoeffGrid stego = cover;
    std::mt19937_64 rng(seed);
    for (Index i = 0; i < n; ++i) {
        const double u = uniform01(rng);
        if (u < plan.p_plus.data()[i]) stego.coefficients.data()[i] += 1;
        else if (u < plan.p_plus.data()[i] + plan.p_minus.data()[i]) stego.coefficients.data()[i] -= 1;
    }
    return stego;
}

}  // namespace spp
