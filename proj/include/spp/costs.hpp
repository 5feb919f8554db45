#ifndef SPP_COSTS_HPP
#define SPP_COSTS_HPP

#include "spp/types.hpp"

namespace spp {

// Per-unit nonnegative modification costs; +1 and -1 may differ. Units that
// must never move carry kWetCost.
struct CostMap {
    RealGrid rho_plus;
    RealGrid rho_minus;
};

// Texture-adaptive spatial cost: reciprocal of a 3x3 high-pass response,
// smoothed by 3x3 and 15x15 averaging (symmetric padding). Kernels:
// KB = [-1 2 -1; 2 -4 2; -1 2 -1], averages are uniform boxes.
CostMap hillCost(const GrayImage& cover);

// JPEG cost: quant step divided by the dequantized AC energy of the block
// and its 8 neighbours.
CostMap uerdCost(const JpegCoeffGrid& cover);

// Ternary change probabilities p+/p- = exp(-lambda*rho)/Z solved so the total
// entropy matches target_bits within 1e-3 relative error.
struct EmbeddingPlan {
    RealGrid p_plus;
    RealGrid p_minus;
    double lambda = 0;
    double entropy_bits = 0;
    int iterations = 0;
};

EmbeddingPlan solveEmbeddingPlan(const RealGrid& rho_plus, const RealGrid& rho_minus,
                                 double target_bits);

// Payload-matched random +-1 embedding (the usual experimental stand-in for
// a real code). payload is bits per pixel; changes are sampled with the
// seeded generator, so equal seeds give bit-identical stegos.
GrayImage simulateEmbedding(const GrayImage& cover, const CostMap& costs, double payload,
                            std::uint64_t seed);

// JPEG variant: payload is bits per nonzero AC coefficient; DC and zero-AC
// units are wet.
JpegCoeffGrid simulateEmbedding(const JpegCoeffGrid& cover, const CostMap& costs, double payload,
                                std::uint64_t seed);

}  // namespace spp

#endif
