#ifndef SPP_RESIDUAL_HPP
#define SPP_RESIDUAL_HPP

#include <vector>

#include "spp/adaptive_filters.hpp"
#include "spp/types.hpp"

namespace spp {

// One same-size residual map per kernel of the FilterSet that produced it.
struct ResidualStack {
    std::vector<RealGrid> maps;
};

// Same-size cross-correlation (kernels are not flipped) with zero padding
// outside the image.
ResidualStack residualStack(const RealGrid& image, const FilterSet& filters);
ResidualStack residualStack(const GrayImage& image, const FilterSet& filters);

// Sum over kernels of the elementwise L1 distances. Equivalent to the L1
// norm of the concatenated stacks. To measure distance on the SUM of the
// residual maps instead, run with summedKernelSet(filters).
double manhattanDistance(const ResidualStack& a, const ResidualStack& b);

// Collapses a set to one kernel (the center-aligned sum), so per-kernel code
// paths also cover the summed-maps residual convention.
FilterSet summedKernelSet(const FilterSet& set);

// In-place equivalent of recomputing the stack after image(i,j) += step;
// touches at most a w x w window per kernel. step must be a multiple of 4.
void updateSpatial(ResidualStack& stack, const FilterSet& filters, Index i, Index j, int step);

// Change in manhattanDistance(rz, rx) if updateSpatial(rz, ..., step) ran.
double deltaDistanceSpatial(const ResidualStack& rz, const ResidualStack& rx,
                            const FilterSet& filters, Index i, Index j, int step);

// JPEG analogue: the stack tracks decompress(grid); stepping coefficient
// (u,v) of block (br,bc) by `step` shifts an 8x8 spatial block by
// step*quant(u,v)*basis(u,v), touching (w+7)x(w+7) per kernel.
void updateJpeg(ResidualStack& stack, const FilterSet& filters,
                const Eigen::Array<int, 8, 8>& quant, Index br, Index bc, Index u, Index v,
                int step);

double deltaDistanceJpeg(const ResidualStack& rz, const ResidualStack& rx,
                         const FilterSet& filters, const Eigen::Array<int, 8, 8>& quant, Index br,
                         Index bc, Index u, Index v, int step);

}  // namespace spp

#endif
