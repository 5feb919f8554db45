#ifndef SPP_IMAGING_HPP
#define SPP_IMAGING_HPP

#include <string>

#include "spp/types.hpp"

namespace spp {

// Binary PGM (P5, maxval 255). Whitespace and '#' comments are accepted in the
// header; anything else raises FormatError with the offending byte offset.
GrayImage loadPgm(const std::string& path);

// Canonical writer: "P5\n<w> <h>\n255\n" followed by row-major payload bytes.
// Two saves of the same image are byte-identical.
void savePgm(const GrayImage& image, const std::string& path);

// JCG text format:
//   line 1:  JCG1 <width> <height>          (pixel dimensions, divisible by 8)
//   line 2:  64 integers                    (quant table, row-major 8x8)
//   then one line of 64 integers per block, blocks row-major, coefficients
//   row-major within the block.
JpegCoeffGrid loadJcg(const std::string& path);
void saveJcg(const JpegCoeffGrid& grid, const std::string& path);

// Checks quant entries >= 1, |coefficient| <= kCoeffLimit, dims divisible by 8.
// Throws FormatError describing the first violation.
void validate(const JpegCoeffGrid& grid);

using Block8 = Eigen::Matrix<double, 8, 8>;

// Orthonormal (unitary) 8-point DCT-II matrix: row k holds
// alpha_k * cos(pi*(2n+1)*k/16) with alpha_0 = 1/sqrt(8), alpha_k = 1/2.
const Block8& dctMatrix8();

// Inverse transform of an already-dequantized 8x8 block under the orthonormal
// convention: x = C^T * X * C.
Block8 idctBlock(const Block8& block);

// Dequantize, inverse-transform and level-shift (+128) every block. No
// rounding, no clamping: decompress(a) - decompress(b) depends linearly on
// a - b, which the incremental residual update relies on.
RealImage decompress(const JpegCoeffGrid& grid);

}  // namespace spp

#endif
