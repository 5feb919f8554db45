#ifndef SPP_TYPES_HPP
#define SPP_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>

namespace spp {

// All grids are row-major so that scan order, file order and memory order agree.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PixelGrid = Grid<std::uint8_t>;
using IntGrid   = Grid<std::int32_t>;
using RealGrid  = Grid<double>;

using Index = Eigen::Index;

// Spatial-domain container. Pixel range [0,255] is carried by the storage type.
using GrayImage = PixelGrid;

// Unrounded, unclamped decompressed image (see imaging.hpp); keeps the
// coefficient -> residual pipeline linear.
using RealImage = RealGrid;

// Quantized DCT coefficient grid plus quantization table. Blocks are 8x8;
// coefficient (u,v) of block (br,bc) lives at (8*br+u, 8*bc+v).
struct JpegCoeffGrid {
    IntGrid coefficients;             // rows()/cols() divisible by 8
    Eigen::Array<int, 8, 8> quant;    // entries >= 1

    Index rows() const { return coefficients.rows(); }
    Index cols() const { return coefficients.cols(); }
    Index blockRows() const { return coefficients.rows() / 8; }
    Index blockCols() const { return coefficients.cols() / 8; }
};

// Largest admissible coefficient magnitude; the JPEG-domain analogue of [0,255].
inline constexpr int kCoeffLimit = 2048;

// Sentinel cost for units that must not be modified.
inline constexpr double kWetCost = 1e10;

inline RealGrid toReal(const GrayImage& image) {
    return image.cast<double>();
}

inline IntGrid toInt(const GrayImage& image) {
    return image.cast<std::int32_t>();
}

}  // namespace spp

#endif
