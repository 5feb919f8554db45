// Shared test helpers: deterministic synthetic inputs and independent
// brute-force oracles. Everything here recomputes results from first
// principles; nothing reuses the library's fast paths.
#ifndef SPP_TESTS_SUPPORT_HPP
#define SPP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "spp/imaging.hpp"
#include "spp/stc.hpp"
#include "spp/types.hpp"

namespace spp::testing {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline GrayImage randomImage(Index rows, Index cols, std::mt19937_64& rng) {
    GrayImage image(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            image(i, j) = static_cast<std::uint8_t>(rng() % 256);
    return image;
}

// Natural-looking cover: smooth low-frequency content, a couple of brightness
// edges, compact high-variance texture patches and weak sensor noise. The
// patches make adaptive costs concentrate embedding changes the way textured
// photographs do.
inline GrayImage syntheticCover(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double pi = std::acos(-1.0);
    RealGrid img = RealGrid::Zero(rows, cols);

    for (int k = 0; k < 5; ++k) {
        const double fi = 0.02 * (2.0 * uniform01(rng) - 1.0);
        const double fj = 0.02 * (2.0 * uniform01(rng) - 1.0);
        const double phase = 2.0 * pi * uniform01(rng);
        const double amp = 10.0 + 25.0 * uniform01(rng);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                img(i, j) += amp * std::cos(2.0 * pi * (fi * i + fj * j) + phase);
    }
    for (int k = 0; k < 2; ++k) {
        const double nx = 2.0 * uniform01(rng) - 1.0, ny = 2.0 * uniform01(rng) - 1.0;
        const double c = nx * rows * uniform01(rng) + ny * cols * uniform01(rng);
        const double shift = 20.0 + 40.0 * uniform01(rng);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                if (nx * i + ny * j > c) img(i, j) += shift;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int blobs = 3 + static_cast<int>(rng() % 3);
    const double meanRadius = std::sqrt(0.15 * rows * cols / (pi * blobs));
    for (int k = 0; k < blobs; ++k) {
        const double ci = rows * uniform01(rng), cj = cols * uniform01(rng);
        const double ri = meanRadius * (0.7 + 0.6 * uniform01(rng));
        const double rj = meanRadius * (0.7 + 0.6 * uniform01(rng));
        const double sigma = 30.0 + 30.0 * uniform01(rng);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) {
                const double di = (i - ci) / ri, dj = (j - cj) / rj;
                if (di * di + dj * dj < 1.0) img(i, j) += sigma * gauss(rng);
            }
    }
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) img(i, j) += 1.2 * gauss(rng);

    GrayImage out(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            out(i, j) =
                static_cast<std::uint8_t>(std::clamp(img(i, j) + 128.0, 0.0, 255.0) + 0.5);
    return out;
}

inline BitVector randomBits(Index count, std::mt19937_64& rng) {
    BitVector bits(static_cast<std::size_t>(count));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    return bits;
}

// ---- convolution oracle -------------------------------------------------

// Same-size cross-correlation with zero padding, straight from the formula.
inline RealGrid naiveCorrelate(const RealGrid& image, const Eigen::MatrixXd& kernel) {
    const Index ca = (kernel.rows() - 1) / 2, cb = (kernel.cols() - 1) / 2;
    RealGrid out = RealGrid::Zero(image.rows(), image.cols());
    for (Index i = 0; i < image.rows(); ++i)
        for (Index j = 0; j < image.cols(); ++j) {
            double acc = 0.0;
            for (Index a = 0; a < kernel.rows(); ++a)
                for (Index b = 0; b < kernel.cols(); ++b) {
                    const Index r = i + a - ca, c = j + b - cb;
                    if (r >= 0 && r < image.rows() && c >= 0 && c < image.cols())
                        acc += kernel(a, b) * image(r, c);
                }
            out(i, j) = acc;
        }
    return out;
}

// ---- DCT oracles ---------------------------------------------------------

// Direct O(N^4) orthonormal transforms.
inline Block8 naiveDct8(const Block8& x) {
    const double pi = std::acos(-1.0);
    Block8 out;
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            const double au = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            const double av = v == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            double acc = 0.0;
            for (int p = 0; p < 8; ++p)
                for (int q = 0; q < 8; ++q)
                    acc += x(p, q) * std::cos(pi * (2 * p + 1) * u / 16.0) *
                           std::cos(pi * (2 * q + 1) * v / 16.0);
            out(u, v) = au * av * acc;
        }
    return out;
}

inline Block8 naiveIdct8(const Block8& X) {
    const double pi = std::acos(-1.0);
    Block8 out;
    for (int p = 0; p < 8; ++p)
        for (int q = 0; q < 8; ++q) {
            double acc = 0.0;
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v) {
                    const double au = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
                    const double av = v == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
                    acc += au * av * X(u, v) * std::cos(pi * (2 * p + 1) * u / 16.0) *
                           std::cos(pi * (2 * q + 1) * v / 16.0);
                }
            out(p, q) = acc;
        }
    return out;
}

// The classic luminance table scaled by quality, as JPEG encoders do it.
inline Eigen::Array<int, 8, 8> quantTable(int quality) {
    static const int base[64] = {16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,
                                 58, 60, 55, 14, 13,  16,  24,  40,  57, 69, 56, 14, 17,
                                 22, 29, 51, 87, 80,  62,  18,  22,  37, 56, 68, 109, 103,
                                 77, 24, 35, 55, 64,  81,  104, 113, 92, 49, 64, 78, 87,
                                 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    Eigen::Array<int, 8, 8> table;
    for (int k = 0; k < 64; ++k)
        table(k / 8, k % 8) = std::clamp((base[k] * scale + 50) / 100, 1, 255);
    return table;
}

// Compress a spatial image into a coefficient grid with the oracle DCT.
inline JpegCoeffGrid gridFromImage(const GrayImage& image, const Eigen::Array<int, 8, 8>& quant) {
    JpegCoeffGrid grid;
    grid.quant = quant;
    grid.coefficients.resize(image.rows() - image.rows() % 8, image.cols() - image.cols() % 8);
    for (Index br = 0; br * 8 < grid.coefficients.rows(); ++br)
        for (Index bc = 0; bc * 8 < grid.coefficients.cols(); ++bc) {
            Block8 block;
            for (int p = 0; p < 8; ++p)
                for (int q = 0; q < 8; ++q)
                    block(p, q) = static_cast<double>(image(br * 8 + p, bc * 8 + q)) - 128.0;
            const Block8 dct = naiveDct8(block);
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v) {
                    const double q = quant(u, v);
                    const int c = static_cast<int>(std::lround(dct(u, v) / q));
                    grid.coefficients(br * 8 + u, bc * 8 + v) =
                        std::clamp(c, -kCoeffLimit, kCoeffLimit);
                }
        }
    return grid;
}

inline JpegCoeffGrid syntheticJpegCover(Index rows, Index cols, std::uint64_t seed,
                                        int quality = 75) {
    return gridFromImage(syntheticCover(rows, cols, seed), quantTable(quality));
}

// ---- STC oracles ---------------------------------------------------------

// The parity-check matrix materialized from the documented tiling rule:
// copy k of the submatrix starts at row k and covers the even-partition
// column range [k*n/m, (k+1)*n/m), cropped at row m.
inline Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> denseParityMatrix(
    const StcCode& code) {
    const Index n = code.cover_len, m = code.msg_len;
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> h =
        Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, n);
    for (Index k = 0; k < m; ++k) {
        const Index begin = k * n / m, end = (k + 1) * n / m;
        for (Index c = begin; c < end; ++c)
            for (Index r = 0; r < code.height() && k + r < m; ++r)
                h(k + r, c) = code.sub_matrix(r, c - begin);
    }
    return h;
}

inline BitVector denseSyndrome(
    const Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& h, const BitVector& z) {
    BitVector msg(static_cast<std::size_t>(h.rows()), 0);
    for (Index r = 0; r < h.rows(); ++r) {
        unsigned acc = 0;
        for (Index c = 0; c < h.cols(); ++c) acc ^= h(r, c) & z[static_cast<std::size_t>(c)];
        msg[static_cast<std::size_t>(r)] = static_cast<std::uint8_t>(acc);
    }
    return msg;
}

// Minimum flip cost over the whole coset by Gray-code enumeration (n <= 24).
// Returns +inf when the coset is empty.
inline double bruteForceCosetMin(const BitVector& cover, const Eigen::VectorXd& costs,
                                 const BitVector& message, const StcCode& code) {
    const Index n = code.cover_len, m = code.msg_len;
    const auto h = denseParityMatrix(code);
    std::vector<std::uint32_t> colSyndrome(static_cast<std::size_t>(n), 0);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < m; ++r)
            if (h(r, c)) colSyndrome[static_cast<std::size_t>(c)] |= 1u << r;
    std::uint32_t target = 0;
    for (Index r = 0; r < m; ++r)
        if (message[static_cast<std::size_t>(r)]) target |= 1u << r;

    // Start from the all-zero stego vector and walk in Gray order.
    std::uint32_t syndrome = 0;
    double cost = 0.0;
    for (Index c = 0; c < n; ++c)
        if (cover[static_cast<std::size_t>(c)]) cost += costs[c];
    double best = std::numeric_limits<double>::infinity();
    if (syndrome == target) best = cost;
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t gray = 0;
    for (std::uint64_t i = 1; i < total; ++i) {
        const std::uint64_t next = i ^ (i >> 1);
        const int bit = std::countr_zero(gray ^ next);
        const bool nowSet = (next >> bit) & 1;
        gray = next;
        syndrome ^= colSyndrome[static_cast<std::size_t>(bit)];
        // flipping stego bit `bit` toggles whether it differs from the cover
        const bool differs = nowSet != (cover[static_cast<std::size_t>(bit)] != 0);
        cost += differs ? costs[bit] : -costs[bit];
        if (syndrome == target && cost < best) best = cost;
    }
    return best;
}

}  // namespace spp::testing

#endif
