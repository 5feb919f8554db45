#ifndef SPP_STC_HPP
#define SPP_STC_HPP

#include <string>
#include <vector>

#include "spp/types.hpp"

namespace spp {

using BitVector = std::vector<std::uint8_t>;

// Syndrome-trellis code: the parity-check matrix H (msg_len x cover_len) is
// built by tiling sub_matrix along the diagonal, one copy per message bit,
// each copy one row below the previous, cropped at row msg_len.
struct StcCode {
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> sub_matrix;  // h x b, 0/1
    Index cover_len = 0;
    Index msg_len = 0;

    Index height() const { return sub_matrix.rows(); }
    Index width() const { return sub_matrix.cols(); }
};

// Throws UsageError unless 1 <= h <= 12, b == ceil(n/m), entries are 0/1 and
// the first row has a leading 1.
void validate(const StcCode& code);

// Column range of H covered by message bit k: blocks partition the n columns
// as evenly as possible, so every width is b or b-1.
struct ColumnSpan {
    Index begin;
    Index end;
};
ColumnSpan columnSpan(const StcCode& code, Index k);

// Deterministic default submatrix: first and last rows all ones, interior
// bits drawn from a fixed-seed generator. Configurable by supplying your own.
Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> defaultSubMatrix(Index h, Index b);

// Viterbi solver: returns stego bits with H*stego = message (mod 2) whose
// total flip cost (sum of costs[c] over bits that differ from cover_bits)
// is minimal over the coset. Throws AlgorithmError when no trellis path
// reaches the syndrome.
BitVector stcEmbedBinary(const BitVector& cover_bits, const Eigen::VectorXd& costs,
                         const BitVector& message, const StcCode& code);

// H * stego_bits mod 2.
BitVector stcExtractBinary(const BitVector& stego_bits, const StcCode& code);

// Two-layer ternary construction over +-1 changes. Layer 2 carries the first
// split of the message in the 2nd LSBs, layer 1 the rest in the 1st LSBs.
struct TernaryKey {
    StcCode layer2;
    StcCode layer1;
};

void validate(const TernaryKey& key);
TernaryKey makeKey(Index cover_len, Index msg_len2, Index msg_len1, Index h = 7);

// Parity of the two lowest bits, well defined for any integer value. For
// JPEG coefficients this equals the (value + 2048) convention since the
// offset is a multiple of 4.
inline unsigned parity4(std::int64_t v) {
    return static_cast<unsigned>(((v % 4) + 4) % 4);
}

// Embeds message (layer-2 bits followed by layer-1 bits) into the cover with
// per-pixel +-1 changes; costPlus/costMinus give the cost of +1/-1 at each
// pixel. Saturated pixels only move inward. Throws AlgorithmError when the
// message cannot be carried within these constraints.
GrayImage ternaryEmbed(const GrayImage& cover, const RealGrid& costPlus,
                       const RealGrid& costMinus, const BitVector& message,
                       const TernaryKey& key);

// Concatenation of H2*bit2(values) and H1*bit1(values); depends on the
// values only through their residues mod 4.
BitVector ternaryExtract(const IntGrid& values, const TernaryKey& key);
BitVector ternaryExtract(const GrayImage& image, const TernaryKey& key);
BitVector ternaryExtract(const JpegCoeffGrid& grid, const TernaryKey& key);

// True iff every delta entry is divisible by 4 and extraction is unchanged.
// The two conditions are cross-checked: divisibility must imply equality.
bool checkRobustness(const IntGrid& y, const IntGrid& delta, const TernaryKey& key);

// Structured-text key file (submatrix rows as bit strings).
void saveKey(const TernaryKey& key, const std::string& path);
TernaryKey loadKey(const std::string& path);

// Hex packing for CLI message transport, 4 bits per nibble, MSB first.
std::string bitsToHex(const BitVector& bits);
BitVector hexToBits(const std::string& hex, Index bit_count);

}  // namespace spp

#endif
