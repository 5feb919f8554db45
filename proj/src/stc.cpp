#include "spp/stc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "spp/errors.hpp"

namespace spp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Index ceilDiv(Index a, Index b) { return (a + b - 1) / b; }

// Column c of the submatrix as an h-bit mask, bit r = row r.
std::uint32_t columnMask(const StcCode& code, Index c) {
    std::uint32_t mask = 0;
    for (Index r = 0; r < code.height(); ++r)
        if (code.sub_matrix(r, c)) mask |= 1u << r;
    return mask;
}

}  // namespace

void validate(const StcCode& code) {
    const Index h = code.height();
    if (h < 1 || h > 12) throw UsageError("submatrix height " + std::to_string(h) + " outside [1,12]");
    if (code.msg_len < 1 || code.cover_len < code.msg_len)
        throw UsageError("need 1 <= msg_len <= cover_len");
    if (code.width() != ceilDiv(code.cover_len, code.msg_len))
        throw UsageError("submatrix width " + std::to_string(code.width()) +
                         " != ceil(cover_len/msg_len)");
    if ((code.sub_matrix > 1).any()) throw UsageError("submatrix entries must be 0/1");
    if (code.sub_matrix(0, 0) != 1) throw UsageError("first row of submatrix must lead with 1");
}

ColumnSpan columnSpan(const StcCode& code, Index k) {
    return {k * code.cover_len / code.msg_len, (k + 1) * code.cover_len / code.msg_len};
}

Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> defaultSubMatrix(Index h, Index b) {
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> sub(h, b);
    std::mt19937_64 rng(0x53505043u + 131 * static_cast<std::uint64_t>(h));
    for (Index c = 0; c < b; ++c) {
        sub(0, c) = 1;
        if (h > 1) sub(h - 1, c) = 1;
        for (Index r = 1; r + 1 < h; ++r) sub(r, c) = static_cast<std::uint8_t>(rng() & 1);
    }
    return sub;
}

BitVector stcEmbedBinary(const BitVector& cover_bits, const Eigen::VectorXd& costs,
                         const BitVector& message, const StcCode& code) {
    validate(code);
    const Index n = code.cover_len, m = code.msg_len, h = code.height();
    if (static_cast<Index>(cover_bits.size()) != n) throw UsageError("cover length mismatch");
    if (static_cast<Index>(message.size()) != m) throw UsageError("message length mismatch");
    if (costs.size() != n) throw UsageError("cost length mismatch");
    for (Index c = 0; c < n; ++c)
        if (!std::isfinite(costs[c]) || costs[c] < 0.0)
            throw UsageError("costs must be finite and nonnegative");

    const std::uint32_t nstates = 1u << h;
    std::vector<double> cost(nstates, kInf);
    cost[0] = 0.0;

    // One decision bit per (column, state): 1 means the stego bit was 1.
    const std::size_t words = (static_cast<std::size_t>(n) * nstates + 63) / 64;
    std::vector<std::uint64_t> choice(words, 0);
    auto setChoice = [&](Index c, std::uint32_t s) {
        const std::size_t bit = static_cast<std::size_t>(c) * nstates + s;
        choice[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    };
    auto getChoice = [&](Index c, std::uint32_t s) -> bool {
        const std::size_t bit = static_cast<std::size_t>(c) * nstates + s;
        return (choice[bit >> 6] >> (bit & 63)) & 1;
    };

    std::vector<std::uint32_t> masks(code.width());
    for (Index j = 0; j < code.width(); ++j) masks[j] = columnMask(code, j);

    for (Index k = 0; k < m; ++k) {
        const auto span = columnSpan(code, k);
        // Rows beyond the last message bit are cropped away.
        const std::uint32_t crop = static_cast<std::uint32_t>((1u << std::min<Index>(h, m - k)) - 1);
        for (Index c = span.begin; c < span.end; ++c) {
            const std::uint32_t mask = masks[c - span.begin] & crop;
            const double w0 = cover_bits[c] ? costs[c] : 0.0;
            const double w1 = cover_bits[c] ? 0.0 : costs[c];
            if (mask == 0) {
                // Both stego values leave the state unchanged.
                const bool one = w1 < w0;
                const double add = one ? w1 : w0;
                for (std::uint32_t s = 0; s < nstates; ++s) {
                    if (cost[s] == kInf) continue;
                    cost[s] += add;
                    if (one) setChoice(c, s);
                }
                continue;
            }
            for (std::uint32_t s = 0; s < nstates; ++s) {
                const std::uint32_t t = s ^ mask;
                if (s > t) continue;  // each pair handled once
                const double a = cost[s], b = cost[t];
                const double s0 = a + w0, s1 = b + w1;
                const double t0 = b + w0, t1 = a + w1;
                if (s1 < s0) {
                    cost[s] = s1;
                    setChoice(c, s);
                } else {
                    cost[s] = s0;
                }
                if (t1 < t0) {
                    cost[t] = t1;
                    setChoice(c, t);
                } else {
                    cost[t] = t0;
                }
            }
        }
        // Syndrome bit k is complete: keep states matching the message bit,
        // then shift the window down one row.
        const std::uint32_t keep = message[k];
        bool any = false;
        for (std::uint32_t t = 0; t < nstates; ++t) {
            const std::uint32_t s = (t << 1) | keep;
            double v = kInf;
            if (s < nstates) v = cost[s];
            cost[t] = v;
            if (v < kInf) any = true;
        }
        if (!any) throw AlgorithmError("infeasible syndrome at message bit " + std::to_string(k));
    }

    // Backtrack from the empty window.
    BitVector stego(static_cast<std::size_t>(n), 0);
    std::uint32_t state = 0;
    for (Index k = m - 1; k >= 0; --k) {
        state = (state << 1) | message[k];
        const auto span = columnSpan(code, k);
        const std::uint32_t crop = static_cast<std::uint32_t>((1u << std::min<Index>(h, m - k)) - 1);
        for (Index c = span.end - 1; c >= span.begin; --c) {
            const bool one = getChoice(c, state);
            stego[static_cast<std::size_t>(c)] = one;
            if (one) state ^= masks[c - span.begin] & crop;
        }
    }
    return stego;
}

BitVector stcExtractBinary(const BitVector& stego_bits, const StcCode& code) {
    validate(code);
    if (static_cast<Index>(stego_bits.size()) != code.cover_len)
        throw UsageError("stego length mismatch");
    BitVector msg(static_cast<std::size_t>(code.msg_len), 0);
    for (Index k = 0; k < code.msg_len; ++k) {
        const auto span = columnSpan(code, k);
        const Index rows = std::min<Index>(code.height(), code.msg_len - k);
        for (Index c = span.begin; c < span.end; ++c) {
            if (!stego_bits[static_cast<std::size_t>(c)]) continue;
            for (Index r = 0; r < rows; ++r)
                msg[static_cast<std::size_t>(k + r)] ^= code.sub_matrix(r, c - span.begin);
        }
    }
    return msg;
}

void validate(const TernaryKey& key) {
    validate(key.layer2);
    validate(key.layer1);
    if (key.layer2.cover_len != key.layer1.cover_len)
        throw UsageError("layer cover lengths differ");
}

TernaryKey makeKey(Index cover_len, Index msg_len2, Index msg_len1, Index h) {
    TernaryKey key;
    key.layer2.cover_len = key.layer1.cover_len = cover_len;
    key.layer2.msg_len = msg_len2;
    key.layer1.msg_len = msg_len1;
    key.layer2.sub_matrix = defaultSubMatrix(h, ceilDiv(cover_len, msg_len2));
    key.layer1.sub_matrix = defaultSubMatrix(h, ceilDiv(cover_len, msg_len1));
    validate(key);
    return key;
}

namespace {

// Direction of the +-1 change that flips the 2nd LSB: +1 from odd values,
// -1 from even ones.
int flipDir2(int v) { return (v & 1) ? +1 : -1; }

struct UnitRange {
    int lo, hi;
};

GrayImage ternaryEmbedImpl(const GrayImage& cover, const RealGrid& costPlus,
                           const RealGrid& costMinus, const BitVector& message,
                           const TernaryKey& key) {
    const Index n = cover.size();
    const UnitRange range{0, 255};
    const Index m2 = key.layer2.msg_len, m1 = key.layer1.msg_len;
    if (static_cast<Index>(message.size()) != m2 + m1)
        throw UsageError("message length != layer2 + layer1 lengths");
    if (costPlus.rows() != cover.rows() || costPlus.cols() != cover.cols() ||
        costMinus.rows() != cover.rows() || costMinus.cols() != cover.cols())
        throw UsageError("cost map shape mismatch");

    const auto* px = cover.data();
    const auto* cp = costPlus.data();
    const auto* cm = costMinus.data();
    auto dirCost = [&](Index i, int d) -> double {
        const int v = px[i] + d;
        if (v < range.lo || v > range.hi) return kWetCost;
        return d > 0 ? cp[i] : cm[i];
    };

    // Layer 2: embed into the 2nd LSBs.
    BitVector cover2(static_cast<std::size_t>(n));
    Eigen::VectorXd cost2(n);
    for (Index i = 0; i < n; ++i) {
        cover2[i] = (px[i] >> 1) & 1;
        cost2[i] = dirCost(i, flipDir2(px[i]));
    }
    const BitVector msg2(message.begin(), message.begin() + m2);
    const BitVector z2 = stcEmbedBinary(cover2, cost2, msg2, key.layer2);

    // Layer 1: candidates are narrowed by the chosen 2nd LSBs.
    BitVector cover1(static_cast<std::size_t>(n));
    Eigen::VectorXd cost1(n);
    for (Index i = 0; i < n; ++i) {
        if (z2[i] != cover2[i]) {
            // Value forced to the bit2-flipping neighbour; no freedom left.
            const int v = px[i] + flipDir2(px[i]);
            if (v < range.lo || v > range.hi)
                throw AlgorithmError("layer 2 forced a saturated pixel");
            cover1[i] = v & 1;
            cost1[i] = kWetCost;
        } else {
            cover1[i] = px[i] & 1;
            cost1[i] = dirCost(i, -flipDir2(px[i]));
        }
    }
    const BitVector msg1(message.begin() + m2, message.end());
    const BitVector z1 = stcEmbedBinary(cover1, cost1, msg1, key.layer1);

    GrayImage stego = cover;
    auto* out = stego.data();
    for (Index i = 0; i < n; ++i) {
        const bool flip2 = z2[i] != cover2[i];
        const bool flip1 = z1[i] != cover1[i];
        if (flip2) {
            if (flip1) throw AlgorithmError("message infeasible within +-1 changes");
            out[i] = static_cast<std::uint8_t>(px[i] + flipDir2(px[i]));
        } else if (flip1) {
            const int v = px[i] - flipDir2(px[i]);
            if (v < range.lo || v > range.hi)
                throw AlgorithmError("message infeasible within +-1 changes");
            out[i] = static_cast<std::uint8_t>(v);
        }
    }
    return stego;
}

}  // namespace

GrayImage ternaryEmbed(const GrayImage& cover, const RealGrid& costPlus,
                       const RealGrid& costMinus, const BitVector& message,
                       const TernaryKey& key) {
    validate(key);
    if (key.layer2.cover_len != cover.size())
        throw UsageError("key cover length != pixel count");
    return ternaryEmbedImpl(cover, costPlus, costMinus, message, key);
}

BitVector ternaryExtract(const IntGrid& values, const TernaryKey& key) {
    validate(key);
    const Index n = values.size();
    if (key.layer2.cover_len != n) throw UsageError("key cover length != unit count");
    BitVector bits2(static_cast<std::size_t>(n)), bits1(static_cast<std::size_t>(n));
    const auto* v = values.data();
    for (Index i = 0; i < n; ++i) {
        const unsigned p = parity4(v[i]);
        bits1[i] = p & 1;
        bits2[i] = (p >> 1) & 1;
    }
    BitVector msg = stcExtractBinary(bits2, key.layer2);
    const BitVector msg1 = stcExtractBinary(bits1, key.layer1);
    msg.insert(msg.end(), msg1.begin(), msg1.end());
    return msg;
}

BitVector ternaryExtract(const GrayImage& image, const TernaryKey& key) {
    return ternaryExtract(toInt(image), key);
}

BitVector ternaryExtract(const JpegCoeffGrid& grid, const TernaryKey& key) {
    return ternaryExtract(grid.coefficients, key);
}

bool checkRobustness(const IntGrid& y, const IntGrid& delta, const TernaryKey& key) {
    if (y.rows() != delta.rows() || y.cols() != delta.cols())
        throw UsageError("shape mismatch between stego and modification matrix");
    const bool multiples = (delta.unaryExpr([](std::int32_t d) {
                                return std::int32_t(((d % 4) + 4) % 4);
                            }) == 0)
                               .all();
    const IntGrid modified = y + delta;
    const bool unchanged = ternaryExtract(y, key) == ternaryExtract(modified, key);
    if (multiples && !unchanged)
        throw std::logic_error("mod-4 modification changed the extracted message");
    return multiples && unchanged;
}

void saveKey(const TernaryKey& key, const std::string& path) {
    validate(key);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "TERNARYKEY1\n";
    out << "n " << key.layer2.cover_len << '\n';
    for (int layer = 2; layer >= 1; --layer) {
        const StcCode& code = layer == 2 ? key.layer2 : key.layer1;
        out << "layer" << layer << " m " << code.msg_len << " h " << code.height() << " b "
            << code.width() << '\n';
        for (Index r = 0; r < code.height(); ++r) {
            for (Index c = 0; c < code.width(); ++c) out << int(code.sub_matrix(r, c));
            out << '\n';
        }
    }
    if (!out) throw IoError("write failure on " + path);
}

namespace {

[[noreturn]] void keyFail(const std::string& path, int line, const std::string& what) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

TernaryKey loadKey(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    int lineNo = 0;
    auto next = [&]() -> std::string& {
        if (!std::getline(in, line)) keyFail(path, lineNo + 1, "unexpected end of file");
        ++lineNo;
        return line;
    };
    if (next() != "TERNARYKEY1") keyFail(path, lineNo, "expected TERNARYKEY1 header");
    Index n = 0;
    {
        std::istringstream is(next());
        std::string tag;
        if (!(is >> tag >> n) || tag != "n" || n < 1) keyFail(path, lineNo, "expected 'n <count>'");
    }
    TernaryKey key;
    for (int layer = 2; layer >= 1; --layer) {
        std::istringstream is(next());
        std::string tag, mt, ht, bt;
        Index m = 0, h = 0, b = 0;
        if (!(is >> tag >> mt >> m >> ht >> h >> bt >> b) ||
            tag != "layer" + std::to_string(layer) || mt != "m" || ht != "h" || bt != "b")
            keyFail(path, lineNo, "expected 'layer" + std::to_string(layer) + " m <m> h <h> b <b>'");
        StcCode code;
        code.cover_len = n;
        code.msg_len = m;
        code.sub_matrix.resize(h, b);
        for (Index r = 0; r < h; ++r) {
            const std::string& bits = next();
            if (static_cast<Index>(bits.size()) != b) keyFail(path, lineNo, "row needs " +
                                                                  std::to_string(b) + " bits");
            for (Index c = 0; c < b; ++c) {
                if (bits[c] != '0' && bits[c] != '1') keyFail(path, lineNo, "bits must be 0/1");
                code.sub_matrix(r, c) = bits[c] == '1';
            }
        }
        try {
            validate(code);
        } catch (const UsageError& e) {
            keyFail(path, lineNo, e.what());
        }
        (layer == 2 ? key.layer2 : key.layer1) = code;
    }
    validate(key);
    return key;
}

std::string bitsToHex(const BitVector& bits) {
    static const char* digits = "0123456789abcdef";
    std::string hex;
    hex.reserve((bits.size() + 3) / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned nibble = 0;
        for (std::size_t j = 0; j < 4; ++j)
            nibble = (nibble << 1) | (i + j < bits.size() ? bits[i + j] : 0);
        hex.push_back(digits[nibble]);
    }
    return hex;
}

BitVector hexToBits(const std::string& hex, Index bit_count) {
    if (static_cast<Index>(hex.size()) * 4 < bit_count)
        throw FormatError("hex string too short for " + std::to_string(bit_count) + " bits");
    BitVector bits(static_cast<std::size_t>(bit_count));
    for (Index i = 0; i < bit_count; ++i) {
        const char c = hex[static_cast<std::size_t>(i / 4)];
        unsigned nibble;
        if (c >= '0' && c <= '9') nibble = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') nibble = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') nibble = static_cast<unsigned>(c - 'A' + 10);
        else throw FormatError(std::string("invalid hex digit '") + c + "'");
        bits[static_cast<std::size_t>(i)] = (nibble >> (3 - i % 4)) & 1;
    }
    return bits;
}

}  // namespace spp
