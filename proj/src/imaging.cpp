#include "spp/imaging.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "spp/errors.hpp"

namespace spp {

namespace {

std::string readWholeFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failure on " + path);
    return std::move(buf).str();
}

[[noreturn]] void pgmFail(const std::string& path, std::size_t offset, const std::string& what) {
    throw FormatError(path + ": " + what + " at byte offset " + std::to_string(offset));
}

// Skips PNM whitespace and '#' comment lines, then parses one decimal token.
long parsePnmInt(const std::string& data, std::size_t& pos, const std::string& path) {
    for (;;) {
        while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        if (pos < data.size() && data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    if (pos >= data.size()) pgmFail(path, pos, "unexpected end of header");
    if (!std::isdigit(static_cast<unsigned char>(data[pos])))
        pgmFail(path, pos, "expected decimal integer");
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
        value = value * 10 + (data[pos] - '0');
        if (value > 1'000'000'000L) pgmFail(path, pos, "integer out of range");
        ++pos;
    }
    return value;
}

}  // namespace

GrayImage loadPgm(const std::string& path) {
    const std::string data = readWholeFile(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
        if (data.size() >= 2 && data[0] == 'P')
            pgmFail(path, 1, "unsupported PNM variant P" + std::string(1, data[1]) +
                                 " (only binary P5 is accepted)");
        pgmFail(path, 0, "missing P5 magic");
    }
    std::size_t pos = 2;
    const long width = parsePnmInt(data, pos, path);
    const long height = parsePnmInt(data, pos, path);
    const long maxval = parsePnmInt(data, pos, path);
    if (width <= 0 || height <= 0) pgmFail(path, pos, "non-positive dimensions");
    if (maxval != 255) pgmFail(path, pos, "maxval " + std::to_string(maxval) + " (must be 255)");
    // Exactly one whitespace byte separates the header from the payload.
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        pgmFail(path, pos, "missing whitespace before payload");
    ++pos;
    const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (data.size() - pos < need)
        pgmFail(path, data.size(), "truncated payload (expected " + std::to_string(need) +
                                       " bytes, got " + std::to_string(data.size() - pos) + ")");
    GrayImage image(height, width);
    for (Index i = 0; i < image.rows(); ++i)
        for (Index j = 0; j < image.cols(); ++j)
            image(i, j) = static_cast<std::uint8_t>(data[pos++]);
    return image;
}

void savePgm(const GrayImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (Index i = 0; i < image.rows(); ++i)
        out.write(reinterpret_cast<const char*>(image.row(i).data()),
                  static_cast<std::streamsize>(image.cols()));
    if (!out) throw IoError("write failure on " + path);
}

void validate(const JpegCoeffGrid& grid) {
    if (grid.rows() <= 0 || grid.cols() <= 0 || grid.rows() % 8 != 0 || grid.cols() % 8 != 0)
        throw FormatError("coefficient grid dimensions " + std::to_string(grid.rows()) + "x" +
                          std::to_string(grid.cols()) + " not positive multiples of 8");
    if ((grid.quant < 1).any()) throw FormatError("quantization entry < 1");
    if ((grid.coefficients.abs() > kCoeffLimit).any())
        throw FormatError("coefficient magnitude exceeds " + std::to_string(kCoeffLimit));
}

namespace {

[[noreturn]] void jcgFail(const std::string& path, int line, const std::string& what) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<long> parseIntLine(const std::string& text, const std::string& path, int lineNo) {
    std::vector<long> values;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            long v = std::stol(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            values.push_back(v);
        } catch (const std::exception&) {
            jcgFail(path, lineNo, "non-integer token '" + token + "'");
        }
    }
    return values;
}

}  // namespace

JpegCoeffGrid loadJcg(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    int lineNo = 0;

    if (!std::getline(in, line)) jcgFail(path, 1, "empty file");
    ++lineNo;
    std::istringstream header(line);
    std::string magic;
    long width = 0, height = 0;
    if (!(header >> magic >> width >> height) || magic != "JCG1")
        jcgFail(path, lineNo, "expected 'JCG1 <width> <height>'");
    if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0)
        jcgFail(path, lineNo, "dimensions " + std::to_string(width) + "x" +
                                  std::to_string(height) + " not positive multiples of 8");

    JpegCoeffGrid grid;
    grid.coefficients.resize(height, width);

    if (!std::getline(in, line)) jcgFail(path, lineNo + 1, "missing quant table");
    ++lineNo;
    const auto quant = parseIntLine(line, path, lineNo);
    if (quant.size() != 64) jcgFail(path, lineNo, "quant table needs 64 entries, got " +
                                                      std::to_string(quant.size()));
    for (int k = 0; k < 64; ++k) {
        if (quant[k] < 1) jcgFail(path, lineNo, "quant entry " + std::to_string(quant[k]) + " < 1");
        grid.quant(k / 8, k % 8) = static_cast<int>(quant[k]);
    }

    const Index blockRows = height / 8, blockCols = width / 8;
    for (Index br = 0; br < blockRows; ++br) {
        for (Index bc = 0; bc < blockCols; ++bc) {
            if (!std::getline(in, line))
                jcgFail(path, lineNo + 1, "missing block line (expected " +
                                              std::to_string(blockRows * blockCols) + " blocks)");
            ++lineNo;
            const auto coeffs = parseIntLine(line, path, lineNo);
            if (coeffs.size() != 64)
                jcgFail(path, lineNo, "block needs 64 coefficients, got " +
                                          std::to_string(coeffs.size()));
            for (int k = 0; k < 64; ++k) {
                if (std::abs(coeffs[k]) > kCoeffLimit)
                    jcgFail(path, lineNo, "coefficient " + std::to_string(coeffs[k]) +
                                              " exceeds magnitude " + std::to_string(kCoeffLimit));
                grid.coefficients(br * 8 + k / 8, bc * 8 + k % 8) = static_cast<int>(coeffs[k]);
            }
        }
    }
    return grid;
}

void saveJcg(const JpegCoeffGrid& grid, const std::string& path) {
    validate(grid);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "JCG1 " << grid.cols() << ' ' << grid.rows() << '\n';
    for (int k = 0; k < 64; ++k) out << grid.quant(k / 8, k % 8) << (k == 63 ? '\n' : ' ');
    for (Index br = 0; br < grid.blockRows(); ++br)
        for (Index bc = 0; bc < grid.blockCols(); ++bc)
            for (int k = 0; k < 64; ++k)
                out << grid.coefficients(br * 8 + k / 8, bc * 8 + k % 8)
                    << (k == 63 ? '\n' : ' ');
    if (!out) throw IoError("write failure on " + path);
}

const Block8& dctMatrix8() {
    static const Block8 c = [] {
        Block8 m;
        const double pi = std::acos(-1.0);
        for (int k = 0; k < 8; ++k) {
            const double alpha = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n) m(k, n) = alpha * std::cos(pi * (2 * n + 1) * k / 16.0);
        }
        return m;
    }();
    return c;
}

Block8 idctBlock(const Block8& block) {
    const Block8& c = dctMatrix8();
    return c.transpose() * block * c;
}

RealImage decompress(const JpegCoeffGrid& grid) {
    RealImage image(grid.rows(), grid.cols());
    const Eigen::Array<double, 8, 8> quant = grid.quant.cast<double>();
    for (Index br = 0; br < grid.blockRows(); ++br) {
        for (Index bc = 0; bc < grid.blockCols(); ++bc) {
            const Block8 dequant =
                (grid.coefficients.block<8, 8>(br * 8, bc * 8).cast<double>() * quant).matrix();
            image.block<8, 8>(br * 8, bc * 8) = idctBlock(dequant).array() + 128.0;
        }
    }
    return image;
}

}  // namespace spp
