#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "spp/errors.hpp"
#include "spp/imaging.hpp"
#include "support.hpp"

using namespace spp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("spp_imaging_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void writeBytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

std::string readBytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("pgm: 2x2 payload bytes map directly to pixels") {
    TempDir tmp;
    const std::string p = tmp.file("a.pgm");
    writeBytes(p, std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x07');
    const GrayImage img = loadPgm(p);
    REQUIRE(img.rows() == 2);
    REQUIRE(img.cols() == 2);
    CHECK(img(0, 0) == 0);
    CHECK(img(0, 1) == 255);
    CHECK(img(1, 0) == 128);
    CHECK(img(1, 1) == 7);
}

TEST_CASE("pgm: ASCII P2 rejected, errors name the byte offset") {
    TempDir tmp;
    const std::string p = tmp.file("a.pgm");
    writeBytes(p, "P2\n2 2\n255\n0 1 2 3\n");
    CHECK_THROWS_AS(loadPgm(p), FormatError);

    writeBytes(p, "P5\n2 2\n254\n    ");
    CHECK_THROWS_WITH_AS(loadPgm(p), doctest::Contains("byte offset"), FormatError);

    writeBytes(p, std::string("P5\n4 4\n255\n") + "abc");  // 3 of 16 payload bytes
    CHECK_THROWS_AS(loadPgm(p), FormatError);
}

TEST_CASE("pgm: header comments are skipped") {
    TempDir tmp;
    const std::string p = tmp.file("a.pgm");
    writeBytes(p, std::string("P5\n# width and height\n1 1\n255\n") + '\x2a');
    CHECK(loadPgm(p)(0, 0) == 42);
}

TEST_CASE("pgm: single pixel writes the exact canonical bytes") {
    TempDir tmp;
    const std::string p = tmp.file("one.pgm");
    GrayImage img(1, 1);
    img(0, 0) = 0;
    savePgm(img, p);
    const std::string bytes = readBytes(p);
    CHECK(bytes == std::string("P5\n1 1\n255\n") + '\x00');
    CHECK(bytes.back() == '\x00');
}

TEST_CASE("pgm: save/load round trip is lossless and byte-stable") {
    TempDir tmp;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Index rows = 1 + static_cast<Index>(rng() % 40);
        const Index cols = 1 + static_cast<Index>(rng() % 40);
        const GrayImage img = testing::randomImage(rows, cols, rng);
        const std::string p1 = tmp.file("r1.pgm"), p2 = tmp.file("r2.pgm");
        savePgm(img, p1);
        const GrayImage back = loadPgm(p1);
        REQUIRE((back == img).all());
        savePgm(back, p2);
        CHECK(readBytes(p1) == readBytes(p2));
    }
}

TEST_CASE("jcg: one block with unit quant") {
    TempDir tmp;
    const std::string p = tmp.file("g.jcg");
    std::string text = "JCG1 8 8\n";
    for (int k = 0; k < 64; ++k) text += k ? " 1" : "1";
    text += "\n";
    for (int k = 0; k < 64; ++k) text += k ? " 0" : "8";
    text += "\n";
    writeBytes(p, text);
    const JpegCoeffGrid grid = loadJcg(p);
    CHECK(grid.blockRows() == 1);
    CHECK(grid.blockCols() == 1);
    CHECK(grid.coefficients(0, 0) == 8);
    CHECK(grid.coefficients.abs().sum() == 8);
    CHECK((grid.quant == 1).all());
}

TEST_CASE("jcg: height not divisible by 8 is a format error with a line number") {
    TempDir tmp;
    const std::string p = tmp.file("bad.jcg");
    writeBytes(p, "JCG1 8 12\n");
    CHECK_THROWS_WITH_AS(loadJcg(p), doctest::Contains(":1:"), FormatError);

    writeBytes(p, "JCG1 8 8\n1 1 x\n");
    CHECK_THROWS_WITH_AS(loadJcg(p), doctest::Contains(":2:"), FormatError);
}

TEST_CASE("jcg: quant below 1 rejected") {
    TempDir tmp;
    const std::string p = tmp.file("bad.jcg");
    std::string text = "JCG1 8 8\n0";
    for (int k = 1; k < 64; ++k) text += " 1";
    text += "\n";
    writeBytes(p, text);
    CHECK_THROWS_AS(loadJcg(p), FormatError);
}

TEST_CASE("jcg: save/load identity on random grids") {
    TempDir tmp;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        JpegCoeffGrid grid;
        const Index br = 1 + static_cast<Index>(rng() % 4);
        const Index bc = 1 + static_cast<Index>(rng() % 4);
        grid.coefficients.resize(br * 8, bc * 8);
        for (Index i = 0; i < grid.rows(); ++i)
            for (Index j = 0; j < grid.cols(); ++j)
                grid.coefficients(i, j) = static_cast<int>(rng() % 4097) - 2048;
        for (int k = 0; k < 64; ++k) grid.quant(k / 8, k % 8) = 1 + static_cast<int>(rng() % 120);
        const std::string p1 = tmp.file("g1.jcg"), p2 = tmp.file("g2.jcg");
        saveJcg(grid, p1);
        const JpegCoeffGrid back = loadJcg(p1);
        REQUIRE((back.coefficients == grid.coefficients).all());
        REQUIRE((back.quant == grid.quant).all());
        saveJcg(back, p2);
        CHECK(readBytes(p1) == readBytes(p2));
    }
}

TEST_CASE("idct: zero block stays zero, DC 8 becomes constant 1") {
    const Block8 zero = Block8::Zero();
    CHECK(idctBlock(zero).cwiseAbs().maxCoeff() == 0.0);

    Block8 dc = Block8::Zero();
    dc(0, 0) = 8.0;
    const Block8 flat = idctBlock(dc);
    const Block8 oracle = testing::naiveIdct8(dc);
    for (int p = 0; p < 8; ++p)
        for (int q = 0; q < 8; ++q) {
            CHECK(flat(p, q) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(flat(p, q) == doctest::Approx(oracle(p, q)).epsilon(1e-12));
        }
}

TEST_CASE("idct: matches the direct-summation oracle and inverts the DCT") {
    std::mt19937_64 rng(3);
    double worstOracle = 0.0, worstInverse = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Block8 b;
        for (int p = 0; p < 8; ++p)
            for (int q = 0; q < 8; ++q) b(p, q) = 512.0 * (testing::uniform01(rng) - 0.5);
        worstOracle = std::max(worstOracle,
                               (idctBlock(b) - testing::naiveIdct8(b)).cwiseAbs().maxCoeff());
        worstInverse = std::max(
            worstInverse, (idctBlock(testing::naiveDct8(b)) - b).cwiseAbs().maxCoeff());
    }
    CHECK(worstOracle < 1e-10);
    CHECK(worstInverse < 1e-10);
}

TEST_CASE("decompress: all-zero coefficients give a flat 128 image") {
    JpegCoeffGrid grid;
    grid.coefficients = IntGrid::Zero(16, 24);
    grid.quant.setConstant(7);
    const RealImage img = decompress(grid);
    CHECK(img.rows() == 16);
    CHECK(img.cols() == 24);
    CHECK((img - 128.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("decompress: DC step of one scales to q/8 per pixel, only in its block") {
    std::mt19937_64 rng(5);
    JpegCoeffGrid grid = testing::syntheticJpegCover(24, 24, 99);
    JpegCoeffGrid bumped = grid;
    bumped.coefficients(8, 8) += 1;  // DC of block (1,1)
    const RealImage before = decompress(grid);
    const RealImage after = decompress(bumped);
    const RealGrid delta = after - before;
    const double q = grid.quant(0, 0);
    for (Index i = 0; i < delta.rows(); ++i)
        for (Index j = 0; j < delta.cols(); ++j) {
            const bool inside = i >= 8 && i < 16 && j >= 8 && j < 16;
            CHECK(delta(i, j) == doctest::Approx(inside ? q / 8.0 : 0.0).epsilon(1e-12));
        }
}

TEST_CASE("decompress: linear in the coefficients") {
    std::mt19937_64 rng(13);
    const JpegCoeffGrid a = testing::syntheticJpegCover(16, 16, 1);
    JpegCoeffGrid b = testing::syntheticJpegCover(16, 16, 2);
    b.quant = a.quant;
    JpegCoeffGrid sum = a;
    sum.coefficients = (a.coefficients + b.coefficients).cwiseMin(kCoeffLimit).cwiseMax(-kCoeffLimit);
    // avoid clamping so the identity is exact
    REQUIRE(((a.coefficients + b.coefficients).abs() <= kCoeffLimit).all());
    const RealGrid lhs = decompress(sum);
    const RealGrid rhs = decompress(a) + decompress(b) - 128.0;
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-9);
}
