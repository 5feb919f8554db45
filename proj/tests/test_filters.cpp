#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "spp/adaptive_filters.hpp"
#include "spp/errors.hpp"
#include "support.hpp"

using namespace spp;

namespace {

// Bilinear surface plus weak noise: the midpoint predictor [0.5, -1, 0.5]
// reproduces it exactly in both orientations.
GrayImage bilinearImage(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.5);
    GrayImage img(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double v = 20.0 + 0.35 * i + 0.55 * j + 0.002 * i * j + gauss(rng);
            img(i, j) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
        }
    return img;
}

}  // namespace

TEST_CASE("learning recovers the generating midpoint predictor") {
    const GrayImage img = bilinearImage(256, 256, 42);
    const BaseFilter filter = learnBaseFilter(img, 3);
    REQUIRE(filter.size() == 3);
    CHECK(filter.taps[1] == -1.0);
    CHECK(filter.taps[0] == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(filter.taps[2] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("learning fails on a constant image") {
    const GrayImage flat = GrayImage::Constant(64, 64, 99);
    CHECK_THROWS_AS(learnBaseFilter(flat, 3), AlgorithmError);
    CHECK_THROWS_AS(learnBaseFilter(flat, 7), AlgorithmError);
}

TEST_CASE("learned filter beats the fixed difference filter on its own objective") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const GrayImage img = testing::syntheticCover(96, 96, seed);
        const RealGrid real = toReal(img);
        const BaseFilter learned = learnBaseFilter(img, 3);
        const BaseFilter fixed = fallbackBaseFilter(3);
        CHECK(predictionResidualEnergy(real, learned) <=
              predictionResidualEnergy(real, fixed) * (1.0 + 1e-9));
    }
}

TEST_CASE("center tap is -1 for every w") {
    const GrayImage img = testing::syntheticCover(64, 64, 9);
    for (Index w : {3, 5, 7, 9}) {
        const BaseFilter f = learnBaseFilter(img, w);
        REQUIRE(f.size() == w);
        CHECK(f.taps[(w - 1) / 2] == -1.0);
    }
}

TEST_CASE("transposing the image leaves the taps bit-identical") {
    const GrayImage img = testing::syntheticCover(80, 64, 13);
    const GrayImage transposed = img.transpose();
    const BaseFilter a = learnBaseFilter(img, 5);
    const BaseFilter b = learnBaseFilter(transposed, 5);
    CHECK((a.taps.array() == b.taps.array()).all());
}

TEST_CASE("doubling the image intensities preserves the argmin") {
    GrayImage img = testing::syntheticCover(64, 64, 21);
    img = img.unaryExpr([](std::uint8_t v) { return static_cast<std::uint8_t>(v / 2); }).eval();
    const GrayImage doubled =
        img.unaryExpr([](std::uint8_t v) { return static_cast<std::uint8_t>(v * 2); });
    const BaseFilter a = learnBaseFilter(img, 5);
    const BaseFilter b = learnBaseFilter(doubled, 5);
    // exactly scale invariant up to the tiny ridge term
    CHECK((a.taps - b.taps).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("usage checks: even or tiny w rejected, small images rejected") {
    const GrayImage img = testing::syntheticCover(32, 32, 1);
    CHECK_THROWS_AS(learnBaseFilter(img, 4), UsageError);
    CHECK_THROWS_AS(learnBaseFilter(img, 1), UsageError);
    CHECK_THROWS_AS(learnBaseFilter(img, 17), UsageError);
    const GrayImage tiny = testing::syntheticCover(8, 8, 1).block(0, 0, 4, 4);
    CHECK_THROWS_AS(learnBaseFilter(tiny, 7), UsageError);
}

TEST_CASE("filter sets: shapes, cardinality, outer-product arithmetic") {
    BaseFilter base;
    base.taps.resize(3);
    base.taps << 0.5, -1.0, 0.5;

    const FilterSet outer = buildFilterSet(base, FilterSetKind::outer_only);
    REQUIRE(outer.kernels.size() == 1);
    REQUIRE(outer.kernels[0].rows() == 3);
    REQUIRE(outer.kernels[0].cols() == 3);
    CHECK(outer.kernels[0](1, 1) == 1.0);
    CHECK(outer.kernels[0](0, 0) == 0.25);
    CHECK(outer.kernels[0](0, 2) == 0.25);
    CHECK(outer.kernels[0](2, 0) == 0.25);
    CHECK(outer.kernels[0](2, 2) == 0.25);

    const FilterSet pair = buildFilterSet(base, FilterSetKind::pair);
    REQUIRE(pair.kernels.size() == 2);
    CHECK(pair.kernels[0].rows() == 1);
    CHECK(pair.kernels[0].cols() == 3);
    CHECK(pair.kernels[1].rows() == 3);
    CHECK(pair.kernels[1].cols() == 1);
    CHECK(pair.kernels[1](1, 0) == -1.0);

    const FilterSet full = buildFilterSet(base, FilterSetKind::full);
    CHECK(full.kernels.size() == 3);
}

TEST_CASE("default hyper-parameters match the published choices") {
    CHECK(kDefaultSpatialW == 7);
    CHECK(static_cast<int>(kDefaultSpatialKind) == static_cast<int>(FilterSetKind::full));
    CHECK(kDefaultJpegW == 3);
    CHECK(static_cast<int>(kDefaultJpegKind) == static_cast<int>(FilterSetKind::pair));
}

TEST_CASE("filter file round trip preserves taps exactly") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("spp_filters_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string path = (dir / "f.txt").string();

    const GrayImage img = testing::syntheticCover(64, 64, 33);
    const FilterSet set = buildFilterSet(learnBaseFilter(img, 7), FilterSetKind::full);
    saveFilterSet(set, path);
    const FilterSet back = loadFilterSet(path);
    CHECK(static_cast<int>(back.kind) == static_cast<int>(set.kind));
    CHECK(back.w == 7);
    REQUIRE(back.kernels.size() == 3);
    CHECK((back.base.array() == set.base.array()).all());
    for (std::size_t k = 0; k < 3; ++k)
        CHECK((back.kernels[k] - set.kernels[k]).cwiseAbs().maxCoeff() == 0.0);

    const std::string path2 = (dir / "f2.txt").string();
    saveFilterSet(set, path2);
    std::ifstream a(path), b(path2);
    CHECK(std::string(std::istreambuf_iterator<char>(a), {}) ==
          std::string(std::istreambuf_iterator<char>(b), {}));
    fs::remove_all(dir);
}
