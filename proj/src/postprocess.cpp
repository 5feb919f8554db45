#include "spp/postprocess.hpp"

#include <chrono>

#include "spp/errors.hpp"
#include "spp/imaging.hpp"
#include "spp/residual.hpp"

namespace spp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

FilterSet effectiveFilters(const FilterSet& filters, const SppConfig& config) {
    return config.combine == ResidualCombine::sum_maps ? summedKernelSet(filters) : filters;
}

struct SpatialOps {
    const FilterSet& filters;
    ResidualStack rx;
    ResidualStack rz;

    SpatialOps(const GrayImage& cover, const GrayImage& stego, const FilterSet& f)
        : filters(f), rx(residualStack(cover, f)), rz(residualStack(stego, f)) {}

    double tryStep(Index i, Index j, int step) const {
        return deltaDistanceSpatial(rz, rx, filters, i, j, step);
    }
    void apply(Index i, Index j, int step) { updateSpatial(rz, filters, i, j, step); }
};

struct JpegOps {
    const FilterSet& filters;
    const Eigen::Array<int, 8, 8>& quant;
    ResidualStack rx;
    ResidualStack rz;

    JpegOps(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego, const FilterSet& f)
        : filters(f),
          quant(cover.quant),
          rx(residualStack(decompress(cover), f)),
          rz(residualStack(decompress(stego), f)) {}

    double tryStep(Index i, Index j, int step) const {
        return deltaDistanceJpeg(rz, rx, filters, quant, i / 8, j / 8, i % 8, j % 8, step);
    }
    void apply(Index i, Index j, int step) {
        updateJpeg(rz, filters, quant, i / 8, j / 8, i % 8, j % 8, step);
    }
};

// The three nested loops: units row by row, direction +4 then -4, amplitude
// escalating while the objective strictly falls.
template <typename Ops, typename InRange>
void runGeneral(Ops& ops, IntGrid& z, double& distance, std::vector<Modification>& accepted,
                std::vector<double>& trace, const SppConfig& config, const InRange& inRange) {
    bool changed;
    do {
        changed = false;
        for (Index i = 0; i < z.rows(); ++i) {
            for (Index j = 0; j < z.cols(); ++j) {
                for (const int step : {+4, -4}) {
                    int taken = 0;
                    while (inRange(z(i, j) + step) &&
                           (config.amplitude_cap == 0 || taken < config.amplitude_cap)) {
                        const double delta = ops.tryStep(i, j, step);
                        if (!(delta < 0.0)) break;
                        ops.apply(i, j, step);
                        z(i, j) += step;
                        distance += delta;
                        accepted.push_back({i, j, step});
                        trace.push_back(distance);
                        ++taken;
                        changed = true;
                    }
                }
            }
        }
    } while (config.repeat_until_stable && changed);
}

// Single pass over units the steganography changed, stepping against the
// embedding direction with amplitude 4.
template <typename Ops, typename InRange>
void runFast(Ops& ops, const IntGrid& x, const IntGrid& y, IntGrid& z, double& distance,
             std::vector<Modification>& accepted, std::vector<double>& trace,
             const SppConfig& config, const InRange& inRange) {
    bool changed;
    do {
        changed = false;
        for (Index i = 0; i < z.rows(); ++i) {
            for (Index j = 0; j < z.cols(); ++j) {
                const int step = (x(i, j) - y(i, j)) * 4;
                if (step == 0 || !inRange(z(i, j) + step)) continue;
                const double delta = ops.tryStep(i, j, step);
                if (!(delta < 0.0)) continue;
                ops.apply(i, j, step);
                z(i, j) += step;
                distance += delta;
                accepted.push_back({i, j, step});
                trace.push_back(distance);
                changed = true;
            }
        }
    } while (config.repeat_until_stable && changed);
}

void checkShapes(Index xr, Index xc, Index yr, Index yc) {
    if (xr != yr || xc != yc) throw UsageError("cover and stego shapes differ");
}

constexpr auto inPixelRange = [](int v) { return v >= 0 && v <= 255; };
constexpr auto inCoeffRange = [](int v) { return v >= -kCoeffLimit && v <= kCoeffLimit; };

GrayImage toGray(const IntGrid& z) {
    return z.unaryExpr([](std::int32_t v) { return static_cast<std::uint8_t>(v); });
}

}  // namespace

SppRun<GrayImage> sppGeneral(const GrayImage& cover, const GrayImage& stego,
                             const FilterSet& filters, const SppConfig& config) {
    checkShapes(cover.rows(), cover.cols(), stego.rows(), stego.cols());
    const auto start = Clock::now();
    const FilterSet f = effectiveFilters(filters, config);
    SpatialOps ops(cover, stego, f);
    SppRun<GrayImage> run;
    IntGrid z = toInt(stego);
    double distance = manhattanDistance(ops.rz, ops.rx);
    run.initial_distance = distance;
    runGeneral(ops, z, distance, run.accepted, run.distance_trace, config, inPixelRange);
    run.final_distance = distance;
    run.enhanced = toGray(z);
    run.wall_seconds = seconds(start);
    return run;
}

SppRun<GrayImage> sppFast(const GrayImage& cover, const GrayImage& stego, const FilterSet& filters,
                          const SppConfig& config) {
    checkShapes(cover.rows(), cover.cols(), stego.rows(), stego.cols());
    const auto start = Clock::now();
    const FilterSet f = effectiveFilters(filters, config);
    SpatialOps ops(cover, stego, f);
    SppRun<GrayImage> run;
    const IntGrid x = toInt(cover), y = toInt(stego);
    IntGrid z = y;
    double distance = manhattanDistance(ops.rz, ops.rx);
    run.initial_distance = distance;
    runFast(ops, x, y, z, distance, run.accepted, run.distance_trace, config, inPixelRange);
    run.final_distance = distance;
    run.enhanced = toGray(z);
    run.wall_seconds = seconds(start);
    return run;
}

namespace {

void checkJpegPair(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego) {
    checkShapes(cover.rows(), cover.cols(), stego.rows(), stego.cols());
    if ((cover.quant != stego.quant).any()) throw UsageError("quant tables differ");
}

}  // namespace

SppRun<JpegCoeffGrid> sppGeneralJpeg(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego,
                                     const FilterSet& filters, const SppConfig& config) {
    checkJpegPair(cover, stego);
    const auto start = Clock::now();
    const FilterSet f = effectiveFilters(filters, config);
    JpegOps ops(cover, stego, f);
    SppRun<JpegCoeffGrid> run;
    IntGrid z = stego.coefficients;
    double distance = manhattanDistance(ops.rz, ops.rx);
    run.initial_distance = distance;
    runGeneral(ops, z, distance, run.accepted, run.distance_trace, config, inCoeffRange);
    run.final_distance = distance;
    run.enhanced = {std::move(z), stego.quant};
    run.wall_seconds = seconds(start);
    return run;
}

SppRun<JpegCoeffGrid> sppFastJpeg(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego,
                                  const FilterSet& filters, const SppConfig& config) {
    checkJpegPair(cover, stego);
    const auto start = Clock::now();
    const FilterSet f = effectiveFilters(filters, config);
    JpegOps ops(cover, stego, f);
    SppRun<JpegCoeffGrid> run;
    IntGrid z = stego.coefficients;
    double distance = manhattanDistance(ops.rz, ops.rx);
    run.initial_distance = distance;
    runFast(ops, cover.coefficients, stego.coefficients, z, distance, run.accepted,
            run.distance_trace, config, inCoeffRange);
    run.final_distance = distance;
    run.enhanced = {std::move(z), stego.quant};
    run.wall_seconds = seconds(start);
    return run;
}

}  // namespace spp
