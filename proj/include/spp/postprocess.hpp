#ifndef SPP_POSTPROCESS_HPP
#define SPP_POSTPROCESS_HPP

#include <vector>

#include "spp/adaptive_filters.hpp"
#include "spp/types.hpp"

namespace spp {

enum class SppAlgorithm { general, fast };
enum class SppDomain { spatial, jpeg };

// How several residual maps enter the objective: one L1 distance per kernel
// summed, or one distance on the sum of the maps.
enum class ResidualCombine { sum_distances, sum_maps };

struct SppConfig {
    SppAlgorithm algorithm = SppAlgorithm::fast;
    ResidualCombine combine = ResidualCombine::sum_distances;
    // General mode: cap on +-4 steps per direction at one unit; 0 means the
    // value range is the only bound.
    int amplitude_cap = 0;
    // Revisit all units until a full pass accepts nothing (not the default;
    // both pseudo-code variants are single-pass).
    bool repeat_until_stable = false;
};

struct Modification {
    Index row;
    Index col;
    int step;  // always a multiple of 4
};

template <typename Container>
struct SppRun {
    Container enhanced;
    std::vector<Modification> accepted;
    std::vector<double> distance_trace;  // objective after each acceptance
    double initial_distance = 0.0;
    double final_distance = 0.0;
    double wall_seconds = 0.0;
};

// Exhaustive variant: visits every unit, tries +4 then -4, and keeps stepping
// in an improving direction until the objective stops falling or the value
// range ends. Accepts only strict improvements.
SppRun<GrayImage> sppGeneral(const GrayImage& cover, const GrayImage& stego,
                             const FilterSet& filters, const SppConfig& config = {});

// Accelerated variant: one pass over the units changed by the steganography,
// stepping 4 against the embedding change, evaluated via windowed residual
// updates.
SppRun<GrayImage> sppFast(const GrayImage& cover, const GrayImage& stego,
                          const FilterSet& filters, const SppConfig& config = {});

// JPEG counterparts; residuals are measured on decompress(grid) and steps
// keep |coefficient| <= kCoeffLimit. Quant tables must match.
SppRun<JpegCoeffGrid> sppGeneralJpeg(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego,
                                     const FilterSet& filters, const SppConfig& config = {});

SppRun<JpegCoeffGrid> sppFastJpeg(const JpegCoeffGrid& cover, const JpegCoeffGrid& stego,
                                  const FilterSet& filters, const SppConfig& config = {});

}  // namespace spp

#endif
