#ifndef SPP_ADAPTIVE_FILTERS_HPP
#define SPP_ADAPTIVE_FILTERS_HPP

#include <string>
#include <vector>

#include "spp/types.hpp"

namespace spp {

// Learned 1 x w prediction filter; tap (w-1)/2 is fixed to -1 so that
// correlating an image with the taps yields prediction minus actual value.
struct BaseFilter {
    Eigen::RowVectorXd taps;

    Index size() const { return taps.size(); }
    Index center() const { return (taps.size() - 1) / 2; }
};

enum class FilterSetKind { outer_only, pair, full };

struct FilterSet {
    std::vector<Eigen::MatrixXd> kernels;  // shapes 1 x w, w x 1 or w x w
    Eigen::RowVectorXd base;               // taps the kernels were built from
    FilterSetKind kind = FilterSetKind::full;
    Index w = 0;
};

// Paper-style defaults: full set with w=7 in the spatial domain, the
// horizontal/vertical pair with w=3 in the JPEG domain.
inline constexpr Index kDefaultSpatialW = 7;
inline constexpr Index kDefaultJpegW = 3;
inline constexpr FilterSetKind kDefaultSpatialKind = FilterSetKind::full;
inline constexpr FilterSetKind kDefaultJpegKind = FilterSetKind::pair;

// Fits the w-1 prediction weights by least squares over all interior
// horizontal windows of the image pooled with those of its transpose, adds a
// 1e-8 ridge, and returns taps with -1 inserted at the center. Throws
// AlgorithmError when the normal equations are rank deficient even so
// (e.g. constant images); callers may fall back to fallbackBaseFilter.
BaseFilter learnBaseFilter(const RealGrid& image, Index w);
BaseFilter learnBaseFilter(const GrayImage& image, Index w);

// Fixed left-neighbour predictor [.., 1, -1, 0, ..] used when learning fails.
BaseFilter fallbackBaseFilter(Index w);

// outer_only -> {B (x) B^T}; pair -> {B, B^T}; full -> {B, B^T, B (x) B^T}.
FilterSet buildFilterSet(const BaseFilter& base, FilterSetKind kind);

// Mean squared residual of correlating the image with the taps over interior
// windows of the image and its transpose (the least-squares objective).
double predictionResidualEnergy(const RealGrid& image, const BaseFilter& filter);

std::string toString(FilterSetKind kind);
FilterSetKind filterSetKindFromString(const std::string& name);

// Structured text: kind, w, taps with 17 significant digits.
void saveFilterSet(const FilterSet& set, const std::string& path);
FilterSet loadFilterSet(const std::string& path);

}  // namespace spp

#endif
