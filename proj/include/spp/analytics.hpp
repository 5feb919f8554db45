#ifndef SPP_ANALYTICS_HPP
#define SPP_ANALYTICS_HPP

#include <string>

#include "spp/adaptive_filters.hpp"
#include "spp/postprocess.hpp"
#include "spp/types.hpp"

namespace spp {

// Fraction of units where the post-processed stego differs from the stego.
double postModificationRate(const IntGrid& y, const IntGrid& z);

// Mean, over all fully-interior 5x5 windows containing at least one
// steganography change, of changed-unit count / 25. Throws AlgorithmError
// when nothing changed (or no full window covers a change).
double modificationDensity(const IntGrid& x, const IntGrid& y);

// Fraction of post-modified units that sit where the steganography modified;
// undefined (AlgorithmError) without post-modifications.
double localityRatio(const IntGrid& x, const IntGrid& y, const IntGrid& z);

// Among post-modifications at steganography-modified units, the fraction
// whose direction opposes the embedding change.
double oppositionRatio(const IntGrid& x, const IntGrid& y, const IntGrid& z);

// Sample Pearson correlation; requires length >= 2 and nonzero variances.
double pearson(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

struct ReportConfig {
    SppDomain domain = SppDomain::spatial;
    double payload = 0.0;  // bookkeeping only, echoed per row
    FilterSetKind filter_kind = kDefaultSpatialKind;
    Index w = kDefaultSpatialW;
    ResidualCombine combine = ResidualCombine::sum_distances;
    bool timing = false;  // wall-time columns stay empty unless enabled
    int jobs = 1;
};

// Scans dir for <id>_cover.pgm/<id>_stego.pgm pairs (.jcg in the JPEG
// domain), runs both algorithms per pair and emits one CSV row per id,
// ordered by filename. Row-level failures land in the error column.
// Columns: id,domain,payload,r_pm,d_y,locality,opposition,d_yx,d_zx,
//          general_seconds,fast_seconds,error
std::string batchReport(const std::string& corpus_dir, const ReportConfig& config);

}  // namespace spp

#endif
