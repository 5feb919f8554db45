#include "spp/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>
#include <vector>

#include "spp/costs.hpp"
#include "spp/errors.hpp"
#include "spp/imaging.hpp"
#include "spp/residual.hpp"

namespace spp {

namespace {

void checkShapes(const IntGrid& a, const IntGrid& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("grid shapes differ");
}

}  // namespace

double postModificationRate(const IntGrid& y, const IntGrid& z) {
    checkShapes(y, z);
    return static_cast<double>((y != z).count()) / static_cast<double>(y.size());
}

double modificationDensity(const IntGrid& x, const IntGrid& y) {
    checkShapes(x, y);
    const IntGrid changed = (x != y).cast<std::int32_t>();
    if (changed.sum() == 0) throw AlgorithmError("density undefined: no modifications");
    double total = 0.0;
    Index windows = 0;
    for (Index i = 0; i + 5 <= changed.rows(); ++i) {
        for (Index j = 0; j + 5 <= changed.cols(); ++j) {
            const int count = changed.block(i, j, 5, 5).sum();
            if (count > 0) {
                total += count / 25.0;
                ++windows;
            }
        }
    }
    if (windows == 0)
        throw AlgorithmError("density undefined: no full 5x5 window covers a modification");
    return total / static_cast<double>(windows);
}

double localityRatio(const IntGrid& x, const IntGrid& y, const IntGrid& z) {
    checkShapes(x, y);
    checkShapes(y, z);
    const Index post = (z != y).count();
    if (post == 0) throw AlgorithmError("locality undefined: no post-modifications");
    const Index overlap = ((z != y) && (y != x)).count();
    return static_cast<double>(overlap) / static_cast<double>(post);
}

double oppositionRatio(const IntGrid& x, const IntGrid& y, const IntGrid& z) {
    checkShapes(x, y);
    checkShapes(y, z);
    Index restricted = 0, opposed = 0;
    for (Index i = 0; i < x.size(); ++i) {
        const int stegoStep = y.data()[i] - x.data()[i];
        const int postStep = z.data()[i] - y.data()[i];
        if (stegoStep == 0 || postStep == 0) continue;
        ++restricted;
        if ((stegoStep > 0) != (postStep > 0)) ++opposed;
    }
    if (restricted == 0)
        throw AlgorithmError("opposition undefined: no post-modifications at embedding changes");
    return static_cast<double>(opposed) / static_cast<double>(restricted);
}

double pearson(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
    if (xs.size() != ys.size()) throw UsageError("vector lengths differ");
    if (xs.size() < 2) throw UsageError("need at least two samples");
    const Eigen::VectorXd dx = xs.array() - xs.mean();
    const Eigen::VectorXd dy = ys.array() - ys.mean();
    const double sx = dx.squaredNorm(), sy = dy.squaredNorm();
    if (sx <= 0.0 || sy <= 0.0) throw UsageError("zero variance");
    return dx.dot(dy) / std::sqrt(sx * sy);
}

namespace {

// Locale-independent decimal formatting, 6 significant digits.
std::string formatG6(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

struct RowStats {
    std::string id;
    double r_pm = 0, d_yx = 0, d_zx = 0;
    double d_y = -1, locality = -1, opposition = -1;  // -1: undefined, cell left empty
    double general_seconds = 0, fast_seconds = 0;
    std::string error;
};

template <typename Container, typename GeneralFn, typename FastFn, typename ValuesFn,
          typename LearnFn>
RowStats processPair(const std::string& id, const Container& cover, const Container& stego,
                     const ReportConfig& config, const GeneralFn& general, const FastFn& fast,
                     const ValuesFn& values, const LearnFn& learn) {
    RowStats row;
    row.id = id;
    const FilterSet filters = buildFilterSet(learn(cover), config.filter_kind);
    SppConfig spp_config;
    spp_config.combine = config.combine;

    spp_config.algorithm = SppAlgorithm::general;
    const auto general_run = general(cover, stego, filters, spp_config);
    spp_config.algorithm = SppAlgorithm::fast;
    const auto fast_run = fast(cover, stego, filters, spp_config);

    const IntGrid x = values(cover), y = values(stego);
    const IntGrid z_general = values(general_run.enhanced), z_fast = values(fast_run.enhanced);

    row.r_pm = postModificationRate(y, z_fast);
    try {
        row.d_y = modificationDensity(x, y);
    } catch (const AlgorithmError&) {
        // cover equals stego: density undefined
    }
    try {
        row.locality = localityRatio(x, y, z_general);
        row.opposition = oppositionRatio(x, y, z_general);
    } catch (const AlgorithmError&) {
        // leave undefined when the general pass accepted nothing
    }
    row.d_yx = fast_run.initial_distance;
    row.d_zx = fast_run.final_distance;
    row.general_seconds = general_run.wall_seconds;
    row.fast_seconds = fast_run.wall_seconds;
    return row;
}

std::string csvQuote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string rowToCsv(const RowStats& row, const ReportConfig& config) {
    std::ostringstream line;
    line << row.id << ',' << (config.domain == SppDomain::spatial ? "spatial" : "jpeg") << ','
         << formatG6(config.payload);
    if (row.error.empty()) {
        line << ',' << formatG6(row.r_pm);
        line << ',' << (row.d_y >= 0 ? formatG6(row.d_y) : "");
        line << ',' << (row.locality >= 0 ? formatG6(row.locality) : "");
        line << ',' << (row.opposition >= 0 ? formatG6(row.opposition) : "");
        line << ',' << formatG6(row.d_yx) << ',' << formatG6(row.d_zx);
        if (config.timing)
            line << ',' << formatG6(row.general_seconds) << ',' << formatG6(row.fast_seconds);
        else
            line << ",,";
        line << ',';
    } else {
        line << ",,,,,,,,," << csvQuote(row.error);
    }
    return line.str();
}

}  // namespace

std::string batchReport(const std::string& corpus_dir, const ReportConfig& config) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(corpus_dir)) throw IoError(corpus_dir + " is not a directory");
    const std::string ext = config.domain == SppDomain::spatial ? ".pgm" : ".jcg";
    const std::string cover_suffix = "_cover" + ext;

    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > cover_suffix.size() &&
            name.compare(name.size() - cover_suffix.size(), cover_suffix.size(), cover_suffix) == 0)
            ids.push_back(name.substr(0, name.size() - cover_suffix.size()));
    }
    std::sort(ids.begin(), ids.end());

    std::vector<RowStats> rows(ids.size());
    auto worker = [&](std::size_t begin, std::size_t step) {
        for (std::size_t k = begin; k < ids.size(); k += step) {
            const std::string cover_path = corpus_dir + "/" + ids[k] + cover_suffix;
            const std::string stego_path =
                corpus_dir + "/" + ids[k] + "_stego" + ext;
            try {
                if (config.domain == SppDomain::spatial) {
                    const GrayImage cover = loadPgm(cover_path);
                    const GrayImage stego = loadPgm(stego_path);
                    rows[k] = processPair(
                        ids[k], cover, stego, config,
                        [](auto&&... a) { return sppGeneral(a...); },
                        [](auto&&... a) { return sppFast(a...); },
                        [](const GrayImage& im) { return toInt(im); },
                        [&](const GrayImage& im) { return learnBaseFilter(im, config.w); });
                } else {
                    const JpegCoeffGrid cover = loadJcg(cover_path);
                    const JpegCoeffGrid stego = loadJcg(stego_path);
                    rows[k] = processPair(
                        ids[k], cover, stego, config,
                        [](auto&&... a) { return sppGeneralJpeg(a...); },
                        [](auto&&... a) { return sppFastJpeg(a...); },
                        [](const JpegCoeffGrid& g) { return g.coefficients; },
                        [&](const JpegCoeffGrid& g) {
                            return learnBaseFilter(decompress(g), config.w);
                        });
                }
            } catch (const std::exception& e) {
                rows[k].id = ids[k];
                rows[k].error = e.what();
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1 || ids.size() <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back(worker, static_cast<std::size_t>(t), static_cast<std::size_t>(jobs));
        for (auto& th : pool) th.join();
    }

    std::ostringstream csv;
    csv << "id,domain,payload,r_pm,d_y,locality,opposition,d_yx,d_zx,"
           "general_seconds,fast_seconds,error\n";
    for (const RowStats& row : rows) csv << rowToCsv(row, config) << '\n';
    return csv.str();
}

}  // namespace spp
