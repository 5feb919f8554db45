#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spp/adaptive_filters.hpp"
#include "spp/analytics.hpp"
#include "spp/costs.hpp"
#include "spp/errors.hpp"
#include "spp/imaging.hpp"
#include "spp/postprocess.hpp"
#include "spp/residual.hpp"
#include "spp/stc.hpp"

namespace {

using namespace spp;

constexpr int kExitOk = 0;
constexpr int kExitAlgorithm = 2;
constexpr int kExitUsage = 64;
constexpr int kExitFormat = 65;
constexpr int kExitIo = 66;

constexpr std::size_t kSummaryModCap = 100000;

bool hasSuffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool isJpegPath(const std::string& path) { return hasSuffix(path, ".jcg"); }

// SPP_OUT_DIR redirects relative output paths.
std::string resolveOut(const std::string& path) {
    const char* dir = std::getenv("SPP_OUT_DIR");
    if (!dir || !*dir || path.empty() || path.front() == '/') return path;
    return std::string(dir) + "/" + path;
}

void writeTextFile(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << contents;
    if (!out) throw IoError("write failure on " + path);
}

Index unitCount(const std::string& image_path) {
    if (isJpegPath(image_path)) return loadJcg(image_path).coefficients.size();
    return loadPgm(image_path).size();
}

void requireOddW(Index w) {
    if (w < 3 || w > 15 || w % 2 == 0)
        throw UsageError("--w must be odd and within [3,15], got " + std::to_string(w));
}

// ---- subcommand bodies ----

struct KeygenArgs {
    std::string cover, out;
    Index n = 0, m2 = 0, m1 = 0, h = 7;
    double payload = 0.0;
};

void runKeygen(const KeygenArgs& args) {
    Index n = args.n;
    if (!args.cover.empty()) n = unitCount(args.cover);
    if (n <= 0) throw UsageError("pass --n or --cover to size the key");
    Index m2 = args.m2, m1 = args.m1;
    if (m2 == 0 && m1 == 0) {
        if (!(args.payload > 0.0)) throw UsageError("pass --payload or --m2/--m1");
        const Index total = std::max<Index>(2, static_cast<Index>(args.payload * n));
        m2 = total / 2;
        m1 = total - m2;
    }
    if (m2 <= 0 || m1 <= 0 || m2 > n || m1 > n)
        throw UsageError("message lengths must be in [1, n]");
    if (args.h < 1 || args.h > 12) throw UsageError("--h must be in [1,12]");
    saveKey(makeKey(n, m2, m1, args.h), resolveOut(args.out));
    std::cout << "key: n=" << n << " m2=" << m2 << " m1=" << m1 << " h=" << args.h << "\n";
}

struct LearnArgs {
    std::string cover, out, set_name;
    Index w = 0;
};

void runLearnFilters(const LearnArgs& args) {
    const bool jpeg = isJpegPath(args.cover);
    const Index w = args.w ? args.w : (jpeg ? kDefaultJpegW : kDefaultSpatialW);
    requireOddW(w);
    const FilterSetKind kind = args.set_name.empty()
                                   ? (jpeg ? kDefaultJpegKind : kDefaultSpatialKind)
                                   : filterSetKindFromString(args.set_name);
    BaseFilter base;
    if (jpeg) base = learnBaseFilter(decompress(loadJcg(args.cover)), w);
    else base = learnBaseFilter(loadPgm(args.cover), w);
    const FilterSet set = buildFilterSet(base, kind);
    saveFilterSet(set, resolveOut(args.out));
    std::cout << "taps:";
    for (Index k = 0; k < base.size(); ++k) std::cout << ' ' << base.taps[k];
    std::cout << "\nkernels: " << set.kernels.size() << " (" << toString(kind) << ", w=" << w
              << ")\n";
}

struct EmbedArgs {
    std::string cover, out, cost_name = "auto";
    double payload = 0.4;
    std::uint64_t seed = 1;
};

void runEmbed(const EmbedArgs& args) {
    const bool jpeg = isJpegPath(args.cover);
    std::string cost = args.cost_name;
    if (cost == "auto") cost = jpeg ? "uerd" : "hill";
    if (jpeg) {
        if (cost != "uerd") throw UsageError("JPEG covers need --cost uerd");
        const JpegCoeffGrid cover = loadJcg(args.cover);
        saveJcg(simulateEmbedding(cover, uerdCost(cover), args.payload, args.seed),
                resolveOut(args.out));
    } else {
        if (cost != "hill") throw UsageError("spatial covers need --cost hill");
        const GrayImage cover = loadPgm(args.cover);
        savePgm(simulateEmbedding(cover, hillCost(cover), args.payload, args.seed),
                resolveOut(args.out));
    }
}

struct SppArgs {
    std::string cover, stego, out, summary, filters;
    std::string algorithm = "fast", combine = "distances";
    Index w = 0;
    std::string set_name;
    int amplitude_cap = 0;
    bool repeat = false;
};

SppConfig makeSppConfig(const SppArgs& args) {
    SppConfig config;
    if (args.algorithm == "fast") config.algorithm = SppAlgorithm::fast;
    else if (args.algorithm == "general") config.algorithm = SppAlgorithm::general;
    else throw UsageError("--algorithm must be fast|general");
    if (args.combine == "distances") config.combine = ResidualCombine::sum_distances;
    else if (args.combine == "maps") config.combine = ResidualCombine::sum_maps;
    else throw UsageError("--combine must be distances|maps");
    if (args.amplitude_cap < 0) throw UsageError("--amplitude-cap must be >= 0");
    config.amplitude_cap = args.amplitude_cap;
    config.repeat_until_stable = args.repeat;
    return config;
}

FilterSet sppFilters(const SppArgs& args, bool jpeg, const GrayImage* gray_cover,
                     const JpegCoeffGrid* jpeg_cover) {
    if (!args.filters.empty()) return loadFilterSet(args.filters);
    const Index w = args.w ? args.w : (jpeg ? kDefaultJpegW : kDefaultSpatialW);
    requireOddW(w);
    const FilterSetKind kind = args.set_name.empty()
                                   ? (jpeg ? kDefaultJpegKind : kDefaultSpatialKind)
                                   : filterSetKindFromString(args.set_name);
    const BaseFilter base = jpeg ? learnBaseFilter(decompress(*jpeg_cover), w)
                                 : learnBaseFilter(*gray_cover, w);
    return buildFilterSet(base, kind);
}

template <typename Container>
void writeSummary(const SppRun<Container>& run, const SppArgs& args, const std::string& domain) {
    if (args.summary.empty()) return;
    nlohmann::json summary;
    summary["domain"] = domain;
    summary["algorithm"] = args.algorithm;
    summary["initial_distance"] = run.initial_distance;
    summary["final_distance"] = run.final_distance;
    summary["accepted_count"] = run.accepted.size();
    nlohmann::json mods = nlohmann::json::array();
    for (std::size_t k = 0; k < run.accepted.size() && k < kSummaryModCap; ++k)
        mods.push_back({{"row", run.accepted[k].row},
                        {"col", run.accepted[k].col},
                        {"step", run.accepted[k].step}});
    summary["accepted"] = std::move(mods);
    summary["accepted_truncated"] = run.accepted.size() > kSummaryModCap;
    writeTextFile(resolveOut(args.summary), summary.dump(2) + "\n");
}

void runSpp(const SppArgs& args) {
    const bool jpeg = isJpegPath(args.cover);
    if (jpeg != isJpegPath(args.stego))
        throw UsageError("cover and stego must share a domain (.pgm or .jcg)");
    const SppConfig config = makeSppConfig(args);
    if (jpeg) {
        const JpegCoeffGrid cover = loadJcg(args.cover);
        const JpegCoeffGrid stego = loadJcg(args.stego);
        const FilterSet filters = sppFilters(args, true, nullptr, &cover);
        const auto run = config.algorithm == SppAlgorithm::fast
                             ? sppFastJpeg(cover, stego, filters, config)
                             : sppGeneralJpeg(cover, stego, filters, config);
        saveJcg(run.enhanced, resolveOut(args.out));
        writeSummary(run, args, "jpeg");
        std::cout << "distance: " << run.initial_distance << " -> " << run.final_distance
                  << " (accepted " << run.accepted.size() << ")\n";
    } else {
        const GrayImage cover = loadPgm(args.cover);
        const GrayImage stego = loadPgm(args.stego);
        const FilterSet filters = sppFilters(args, false, &cover, nullptr);
        const auto run = config.algorithm == SppAlgorithm::fast
                             ? sppFast(cover, stego, filters, config)
                             : sppGeneral(cover, stego, filters, config);
        savePgm(run.enhanced, resolveOut(args.out));
        writeSummary(run, args, "spatial");
        std::cout << "distance: " << run.initial_distance << " -> " << run.final_distance
                  << " (accepted " << run.accepted.size() << ")\n";
    }
}

struct VerifyArgs {
    std::string stego, enhanced, key;
};

int runVerify(const VerifyArgs& args) {
    if (isJpegPath(args.stego) != isJpegPath(args.enhanced))
        throw UsageError("stego and enhanced must share a domain");
    const TernaryKey key = loadKey(args.key);
    BitVector a, b;
    if (isJpegPath(args.stego)) {
        const JpegCoeffGrid stego = loadJcg(args.stego);
        const JpegCoeffGrid enhanced = loadJcg(args.enhanced);
        if (key.layer2.cover_len != stego.coefficients.size())
            throw FormatError("key sized for " + std::to_string(key.layer2.cover_len) +
                              " units, image has " + std::to_string(stego.coefficients.size()));
        a = ternaryExtract(stego, key);
        b = ternaryExtract(enhanced, key);
    } else {
        const GrayImage stego = loadPgm(args.stego);
        const GrayImage enhanced = loadPgm(args.enhanced);
        if (key.layer2.cover_len != stego.size())
            throw FormatError("key sized for " + std::to_string(key.layer2.cover_len) +
                              " units, image has " + std::to_string(stego.size()));
        a = ternaryExtract(stego, key);
        b = ternaryExtract(enhanced, key);
    }
    if (a != b) {
        std::cout << "MISMATCH: extraction differs\n";
        return kExitAlgorithm;
    }
    std::cout << "OK message=" << bitsToHex(a) << "\n";
    return kExitOk;
}

struct StatsArgs {
    std::string corpus, out;
    std::string domain = "spatial", set_name, combine = "distances";
    double payload = 0.4;
    Index w = 0;
    int jobs = 1;
    bool timing = false;
};

void runStats(const StatsArgs& args) {
    ReportConfig config;
    if (args.domain == "spatial") config.domain = SppDomain::spatial;
    else if (args.domain == "jpeg") config.domain = SppDomain::jpeg;
    else throw UsageError("--domain must be spatial|jpeg");
    const bool jpeg = config.domain == SppDomain::jpeg;
    config.payload = args.payload;
    config.w = args.w ? args.w : (jpeg ? kDefaultJpegW : kDefaultSpatialW);
    requireOddW(config.w);
    config.filter_kind = args.set_name.empty()
                             ? (jpeg ? kDefaultJpegKind : kDefaultSpatialKind)
                             : filterSetKindFromString(args.set_name);
    if (args.combine == "distances") config.combine = ResidualCombine::sum_distances;
    else if (args.combine == "maps") config.combine = ResidualCombine::sum_maps;
    else throw UsageError("--combine must be distances|maps");
    if (args.jobs < 1) throw UsageError("--jobs must be >= 1");
    config.jobs = args.jobs;
    config.timing = args.timing;
    writeTextFile(resolveOut(args.out), batchReport(args.corpus, config));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stego post-processing toolkit: learn residual filters, embed, "
                 "post-process stegos and report modification statistics"};
    app.require_subcommand(1);

    KeygenArgs keygen;
    auto* keygen_cmd = app.add_subcommand("keygen", "Write a ternary STC key file");
    keygen_cmd->add_option("--n", keygen.n, "Number of embedding units");
    keygen_cmd->add_option("--cover", keygen.cover, "Image to take the unit count from");
    keygen_cmd->add_option("--payload", keygen.payload, "Bits per unit; split across layers");
    keygen_cmd->add_option("--m2", keygen.m2, "Layer-2 message bits");
    keygen_cmd->add_option("--m1", keygen.m1, "Layer-1 message bits");
    keygen_cmd->add_option("--h", keygen.h, "Submatrix height (1..12)");
    keygen_cmd->add_option("--out", keygen.out, "Key file")->required();

    LearnArgs learn;
    auto* learn_cmd = app.add_subcommand("learn-filters", "Fit the prediction filter of a cover");
    learn_cmd->add_option("--cover", learn.cover, "Cover image (.pgm or .jcg)")->required();
    learn_cmd->add_option("--w", learn.w, "Filter size (odd, 3..15)");
    learn_cmd->add_option("--set", learn.set_name, "Kernel set: outer|pair|full");
    learn_cmd->add_option("--out", learn.out, "Filter file")->required();

    EmbedArgs embed;
    auto* embed_cmd = app.add_subcommand("embed", "Simulate payload-matched embedding");
    embed_cmd->add_option("--cover", embed.cover, "Cover image")->required();
    embed_cmd->add_option("--cost", embed.cost_name, "Cost model: hill|uerd");
    embed_cmd->add_option("--payload", embed.payload, "Bits per pixel / per nonzero AC");
    embed_cmd->add_option("--seed", embed.seed, "Sampling seed");
    embed_cmd->add_option("--out", embed.out, "Stego output")->required();

    SppArgs spp_args;
    auto* spp_cmd = app.add_subcommand("spp", "Post-process a stego towards the cover residual");
    spp_cmd->add_option("--cover", spp_args.cover, "Cover image")->required();
    spp_cmd->add_option("--stego", spp_args.stego, "Stego image")->required();
    spp_cmd->add_option("--algorithm", spp_args.algorithm, "fast|general");
    spp_cmd->add_option("--filters", spp_args.filters, "Filter file (default: learn from cover)");
    spp_cmd->add_option("--w", spp_args.w, "Filter size when learning");
    spp_cmd->add_option("--set", spp_args.set_name, "Kernel set when learning");
    spp_cmd->add_option("--combine", spp_args.combine, "Residual combination: distances|maps");
    spp_cmd->add_option("--amplitude-cap", spp_args.amplitude_cap,
                        "General mode: max 4-steps per direction (0 = range-bound)");
    spp_cmd->add_flag("--repeat", spp_args.repeat, "Repeat passes until stable");
    spp_cmd->add_option("--out", spp_args.out, "Enhanced stego output")->required();
    spp_cmd->add_option("--summary", spp_args.summary, "JSON run summary");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check extraction is unchanged");
    verify_cmd->add_option("--stego", verify.stego, "Stego image")->required();
    verify_cmd->add_option("--enhanced", verify.enhanced, "Post-processed image")->required();
    verify_cmd->add_option("--key", verify.key, "Key file")->required();

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Batch report over cover/stego pairs");
    stats_cmd->add_option("--corpus", stats.corpus, "Directory of <id>_cover/_stego pairs")
        ->required();
    stats_cmd->add_option("--domain", stats.domain, "spatial|jpeg");
    stats_cmd->add_option("--payload", stats.payload, "Payload echoed into the CSV");
    stats_cmd->add_option("--w", stats.w, "Filter size");
    stats_cmd->add_option("--set", stats.set_name, "Kernel set");
    stats_cmd->add_option("--combine", stats.combine, "distances|maps");
    stats_cmd->add_option("--jobs", stats.jobs, "Worker threads");
    stats_cmd->add_flag("--timing", stats.timing, "Fill the wall-time columns (non-reproducible)");
    stats_cmd->add_option("--out", stats.out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*keygen_cmd) runKeygen(keygen);
        else if (*learn_cmd) runLearnFilters(learn);
        else if (*embed_cmd) runEmbed(embed);
        else if (*spp_cmd) runSpp(spp_args);
        else if (*verify_cmd) return runVerify(verify);
        else if (*stats_cmd) runStats(stats);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const AlgorithmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
    return kExitOk;
}
