#include "spp/adaptive_filters.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spp/errors.hpp"

namespace spp {

namespace {

constexpr double kRidge = 1e-8;

// Gram matrix and right-hand side of the horizontal-window prediction system
// for one image orientation. Window neighbours exclude the center pixel.
struct NormalEquations {
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    Index samples = 0;
};

NormalEquations accumulate(const RealGrid& image, Index w) {
    const Index r = (w - 1) / 2;
    const Index dims = w - 1;
    NormalEquations eq{Eigen::MatrixXd::Zero(dims, dims), Eigen::VectorXd::Zero(dims), 0};
    Eigen::VectorXd v(dims);
    for (Index i = 0; i < image.rows(); ++i) {
        for (Index j = r; j + r < image.cols(); ++j) {
            Index d = 0;
            for (Index k = -r; k <= r; ++k)
                if (k != 0) v[d++] = image(i, j + k);
            eq.gram.selfadjointView<Eigen::Lower>().rankUpdate(v);
            eq.rhs.noalias() += v * image(i, j);
            ++eq.samples;
        }
    }
    eq.gram = eq.gram.selfadjointView<Eigen::Lower>();
    return eq;
}

}  // namespace

BaseFilter learnBaseFilter(const RealGrid& image, Index w) {
    if (w < 3 || w > 15 || w % 2 == 0) throw UsageError("filter size must be odd, in [3,15]");
    const Index r = (w - 1) / 2;
    if (image.cols() < w || image.rows() < w)
        throw UsageError("image smaller than filter window");

    // Pool samples from the image and its transpose so the same taps predict
    // horizontally and vertically. Adding the per-orientation systems keeps
    // the result bit-identical under transposition.
    const NormalEquations a = accumulate(image, w);
    const NormalEquations b = accumulate(RealGrid(image.transpose()), w);
    if (a.samples + b.samples < 10 * (w - 1))
        throw UsageError("not enough samples to fit " + std::to_string(w - 1) + " weights");

    Eigen::MatrixXd gram = a.gram + b.gram;
    const Eigen::VectorXd rhs = a.rhs + b.rhs;

    // Rank check before the ridge: a constant image yields a rank-1 system
    // with no recoverable predictor.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || eig.eigenvalues().minCoeff() <= 1e-10 * lmax)
        throw AlgorithmError(
            "prediction system is rank deficient (flat image?); use the fixed fallback filter");

    gram.diagonal().array() += kRidge;
    const Eigen::VectorXd weights = gram.ldlt().solve(rhs);

    BaseFilter filter;
    filter.taps.resize(w);
    Index d = 0;
    for (Index k = 0; k < w; ++k) filter.taps[k] = (k == r) ? -1.0 : weights[d++];
    return filter;
}

BaseFilter learnBaseFilter(const GrayImage& image, Index w) {
    return learnBaseFilter(toReal(image), w);
}

BaseFilter fallbackBaseFilter(Index w) {
    if (w < 3 || w % 2 == 0) throw UsageError("filter size must be odd, >= 3");
    BaseFilter filter;
    filter.taps = Eigen::RowVectorXd::Zero(w);
    filter.taps[(w - 1) / 2] = -1.0;
    filter.taps[(w - 1) / 2 - 1] = 1.0;
    return filter;
}

FilterSet buildFilterSet(const BaseFilter& base, FilterSetKind kind) {
    const Index w = base.size();
    if (w < 3 || w % 2 == 0) throw UsageError("base filter size must be odd, >= 3");
    if (base.taps[base.center()] != -1.0) throw UsageError("center tap must be -1");
    FilterSet set;
    set.kind = kind;
    set.w = w;
    set.base = base.taps;
    const Eigen::MatrixXd row = base.taps;
    const Eigen::MatrixXd outer = base.taps.transpose() * base.taps;
    switch (kind) {
        case FilterSetKind::outer_only:
            set.kernels = {outer};
            break;
        case FilterSetKind::pair:
            set.kernels = {row, row.transpose()};
            break;
        case FilterSetKind::full:
            set.kernels = {row, row.transpose(), outer};
            break;
    }
    return set;
}

double predictionResidualEnergy(const RealGrid& image, const BaseFilter& filter) {
    const Index w = filter.size(), r = filter.center();
    double energy = 0.0;
    Index samples = 0;
    for (const RealGrid& view : {image, RealGrid(image.transpose())}) {
        for (Index i = 0; i < view.rows(); ++i) {
            for (Index j = r; j + r < view.cols(); ++j) {
                double acc = 0.0;
                for (Index k = 0; k < w; ++k) acc += filter.taps[k] * view(i, j + k - r);
                energy += acc * acc;
                ++samples;
            }
        }
    }
    return samples ? energy / static_cast<double>(samples) : 0.0;
}

std::string toString(FilterSetKind kind) {
    switch (kind) {
        case FilterSetKind::outer_only: return "outer";
        case FilterSetKind::pair: return "pair";
        case FilterSetKind::full: return "full";
    }
    return "full";
}

FilterSetKind filterSetKindFromString(const std::string& name) {
    if (name == "outer") return FilterSetKind::outer_only;
    if (name == "pair") return FilterSetKind::pair;
    if (name == "full") return FilterSetKind::full;
    throw UsageError("unknown filter set kind '" + name + "' (outer|pair|full)");
}

void saveFilterSet(const FilterSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "FILTERSET1 " << toString(set.kind) << ' ' << set.w << '\n';
    char buf[64];
    for (Index k = 0; k < set.base.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", set.base[k]);
        out << buf << (k + 1 == set.base.size() ? '\n' : ' ');
    }
    if (!out) throw IoError("write failure on " + path);
}

FilterSet loadFilterSet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string header, kindName;
    Index w = 0;
    if (!(in >> header >> kindName >> w) || header != "FILTERSET1")
        throw FormatError(path + ":1: expected 'FILTERSET1 <kind> <w>'");
    FilterSetKind kind;
    try {
        kind = filterSetKindFromString(kindName);
    } catch (const UsageError& e) {
        throw FormatError(path + ":1: " + e.what());
    }
    if (w < 3 || w > 15 || w % 2 == 0) throw FormatError(path + ":1: bad filter size");
    BaseFilter base;
    base.taps.resize(w);
    for (Index k = 0; k < w; ++k)
        if (!(in >> base.taps[k])) throw FormatError(path + ":2: expected " + std::to_string(w) +
                                                     " taps");
    if (base.taps[(w - 1) / 2] != -1.0) throw FormatError(path + ":2: center tap must be -1");
    return buildFilterSet(base, kind);
}

}  // namespace spp
