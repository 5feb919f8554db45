#include "spp/residual.hpp"

#include <cmath>

#include "spp/errors.hpp"
#include "spp/imaging.hpp"

namespace spp {

namespace {

inline Index centerRow(const Eigen::MatrixXd& k) { return (k.rows() - 1) / 2; }
inline Index centerCol(const Eigen::MatrixXd& k) { return (k.cols() - 1) / 2; }

void checkStacks(const ResidualStack& a, const ResidualStack& b) {
    if (a.maps.size() != b.maps.size()) throw UsageError("stacks hold different kernel counts");
    for (std::size_t k = 0; k < a.maps.size(); ++k)
        if (a.maps[k].rows() != b.maps[k].rows() || a.maps[k].cols() != b.maps[k].cols())
            throw UsageError("stack shapes differ");
}

void checkStep(int step) {
    if (step % 4 != 0) throw UsageError("step must be a multiple of 4");
}

}  // namespace

ResidualStack residualStack(const RealGrid& image, const FilterSet& filters) {
    if (filters.kernels.empty()) throw UsageError("empty filter set");
    ResidualStack stack;
    stack.maps.reserve(filters.kernels.size());
    const Index rows = image.rows(), cols = image.cols();
    for (const Eigen::MatrixXd& k : filters.kernels) {
        if (rows < k.rows() || cols < k.cols())
            throw UsageError("image smaller than a filter kernel");
        RealGrid map = RealGrid::Zero(rows, cols);
        const Index ca = centerRow(k), cb = centerCol(k);
        for (Index a = 0; a < k.rows(); ++a) {
            for (Index b = 0; b < k.cols(); ++b) {
                const double tap = k(a, b);
                if (tap == 0.0) continue;
                const Index di = a - ca, dj = b - cb;
                const Index r0 = std::max<Index>(0, -di), c0 = std::max<Index>(0, -dj);
                const Index nr = rows - std::abs(di), nc = cols - std::abs(dj);
                map.block(r0, c0, nr, nc) += tap * image.block(r0 + di, c0 + dj, nr, nc);
            }
        }
        stack.maps.push_back(std::move(map));
    }
    return stack;
}

ResidualStack residualStack(const GrayImage& image, const FilterSet& filters) {
    return residualStack(toReal(image), filters);
}

double manhattanDistance(const ResidualStack& a, const ResidualStack& b) {
    checkStacks(a, b);
    double total = 0.0;
    for (std::size_t k = 0; k < a.maps.size(); ++k)
        total += (a.maps[k] - b.maps[k]).abs().sum();
    return total;
}

FilterSet summedKernelSet(const FilterSet& set) {
    if (set.kernels.empty()) throw UsageError("empty filter set");
    Index rows = 0, cols = 0;
    for (const auto& k : set.kernels) {
        rows = std::max(rows, k.rows());
        cols = std::max(cols, k.cols());
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& k : set.kernels) {
        const Index r0 = (rows - 1) / 2 - centerRow(k), c0 = (cols - 1) / 2 - centerCol(k);
        sum.block(r0, c0, k.rows(), k.cols()) += k;
    }
    FilterSet out = set;
    out.kernels = {sum};
    return out;
}

void updateSpatial(ResidualStack& stack, const FilterSet& filters, Index i, Index j, int step) {
    checkStep(step);
    if (stack.maps.size() != filters.kernels.size())
        throw UsageError("stack does not match the filter set");
    for (std::size_t k = 0; k < filters.kernels.size(); ++k) {
        const Eigen::MatrixXd& ker = filters.kernels[k];
        RealGrid& map = stack.maps[k];
        if (i < 0 || i >= map.rows() || j < 0 || j >= map.cols())
            throw UsageError("unit position out of bounds");
        const Index ca = centerRow(ker), cb = centerCol(ker);
        for (Index a = 0; a < ker.rows(); ++a) {
            const Index r = i + ca - a;
            if (r < 0 || r >= map.rows()) continue;
            for (Index b = 0; b < ker.cols(); ++b) {
                const Index c = j + cb - b;
                if (c < 0 || c >= map.cols()) continue;
                map(r, c) += step * ker(a, b);
            }
        }
    }
}

double deltaDistanceSpatial(const ResidualStack& rz, const ResidualStack& rx,
                            const FilterSet& filters, Index i, Index j, int step) {
    if (rz.maps.size() != filters.kernels.size() || rx.maps.size() != filters.kernels.size())
        throw UsageError("stack does not match the filter set");
    if (i < 0 || i >= rz.maps[0].rows() || j < 0 || j >= rz.maps[0].cols())
        throw UsageError("unit position out of bounds");
    double delta = 0.0;
    for (std::size_t k = 0; k < filters.kernels.size(); ++k) {
        const Eigen::MatrixXd& ker = filters.kernels[k];
        const RealGrid& z = rz.maps[k];
        const RealGrid& x = rx.maps[k];
        const Index ca = centerRow(ker), cb = centerCol(ker);
        for (Index a = 0; a < ker.rows(); ++a) {
            const Index r = i + ca - a;
            if (r < 0 || r >= z.rows()) continue;
            for (Index b = 0; b < ker.cols(); ++b) {
                const Index c = j + cb - b;
                if (c < 0 || c >= z.cols()) continue;
                const double before = z(r, c) - x(r, c);
                delta += std::abs(before + step * ker(a, b)) - std::abs(before);
            }
        }
    }
    return delta;
}

namespace {

// Residual window response of a unit step in DCT coefficient (u,v): the
// cross-correlation of the kernel with the 8x8 basis patch. Row rr of the
// window corresponds to map row 8*br + ca - (kh-1) + rr.
struct BlockWindow {
    Index top, left;     // map coordinates of window origin
    Index rows, cols;    // 8 + kh - 1, 8 + kw - 1
};

inline BlockWindow blockWindow(const Eigen::MatrixXd& ker, Index br, Index bc) {
    const Index kh = ker.rows(), kw = ker.cols();
    return {br * 8 + centerRow(ker) - (kh - 1), bc * 8 + centerCol(ker) - (kw - 1), 8 + kh - 1,
            8 + kw - 1};
}

inline double windowResponse(const Eigen::MatrixXd& ker, const Block8& dct, Index u, Index v,
                             Index rr, Index cc) {
    const Index kh = ker.rows(), kw = ker.cols();
    double acc = 0.0;
    for (Index a = 0; a < kh; ++a) {
        const Index p = rr + a - (kh - 1);
        if (p < 0 || p > 7) continue;
        for (Index b = 0; b < kw; ++b) {
            const Index q = cc + b - (kw - 1);
            if (q < 0 || q > 7) continue;
            acc += ker(a, b) * dct(u, p) * dct(v, q);
        }
    }
    return acc;
}

void checkJpegArgs(const std::vector<RealGrid>& maps, Index br, Index bc, Index u, Index v) {
    if (maps.empty()) throw UsageError("empty stack");
    if (u < 0 || u > 7 || v < 0 || v > 7) throw UsageError("in-block coordinates outside [0,8)");
    if (br < 0 || bc < 0 || br * 8 + 8 > maps[0].rows() || bc * 8 + 8 > maps[0].cols())
        throw UsageError("block position out of bounds");
}

}  // namespace

void updateJpeg(ResidualStack& stack, const FilterSet& filters,
                const Eigen::Array<int, 8, 8>& quant, Index br, Index bc, Index u, Index v,
                int step) {
    checkStep(step);
    checkJpegArgs(stack.maps, br, bc, u, v);
    if (stack.maps.size() != filters.kernels.size())
        throw UsageError("stack does not match the filter set");
    const Block8& dct = dctMatrix8();
    const double scale = static_cast<double>(step) * quant(u, v);
    for (std::size_t k = 0; k < filters.kernels.size(); ++k) {
        const Eigen::MatrixXd& ker = filters.kernels[k];
        RealGrid& map = stack.maps[k];
        const BlockWindow win = blockWindow(ker, br, bc);
        for (Index rr = 0; rr < win.rows; ++rr) {
            const Index r = win.top + rr;
            if (r < 0 || r >= map.rows()) continue;
            for (Index cc = 0; cc < win.cols; ++cc) {
                const Index c = win.left + cc;
                if (c < 0 || c >= map.cols()) continue;
                map(r, c) += scale * windowResponse(ker, dct, u, v, rr, cc);
            }
        }
    }
}

double deltaDistanceJpeg(const ResidualStack& rz, const ResidualStack& rx,
                         const FilterSet& filters, const Eigen::Array<int, 8, 8>& quant, Index br,
                         Index bc, Index u, Index v, int step) {
    checkJpegArgs(rz.maps, br, bc, u, v);
    if (rz.maps.size() != filters.kernels.size() || rx.maps.size() != filters.kernels.size())
        throw UsageError("stack does not match the filter set");
    const Block8& dct = dctMatrix8();
    const double scale = static_cast<double>(step) * quant(u, v);
    double delta = 0.0;
    for (std::size_t k = 0; k < filters.kernels.size(); ++k) {
        const Eigen::MatrixXd& ker = filters.kernels[k];
        const RealGrid& z = rz.maps[k];
        const RealGrid& x = rx.maps[k];
        const BlockWindow win = blockWindow(ker, br, bc);
        for (Index rr = 0; rr < win.rows; ++rr) {
            const Index r = win.top + rr;
            if (r < 0 || r >= z.rows()) continue;
            for (Index cc = 0; cc < win.cols; ++cc) {
                const Index c = win.left + cc;
                if (c < 0 || c >= z.cols()) continue;
                const double before = z(r, c) - x(r, c);
                delta += std::abs(before + scale * windowResponse(ker, dct, u, v, rr, cc)) -
                         std::abs(before);
            }
        }
    }
    return delta;
}

}  // namespace spp
