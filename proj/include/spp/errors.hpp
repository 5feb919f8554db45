#ifndef SPP_ERRORS_HPP
#define SPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spp {

// Bad flags / bad call parameters. CLI maps this to exit code 64.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents (PGM, JCG, key, filter files). Exit code 65.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble: missing file, failed write. Exit code 66.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Algorithmic failure: infeasible embedding, rank-deficient learning,
// payload over capacity. Exit code 2.
struct AlgorithmError : std::runtime_error {
    explicit AlgorithmError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spp

#endif
