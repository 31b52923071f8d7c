#ifndef KS2_ERRORS_HPP
#define KS2_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ks2 {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error {
    NotPositiveDefinite() : std::runtime_error("matrix is not positive definite") {}
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalResidue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlphaMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidFrame : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when no remaining vector keeps the shifted matrix positive
// definite; outside the guaranteed regime this is a legitimate outcome.
struct BarrierBreach : std::runtime_error {
    std::size_t iteration;
    explicit BarrierBreach(std::size_t j)
        : std::runtime_error("barrier breached at iteration " + std::to_string(j)),
          iteration(j) {}
};

struct DegenerateBound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TraceMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SelectionMismatch : std::runtime_error {
    std::size_t iteration;
    std::size_t expected;
    std::size_t got;
    SelectionMismatch(std::size_t j, std::size_t want, std::size_t have)
        : std::runtime_error("selection mismatch at iteration " + std::to_string(j) +
                             ": expected index " + std::to_string(want) + ", trace has " +
                             std::to_string(have)),
          iteration(j), expected(want), got(have) {}
};

struct FingerprintMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace ks2

#endif
