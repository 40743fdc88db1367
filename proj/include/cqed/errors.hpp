#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Invalid or malformed input (bad parameters, unparsable files). CLI exit code 2.
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string &msg) : std::invalid_argument(msg) {}
};

// Numerical failure at runtime (divergence, non-convergence, singular system).
// CLI exit code 1.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace cqed
