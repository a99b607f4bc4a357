#ifndef CRITWAVE_ERRORS_HPP
#define CRITWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace critwave {

// Quadrature failed to converge, non-finite values appeared, etc.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation touched the edge of the grid and the result is contaminated.
struct truncation_error : std::runtime_error {
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace critwave

#endif
