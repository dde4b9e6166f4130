#ifndef QLS_ERRORS_HPP
#define QLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qls {

// Bad inputs: unknown case ids, out-of-range parameters, grid mismatches.
// CLI maps these to exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The math refused: no sign change, quadrature non-convergence, ellipticity
// breach, iteration blow-up. CLI maps these to exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qls

#endif
