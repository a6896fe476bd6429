#pragma once

#include <stdexcept>
#include <vector>

namespace sfwm {

/// Optimizer failure carrying the last iterate so callers can inspect how far
/// the fit got.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, std::vector<double> last_iterate, double last_residual)
        : std::runtime_error(what), iterate(std::move(last_iterate)), residual(last_residual) {}

    std::vector<double> iterate;
    double residual;
};

}  // namespace sfwm
