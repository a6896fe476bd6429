#pragma once

#include <functional>
#include <vector>

namespace sfwm::opt {

struct SimplexOptions {
    double relative_tolerance = 1e-10;  // on simplex size relative to centroid scale
    int max_iterations = 20000;
};

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead downhill simplex. The initial simplex is the
/// start point plus one vertex per coordinate displaced by
/// step_relative * max(|x_k|, step_floor).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, double step_relative,
                          const SimplexOptions& options = {}, double step_floor = 1e-8);

/// Golden-section minimization of a unimodal f on [lo, hi] to absolute
/// tolerance tol on x.
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol, int max_iterations = 500);

}  // namespace sfwm::opt
