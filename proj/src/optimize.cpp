#include "sfwm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sfwm::opt {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, double step_relative,
                          const SimplexOptions& options, double step_floor) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> verts(n + 1, start);
    for (std::size_t k = 0; k < n; ++k)
        verts[k + 1][k] += step_relative * std::max(std::abs(start[k]), step_floor);
    std::vector<double> fv(n + 1);
    for (std::size_t v = 0; v <= n; ++v) fv[v] = f(verts[v]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> v2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            v2[i] = verts[idx[i]];
            f2[i] = fv[idx[i]];
        }
        verts.swap(v2);
        fv.swap(f2);
    };

    SimplexResult res;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        order();

        // Relative simplex extent against the best-vertex scale.
        double extent = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double lo = verts[0][k], hi = verts[0][k];
            for (std::size_t v = 1; v <= n; ++v) {
                lo = std::min(lo, verts[v][k]);
                hi = std::max(hi, verts[v][k]);
            }
            extent = std::max(extent, hi - lo);
            scale = std::max(scale, std::abs(verts[0][k]));
        }
        if (extent <= options.relative_tolerance * std::max(scale, 1.0)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += verts[v][k] / double(n);

        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + coeff * (verts[n][k] - centroid[k]);
            return p;
        };

        auto reflected = blend(-1.0);
        double fr = f(reflected);
        if (fr < fv[0]) {
            auto expanded = blend(-2.0);
            double fe = f(expanded);
            if (fe < fr) {
                verts[n] = std::move(expanded);
                fv[n] = fe;
            } else {
                verts[n] = std::move(reflected);
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            verts[n] = std::move(reflected);
            fv[n] = fr;
        } else {
            auto contracted = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, fv[n])) {
                verts[n] = std::move(contracted);
                fv[n] = fc;
            } else {
                // shrink toward best
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t k = 0; k < n; ++k)
                        verts[v][k] = verts[0][k] + 0.5 * (verts[v][k] - verts[0][k]);
                    fv[v] = f(verts[v]);
                }
            }
        }
    }
    order();
    res.x = verts[0];
    res.fx = fv[0];
    res.iterations = it;
    return res;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol, int max_iterations) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace sfwm::opt
