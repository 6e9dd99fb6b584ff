#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace pscat {

struct SimplexOptions {
    int max_iter = 500;
    double rel_tol = 1e-10;  // relative spread of simplex values and vertices
};

struct SimplexResult {
    std::vector<double> x;
    double value;
    bool converged;
    int iterations;
};

// Derivative-free Nelder-Mead downhill simplex. The initial simplex is the
// start point plus one vertex per coordinate, offset by scale[i].
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, std::vector<double> scale,
                                 const SimplexOptions& opt = {}) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> v(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += scale[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(v[i]);

    auto order = [&] {
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
                std::swap(fv[j], fv[j - 1]);
                std::swap(v[j], v[j - 1]);
            }
    };
    order();

    int it = 0;
    bool converged = false;
    for (; it < opt.max_iter; ++it) {
        const double spread = std::abs(fv[n] - fv[0]);
        double vert = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            vert = std::max(vert, std::abs(v[n][i] - v[0][i]) /
                                      std::max(1.0, std::abs(v[0][i])));
        if (spread <= opt.rel_tol * std::max(1.0, std::abs(fv[0])) && vert <= opt.rel_tol) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += v[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (v[n][j] - centroid[j]);
            return p;
        };

        const std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                v[n] = xe;
                fv[n] = fe;
            } else {
                v[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            v[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                v[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
                    fv[i] = f(v[i]);
                }
            }
        }
        order();
    }
    return {v[0], fv[0], converged, it};
}

}  // namespace pscat
