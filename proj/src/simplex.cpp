#include "kp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> seed, const SimplexOptions& opt) {
    const std::size_t d = seed.size();
    std::vector<std::vector<double>> x(d + 1, seed);
    for (std::size_t i = 0; i < d; ++i) x[i + 1][i] += opt.initial_step;
    std::vector<double> fx(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fx[i] = f(x[i]);

    SimplexResult res;
    int it = 0;
    for (; it < opt.max_iters; ++it) {
        // order best first
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> xs(d + 1);
        std::vector<double> fs(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            xs[i] = x[idx[i]];
            fs[i] = fx[idx[i]];
        }
        x.swap(xs);
        fx.swap(fs);

        double diam = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j) diam = std::max(diam, std::abs(x[i][j] - x[0][j]));
        if (fx[0] <= opt.f_abs_target || diam <= opt.x_tol ||
            (opt.f_tol > 0.0 && std::abs(fx[d] - fx[0]) <= opt.f_tol)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) centroid[j] += x[i][j] / d;

        auto along = [&](double c) {
            std::vector<double> p(d);
            for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + c * (x[d][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = along(-1.0); // reflect worst through centroid
        double fr = f(xr);
        if (fr < fx[0]) {
            std::vector<double> xe = along(-2.0);
            double fe = f(xe);
            if (fe < fr) { x[d] = xe; fx[d] = fe; }
            else { x[d] = xr; fx[d] = fr; }
        } else if (fr < fx[d - 1]) {
            x[d] = xr;
            fx[d] = fr;
        } else {
            std::vector<double> xc = along(fr < fx[d] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fx[d])) {
                x[d] = xc;
                fx[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) x[i][j] = x[0][j] + 0.5 * (x[i][j] - x[0][j]);
                    fx[i] = f(x[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fx[i] < fx[best]) best = i;
    res.x = x[best];
    res.fmin = fx[best];
    res.iters = it;
    return res;
}

} // namespace kp
