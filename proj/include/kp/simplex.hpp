#pragma once

#include <functional>
#include <vector>

namespace kp {

struct SimplexOptions {
    int max_iters = 2000;
    double f_abs_target = 0.0;  // stop once best value falls below this
    double x_tol = 1e-13;       // simplex diameter
    double f_tol = 0.0;         // spread of values
    double initial_step = 0.1;
};

struct SimplexResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iters = 0;
    bool converged = false;
};

// Derivative-free downhill simplex minimization (Nelder-Mead).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> seed, const SimplexOptions& opt);

} // namespace kp
