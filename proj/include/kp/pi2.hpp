#pragma once

#include "kp/grid.hpp"

#include <vector>

namespace kp {

struct Pi2Config {
    double L = -1.0;        // half-width; <= 0 selects max(60, 8*|T|^{3/2} + 60)
    int N = 4096;           // grid points across [-L, L]
    double T_min = -10.0;
    double T_max = 2.0;
    double T_step = 0.01;   // continuation step (and slice spacing)
    // Oscillations sharpen for T > fine_from; slices there use T_step/fine_factor.
    double fine_from = 1e9; // default: no fine region
    int fine_factor = 4;
    double newton_tol = 1e-12;
    int max_newton_iters = 50;
    double store_xmax = 60.0; // table truncation for off-grid evaluation
};

struct Pi2SliceStats {
    double T = 0.0;
    double ode_residual = 0.0; // solver-stencil residual of the stored slice
    int newton_iters = 0;
    int oscillation_count = 0; // interior extrema with prominence > 1e-3
    double max_abs_u = 0.0;
};

struct Pi2Solution {
    double L = 0.0;
    int N = 0;
    std::vector<double> T;           // slice times, increasing
    std::vector<double> X;           // stored abscissae (|X| <= store_xmax)
    std::vector<std::vector<double>> U;   // per slice over X
    std::vector<std::vector<double>> U_X; // per slice over X
    std::vector<Pi2SliceStats> stats;
    double max_ode_residual = 0.0;
    double max_kdv_residual = 0.0; // cross-slice U_T + 6 U U_X + U_XXX
    int max_newton_iters_seen = 0;
};

// Boundary branch: U -> -sign(X)(|X|^{1/3} + 2T |X|^{-1/3}).
double pi2_asymptotic(double X, double T);

// Real root of U^3 - 6 T U + X = 0 on the decaying branch (unique for T < 0).
double cubic_branch_root(double X, double T);

// Fourth-order centered residual of the stationary equation
// X = 6TU - (U^3 + U_X^2/2 + U U_XX + U_XXXX/10)
// on the interior (three pinned rows at each end are reported as zero).
std::vector<double> pi2_residual(const std::vector<double>& U, double T, double L);

// Damped-free Newton solve at fixed T with Dirichlet rows from the
// asymptotic branch; throws numeric_failure on divergence.
std::vector<double> solve_at_T(double T, std::vector<double> guess, double L, double newton_tol,
                               int max_iters, int* iters_out = nullptr);

Pi2Solution continue_in_T(const Pi2Config& config);

// Table lookup: cubic in X on the two nearest slices, linear blend in T.
// |X| beyond the table falls back to pi2_asymptotic; T outside the sweep is
// rejected.
double eval_U(const Pi2Solution& sol, double X, double T);

} // namespace kp
