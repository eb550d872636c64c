#pragma once

#include "kp/etd.hpp"
#include "kp/field.hpp"
#include "kp/gkp.hpp"

#include <functional>
#include <vector>

namespace kp {

struct DkpProblem {
    int n = 1;
    int sigma = 1;
    GridSpec grid;
    SpectralField f0;
    double t_start = 0.0;
    double t_end = 0.3;
    int nt = 1000;
    double krasny_threshold = 1e-10;
    std::vector<double> snapshot_times;
};

// Per fixed (y, t): characteristic image x_i = t F^n + xi_i and u_i = F.
struct CharacteristicSlice {
    double y = 0.0;
    std::vector<double> x;
    std::vector<double> u;
    bool monotone = false;
    double min_delta_row = 0.0;
};

struct ReconstructedField {
    std::vector<double> target_x;
    std::vector<double> u;                 // ny rows x target_x.size(), x fastest
    std::vector<CharacteristicSlice> rows; // per-row metadata (x/u kept only on request)
    bool any_extrapolated = false;
};

// L = i sigma ky^2/kxi with the kxi = 0 / Nyquist policy of gkp_symbol.
LinearSymbol dkp_symbol(const GridSpec& g, int sigma);

// Nonlinear remainder of the evolutionary F equation:
// N = sigma t n F^{n-1} (F_xi dxi^{-1}F_yy - F_y^2).
void dkp_nonlinearity(const GridSpec& g, const cvec& fhat, double t, int n, int sigma, cvec& out);

// Observer runs after each completed (and filtered) step; return false to
// stop the run early.
using StepObserver = std::function<bool(int step, double t, const cvec& fhat)>;

EvolveResult evolve_F(const DkpProblem& p, const StepObserver& observer = nullptr);

// Delta = 1 + t d/dxi(F^n) on the grid.
SpectralField delta_field(const SpectralField& F, double t, int n);
double min_delta(const SpectralField& F, double t, int n);

CharacteristicSlice characteristic_slice(const SpectralField& F, double t, int n, int iy,
                                         bool keep_arrays = true);

// Row-wise monotone cubic resampling of (x_i, u_i) onto target_x. Rows whose
// characteristic image is non-monotone are reported and left zero.
ReconstructedField reconstruct_u(const SpectralField& F, double t, int n,
                                 const std::vector<double>& target_x);

} // namespace kp
