#pragma once

#include "kp/etd.hpp"
#include "kp/field.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kp {

struct DiagnosticsRow {
    double t = 0.0;
    double delta2 = 0.0; // relative L2 drift
    double linf = 0.0;
    double outer_band = 0.0;
};

struct RunDiagnostics {
    std::vector<DiagnosticsRow> rows;
};

struct Snapshot {
    double t = 0.0;
    SpectralField field;
};

struct GkpProblem {
    int n = 1;
    int sigma = 1;
    double epsilon = 0.1;
    GridSpec grid;
    SpectralField u0;
    double t_start = 0.0;
    double t_end = 0.1;
    int nt = 1000;
    double filter_threshold = 0.0; // 0 disables filtering
    // The nonlocal term requires zero x-mean; projection is skipped only for
    // pure 1D KdV reductions where the mean is a conserved Galilean offset.
    bool project_mean = true;
    std::vector<double> snapshot_times;
    // Blow-up guard: stop when linf exceeds ceiling_factor * linf(t=0) or the
    // outer coefficient band rises above decay_guard * linf_coeff.
    double linf_ceiling_factor = 1e3;
    double decay_guard = 1e-2;
};

struct EvolveResult {
    SpectralField final_field;
    double final_time = 0.0;
    RunDiagnostics diagnostics;
    std::vector<Snapshot> snapshots;
    bool stopped_early = false;
    double last_resolved_time = 0.0;
    std::string stop_reason;
};

// L(kx,ky) = i (eps^2 kx^3 + sigma ky^2 / kx); the kx = 0 column and the x
// Nyquist column are zeroed (same policy as antiderivative_x).
LinearSymbol gkp_symbol(const GridSpec& g, double epsilon, int sigma);

// N(u) = -(i kx) T[u^{n+1}]/(n+1) in coefficient space.
void gkp_nonlinearity(const GridSpec& g, const cvec& uhat, int n, cvec& out);

EvolveResult evolve_gkp(const GkpProblem& p);

// Largest |integral of u dx| across y rows.
double check_constraint_zero_mean(const SpectralField& f);

// Zero the kx = 0 column of a coefficient array; returns the largest modulus
// removed (the projection magnitude).
double project_out_x_mean(const GridSpec& g, cvec& coeffs);

} // namespace kp
