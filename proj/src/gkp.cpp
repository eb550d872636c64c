#include "kp/gkp.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

LinearSymbol gkp_symbol(const GridSpec& g, double epsilon, int sigma) {
    LinearSymbol L;
    L.values.assign(g.size(), cx(0.0));
    const double reg = 1e-16 * g.kx_max();
    for (int iy = 0; iy < g.ny; ++iy) {
        const double ky = g.ky(iy);
        for (int ix = 0; ix < g.nx; ++ix) {
            if (g.mode_x(ix) == 0 || g.nyquist_x(ix)) continue;
            const double kx = g.kx(ix);
            // 1/kx kept purely imaginary in L: Im part of the regularized
            // division, so the linear flow is exactly norm-preserving.
            const double invkx = kx / (kx * kx + reg * reg);
            L.values[g.idx(ix, iy)] = cx(0.0, epsilon * epsilon * kx * kx * kx + sigma * ky * ky * invkx);
        }
    }
    return L;
}

void gkp_nonlinearity(const GridSpec& g, const cvec& uhat, int n, cvec& out) {
    if (n < 1) throw bad_input("gkp_nonlinearity: n must be >= 1");
    std::vector<double> u;
    fft::inverse_real(g, uhat, u);
    for (auto& v : u) {
        double p = v;
        for (int j = 0; j < n; ++j) p *= v; // u^{n+1}
        if (!std::isfinite(p)) throw numeric_failure("gkp_nonlinearity: overflow in power evaluation");
        v = p;
    }
    fft::forward_real(g, u, out);
    const double inv = 1.0 / (n + 1);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            auto& c = out[g.idx(ix, iy)];
            c = g.nyquist_x(ix) ? cx(0.0) : cx(0.0, -g.kx(ix) * inv) * c;
        }
}

double project_out_x_mean(const GridSpec& g, cvec& coeffs) {
    double removed = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        auto& c = coeffs[g.idx(0, iy)];
        removed = std::max(removed, std::abs(c));
        c = 0.0;
    }
    return removed;
}

double check_constraint_zero_mean(const SpectralField& f) {
    const GridSpec& g = f.grid();
    const cvec& c = f.coeffs();
    // Row integrals are the inverse y-transform of the kx = 0 column times
    // the domain length in x.
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        cx s = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            s += c[g.idx(0, iy)] * std::exp(cx(0.0, 2.0 * pi * iy * j / g.ny));
        worst = std::max(worst, std::abs(s.real()) * 2.0 * pi * g.lx);
    }
    return worst;
}

namespace {

DiagnosticsRow diagnostics_row(const GridSpec& g, const cvec& uhat, double t, double norm0,
                               DecayReport* dr_out = nullptr) {
    DiagnosticsRow row;
    row.t = t;
    double s = 0.0;
    for (const auto& c : uhat) s += std::norm(c);
    double norm = std::sqrt(g.area() * s);
    row.delta2 = norm0 > 0.0 ? std::abs(norm - norm0) / norm0 : 0.0;
    std::vector<double> u;
    fft::inverse_real(g, uhat, u);
    row.linf = 0.0;
    for (double v : u) row.linf = std::max(row.linf, std::abs(v));
    SpectralField tmp = SpectralField::from_coeffs(g, uhat);
    DecayReport dr = decay_report(tmp);
    row.outer_band = dr.max_modulus_outer_band;
    if (dr_out) *dr_out = dr;
    return row;
}

} // namespace

EvolveResult evolve_gkp(const GkpProblem& p) {
    const GridSpec& g = p.grid;
    if (p.nt < 1) throw bad_input("evolve_gkp: Nt must be >= 1");
    cvec uhat = p.u0.coeffs();
    if (p.project_mean) project_out_x_mean(g, uhat);

    const double h = (p.t_end - p.t_start) / p.nt;
    StepperConfig sc;
    sc.h = h;
    EtdStepper stepper(etd_precompute(gkp_symbol(g, p.epsilon, p.sigma), sc));
    auto N = [&g, n = p.n](const cvec& s, double, cvec& out) { gkp_nonlinearity(g, s, n, out); };

    EvolveResult res;
    double s0 = 0.0;
    for (const auto& c : uhat) s0 += std::norm(c);
    const double norm0 = std::sqrt(g.area() * s0);

    DiagnosticsRow first = diagnostics_row(g, uhat, p.t_start, norm0);
    res.diagnostics.rows.push_back(first);
    const double linf_ceiling = p.linf_ceiling_factor * std::max(first.linf, 1e-300);
    res.last_resolved_time = p.t_start;

    // Step indices at which to record snapshots.
    std::vector<int> snap_steps;
    for (double ts : p.snapshot_times) {
        int k = static_cast<int>(std::lround((ts - p.t_start) / h));
        if (k >= 0 && k <= p.nt) snap_steps.push_back(k);
    }
    if (std::count(snap_steps.begin(), snap_steps.end(), 0))
        res.snapshots.push_back({p.t_start, SpectralField::from_coeffs(g, uhat)});

    const int diag_stride = std::max(1, p.nt / 256);
    double t = p.t_start;
    for (int step = 1; step <= p.nt; ++step) {
        stepper.step(uhat, t, N);
        t = p.t_start + step * h;
        if (p.filter_threshold > 0.0) krasny_filter_inplace(uhat, p.filter_threshold);

        if (step % diag_stride == 0 || step == p.nt) {
            DecayReport dr;
            DiagnosticsRow row = diagnostics_row(g, uhat, t, norm0, &dr);
            res.diagnostics.rows.push_back(row);
            if (row.linf > linf_ceiling) {
                res.stopped_early = true;
                res.stop_reason = "linf ceiling exceeded";
            } else if (dr.linf_coeff > 0.0 && dr.max_modulus_outer_band > p.decay_guard * dr.linf_coeff) {
                res.stopped_early = true;
                res.stop_reason = "coefficient decay lost";
            }
            if (res.stopped_early) break;
            res.last_resolved_time = t;
        }
        if (std::count(snap_steps.begin(), snap_steps.end(), step))
            res.snapshots.push_back({t, SpectralField::from_coeffs(g, uhat)});
    }

    res.final_field = SpectralField::from_coeffs(g, std::move(uhat));
    res.final_time = t;
    return res;
}

} // namespace kp
