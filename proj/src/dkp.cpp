#include "kp/dkp.hpp"

#include "kp/interp.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

LinearSymbol dkp_symbol(const GridSpec& g, int sigma) {
    return gkp_symbol(g, 0.0, sigma);
}

namespace {

// Physical-space factors of the F nonlinearity for one state.
struct NlFields {
    std::vector<double> F, Fxi, Fy, P;
};

void nl_fields(const GridSpec& g, const cvec& fhat, int n, NlFields& w) {
    const std::size_t sz = g.size();
    cvec tmp(sz);
    const double reg = 1e-16 * g.kx_max();

    if (n > 1) fft::inverse_real(g, fhat, w.F);

    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            cx fac = g.nyquist_x(ix) ? cx(0.0) : cx(0.0, g.kx(ix));
            tmp[g.idx(ix, iy)] = fac * fhat[g.idx(ix, iy)];
        }
    fft::inverse_real(g, tmp, w.Fxi);

    for (int iy = 0; iy < g.ny; ++iy) {
        cx fac = g.nyquist_y(iy) ? cx(0.0) : cx(0.0, g.ky(iy));
        for (int ix = 0; ix < g.nx; ++ix) tmp[g.idx(ix, iy)] = fac * fhat[g.idx(ix, iy)];
    }
    fft::inverse_real(g, tmp, w.Fy);

    // P = dxi^{-1} F_yy, with the kxi = 0 column annihilated.
    for (int iy = 0; iy < g.ny; ++iy) {
        const double ky = g.ky(iy);
        for (int ix = 0; ix < g.nx; ++ix) {
            if (g.mode_x(ix) == 0) {
                tmp[g.idx(ix, iy)] = 0.0;
                continue;
            }
            const double kx = g.kx(ix);
            const double s = kx > 0 ? 1.0 : -1.0;
            cx inv = 1.0 / (cx(0.0, 1.0) * cx(kx, reg * s));
            tmp[g.idx(ix, iy)] = -ky * ky * inv * fhat[g.idx(ix, iy)];
        }
    }
    fft::inverse_real(g, tmp, w.P);
}

} // namespace

void dkp_nonlinearity(const GridSpec& g, const cvec& fhat, double t, int n, int sigma, cvec& out) {
    if (t < 0.0) throw bad_input("dkp_nonlinearity: t must be >= 0");
    NlFields w;
    nl_fields(g, fhat, n, w);
    std::vector<double> prod(g.size());
    const double st = sigma * t * n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double fac = st;
        for (int j = 0; j < n - 1; ++j) fac *= w.F[i];
        prod[i] = fac * (w.Fxi[i] * w.P[i] - w.Fy[i] * w.Fy[i]);
        if (!std::isfinite(prod[i])) throw numeric_failure("dkp_nonlinearity: overflow");
    }
    fft::forward_real(g, prod, out);
}

SpectralField delta_field(const SpectralField& F, double t, int n) {
    const GridSpec& g = F.grid();
    cvec ghat;
    if (n == 1) {
        ghat = F.coeffs();
    } else {
        std::vector<double> gv = F.values();
        for (auto& v : gv) {
            double p = v;
            for (int j = 1; j < n; ++j) p *= v;
            v = p;
        }
        fft::forward_real(g, gv, ghat);
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            cx fac = g.nyquist_x(ix) ? cx(0.0) : cx(0.0, g.kx(ix));
            ghat[g.idx(ix, iy)] *= fac;
        }
    std::vector<double> gxi;
    fft::inverse_real(g, ghat, gxi);
    for (auto& v : gxi) v = 1.0 + t * v;
    return SpectralField::from_values(g, std::move(gxi));
}

double min_delta(const SpectralField& F, double t, int n) {
    SpectralField d = delta_field(F, t, n);
    const auto& v = d.values();
    return *std::min_element(v.begin(), v.end());
}

EvolveResult evolve_F(const DkpProblem& p, const StepObserver& observer) {
    const GridSpec& g = p.grid;
    if (p.nt < 1) throw bad_input("evolve_F: Nt must be >= 1");
    cvec fhat = p.f0.coeffs();

    const double h = (p.t_end - p.t_start) / p.nt;
    StepperConfig sc;
    sc.h = h;
    EtdStepper stepper(etd_precompute(dkp_symbol(g, p.sigma), sc));
    auto N = [&g, n = p.n, sigma = p.sigma](const cvec& s, double t, cvec& out) {
        dkp_nonlinearity(g, s, t, n, sigma, out);
    };

    EvolveResult res;
    double s0 = 0.0;
    for (const auto& c : fhat) s0 += std::norm(c);
    const double norm0 = std::sqrt(g.area() * s0);

    std::vector<int> snap_steps;
    for (double ts : p.snapshot_times) {
        int k = static_cast<int>(std::lround((ts - p.t_start) / h));
        if (k >= 0 && k <= p.nt) snap_steps.push_back(k);
    }
    if (std::count(snap_steps.begin(), snap_steps.end(), 0))
        res.snapshots.push_back({p.t_start, SpectralField::from_coeffs(g, fhat)});

    const int diag_stride = std::max(1, p.nt / 256);
    double t = p.t_start;
    res.last_resolved_time = t;
    for (int step = 1; step <= p.nt; ++step) {
        stepper.step(fhat, t, N);
        t = p.t_start + step * h;
        krasny_filter_inplace(fhat, p.krasny_threshold);

        if (step % diag_stride == 0 || step == p.nt) {
            DiagnosticsRow row;
            row.t = t;
            double s = 0.0;
            for (const auto& c : fhat) s += std::norm(c);
            double norm = std::sqrt(g.area() * s);
            row.delta2 = norm0 > 0.0 ? std::abs(norm - norm0) / norm0 : 0.0;
            SpectralField tmp = SpectralField::from_coeffs(g, fhat);
            DecayReport dr = decay_report(tmp);
            row.outer_band = dr.max_modulus_outer_band;
            const auto& vals = tmp.values();
            for (double v : vals) row.linf = std::max(row.linf, std::abs(v));
            res.diagnostics.rows.push_back(row);
            res.last_resolved_time = t;
        }
        if (std::count(snap_steps.begin(), snap_steps.end(), step))
            res.snapshots.push_back({t, SpectralField::from_coeffs(g, fhat)});
        if (observer && !observer(step, t, fhat)) {
            res.stopped_early = true;
            res.stop_reason = "stopped by observer";
            break;
        }
    }

    res.final_field = SpectralField::from_coeffs(g, std::move(fhat));
    res.final_time = t;
    return res;
}

CharacteristicSlice characteristic_slice(const SpectralField& F, double t, int n, int iy, bool keep_arrays) {
    const GridSpec& g = F.grid();
    const auto& fv = F.values();
    CharacteristicSlice s;
    s.y = g.y(iy);
    s.x.resize(g.nx);
    s.u.resize(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) {
        double f = fv[g.idx(ix, iy)];
        double gn = f;
        for (int j = 1; j < n; ++j) gn *= f;
        s.u[ix] = f;
        s.x[ix] = t * gn + g.x(ix);
    }
    s.monotone = true;
    double mind = std::numeric_limits<double>::infinity();
    for (int ix = 0; ix + 1 < g.nx; ++ix) {
        double dd = (s.x[ix + 1] - s.x[ix]) / g.dx(); // = Delta averaged over the cell
        mind = std::min(mind, dd);
        if (!(s.x[ix + 1] > s.x[ix])) s.monotone = false;
    }
    s.min_delta_row = mind;
    if (!keep_arrays) {
        s.x.clear();
        s.u.clear();
    }
    return s;
}

ReconstructedField reconstruct_u(const SpectralField& F, double t, int n,
                                 const std::vector<double>& target_x) {
    const GridSpec& g = F.grid();
    ReconstructedField out;
    out.target_x = target_x;
    out.u.assign(static_cast<std::size_t>(g.ny) * target_x.size(), 0.0);
    out.rows.reserve(g.ny);
    for (int iy = 0; iy < g.ny; ++iy) {
        CharacteristicSlice s = characteristic_slice(F, t, n, iy, true);
        if (s.monotone) {
            Pchip interp(s.x, s.u);
            for (std::size_t a = 0; a < target_x.size(); ++a) {
                double xq = target_x[a];
                if (xq < s.x.front() || xq > s.x.back()) {
                    out.any_extrapolated = true; // decay value 0 outside the image
                    continue;
                }
                out.u[iy * target_x.size() + a] = interp(xq);
            }
        }
        s.x.clear();
        s.u.clear();
        out.rows.push_back(std::move(s));
    }
    return out;
}

} // namespace kp
