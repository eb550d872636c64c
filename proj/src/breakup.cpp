#include "kp/breakup.hpp"

#include "kp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

DkpFlow::DkpFlow(const DkpProblem& p)
    : grid_(p.grid), n_(p.n), sigma_(p.sigma), krasny_(p.krasny_threshold), t_(p.t_start),
      fhat_(p.f0.coeffs()) {}

void DkpFlow::seek(double t, const cvec& state) {
    t_ = t;
    fhat_ = state;
}

void DkpFlow::advance(double h) {
    if (h != cached_h_) {
        StepperConfig sc;
        sc.h = h;
        stepper_ = std::make_unique<EtdStepper>(etd_precompute(dkp_symbol(grid_, sigma_), sc));
        cached_h_ = h;
    }
    auto N = [this](const cvec& s, double t, cvec& out) {
        dkp_nonlinearity(grid_, s, t, n_, sigma_, out);
    };
    stepper_->step(fhat_, t_, N);
    t_ += h;
    krasny_filter_inplace(fhat_, krasny_);
}

namespace {

// Mask the connected Delta<0 component nearest each exclusion point.
void mask_component(const GridSpec& g, const std::vector<double>& delta, std::vector<uint8_t>& masked,
                    double xi, double y) {
    // nearest grid indices
    int ix0 = static_cast<int>(std::lround((xi / g.lx + pi) * g.nx / (2.0 * pi)));
    int iy0 = g.ny == 1 ? 0 : static_cast<int>(std::lround((y / g.ly + pi) * g.ny / (2.0 * pi)));
    ix0 = ((ix0 % g.nx) + g.nx) % g.nx;
    iy0 = ((iy0 % g.ny) + g.ny) % g.ny;

    // flood every negative cell within a small window of the point
    const int w = 8;
    std::vector<std::size_t> stack;
    for (int dy = -w; dy <= w; ++dy)
        for (int dx = -w; dx <= w; ++dx) {
            int ix = (ix0 + dx + g.nx) % g.nx;
            int iy = (iy0 + dy + g.ny) % g.ny;
            if (delta[g.idx(ix, iy)] < 0.0) stack.push_back(g.idx(ix, iy));
        }
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        if (masked[i] || delta[i] >= 0.0) continue;
        masked[i] = 1;
        int ix = static_cast<int>(i % g.nx);
        int iy = static_cast<int>(i / g.nx);
        stack.push_back(g.idx((ix + 1) % g.nx, iy));
        stack.push_back(g.idx((ix + g.nx - 1) % g.nx, iy));
        if (g.ny > 1) {
            stack.push_back(g.idx(ix, (iy + 1) % g.ny));
            stack.push_back(g.idx(ix, (iy + g.ny - 1) % g.ny));
        }
    }
}

} // namespace

double masked_min_delta(const SpectralField& F, double t, int n,
                        const std::vector<std::pair<double, double>>& exclusions) {
    const GridSpec& g = F.grid();
    SpectralField dfield = delta_field(F, t, n);
    const auto& d = dfield.values();
    if (exclusions.empty()) return *std::min_element(d.begin(), d.end());
    std::vector<uint8_t> masked(g.size(), 0);
    for (auto [xi, y] : exclusions) mask_component(g, d, masked, xi, y);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!masked[i]) m = std::min(m, d[i]);
    return m;
}

LocateResult locate_critical_xy(const SpectralField& F_at_tc, double t_c, int n,
                                const std::vector<std::pair<double, double>>& exclusions) {
    const GridSpec& g = F_at_tc.grid();
    SpectralField G = F_at_tc;
    if (n > 1) {
        std::vector<double> gv = F_at_tc.values();
        for (auto& v : gv) {
            double p = v;
            for (int j = 1; j < n; ++j) p *= v;
            v = p;
        }
        G = SpectralField::from_values(g, std::move(gv));
    }
    G.coeffs();

    SpectralField dfield = delta_field(F_at_tc, t_c, n);
    const auto& dvals = dfield.values();
    std::vector<uint8_t> masked(g.size(), 0);
    for (auto [xi, y] : exclusions) mask_component(g, dvals, masked, xi, y);
    std::size_t imin = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!masked[i] && dvals[i] < dmin) {
            dmin = dvals[i];
            imin = i;
        }
    double xi0 = g.x(static_cast<int>(imin % g.nx));
    double y0 = g.y(static_cast<int>(imin / g.nx));

    const std::vector<std::pair<int, int>> orders{{2, 0}, {1, 1}};
    auto objective = [&](const std::vector<double>& p) {
        auto v = evaluate_series_batch(G, p[0], p[1], orders);
        return v[0] * v[0] + v[1] * v[1];
    };

    SimplexOptions so;
    so.max_iters = 400;
    so.f_abs_target = 1e-20;
    so.x_tol = 1e-13;
    so.initial_step = std::min(g.dx(), g.dy());
    SimplexResult sr = nelder_mead(objective, {xi0, y0}, so);

    LocateResult lr;
    lr.xi_c = sr.x[0];
    lr.y_c = sr.x[1];
    auto v = evaluate_series_batch(G, lr.xi_c, lr.y_c, orders);
    lr.g_xixi = v[0];
    lr.g_xiy = v[1];
    lr.objective = sr.fmin;
    lr.converged = sr.converged;
    lr.iters = sr.iters;
    return lr;
}

StencilSnapshots collect_stencil(FlowDriver& flow, double base_t, const cvec& base_state,
                                 double t_c, double dt) {
    if (base_t > t_c - 2.0 * dt + 1e-15 * std::abs(t_c))
        throw bad_input("collect_stencil: base state must predate t_c - 2*dt");
    StencilSnapshots s;
    s.t_c = t_c;
    s.dt = dt;
    flow.seek(base_t, base_state);
    const double h_pref = dt / 4.0;
    for (int j = -2; j <= 2; ++j) {
        double target = t_c + j * dt;
        double gap = target - flow.time();
        if (gap > 0.0) {
            int steps = std::max(1, static_cast<int>(std::ceil(gap / h_pref)));
            double h = gap / steps;
            for (int k = 0; k < steps; ++k) flow.advance(h);
        }
        s.F[j + 2] = SpectralField::from_coeffs(flow.grid(), flow.state());
    }
    return s;
}

CriticalPoint extract_bundle(const StencilSnapshots& snaps, double xi_c, double y_c, int n, int sigma) {
    const GridSpec& g = snaps.F[0].grid();
    CriticalPoint cp;
    cp.t_c = snaps.t_c;
    cp.xi_c = xi_c;
    cp.y_c = y_c;
    cp.n = n;
    cp.sigma = sigma;

    // Per-snapshot point values needed for the time stencils.
    struct Slice {
        double G, G_y, G_xi, F, F_y, F_xi;
    };
    std::array<Slice, 5> sl;
    const std::vector<std::pair<int, int>> tv_orders{{0, 0}, {0, 1}, {1, 0}};
    for (int j = 0; j < 5; ++j) {
        const SpectralField& F = snaps.F[j];
        SpectralField G = F;
        if (n > 1) {
            std::vector<double> gv = F.values();
            for (auto& v : gv) {
                double p = v;
                for (int q = 1; q < n; ++q) p *= v;
                v = p;
            }
            G = SpectralField::from_values(g, std::move(gv));
        }
        auto gv = evaluate_series_batch(G, xi_c, y_c, tv_orders);
        auto fv = evaluate_series_batch(F, xi_c, y_c, tv_orders);
        sl[j] = {gv[0], gv[1], gv[2], fv[0], fv[1], fv[2]};

        if (j == 2) {
            auto gb = evaluate_series_batch(
                G, xi_c, y_c,
                {{0, 0}, {1, 0}, {2, 0}, {1, 1}, {3, 0}, {2, 1}, {1, 2}, {0, 1}, {0, 2}, {0, 3}});
            cp.G = gb[0];
            cp.G_xi = gb[1];
            cp.G_xixi = gb[2];
            cp.G_xiy = gb[3];
            cp.G_xixixi = gb[4];
            cp.G_xixiy = gb[5];
            cp.G_xiyy = gb[6];
            cp.G_y = gb[7];
            cp.G_yy = gb[8];
            cp.G_yyy = gb[9];
            auto fb = evaluate_series_batch(F, xi_c, y_c, {{1, 0}, {0, 1}, {0, 2}, {1, 1}});
            cp.F_xi = fb[0];
            cp.F_y = fb[1];
            cp.F_yy = fb[2];
            cp.F_xiy = fb[3];
            cp.u_c = fv[0];
        }
    }

    auto ddt = [&](auto getter) {
        return (getter(sl[0]) - 8.0 * getter(sl[1]) + 8.0 * getter(sl[3]) - getter(sl[4])) /
               (12.0 * snaps.dt);
    };
    cp.G_t = ddt([](const Slice& s) { return s.G; });
    cp.G_yt = ddt([](const Slice& s) { return s.G_y; });
    cp.G_xit = ddt([](const Slice& s) { return s.G_xi; });
    cp.F_t = ddt([](const Slice& s) { return s.F; });
    cp.F_yt = ddt([](const Slice& s) { return s.F_y; });
    cp.F_xit = ddt([](const Slice& s) { return s.F_xi; });

    cp.x_c = cp.t_c * cp.G + cp.xi_c; // G = F^n at the point
    cp.delta_at_c = 1.0 + cp.t_c * cp.G_xi;
    cp.k = std::pow(cp.t_c, 4) * cp.G_xixixi;
    cp.kappa = -36.0 * cp.G_xixixi * std::pow(cp.t_c, 4);
    cp.beta_bar = cp.F_y - cp.F_xi * cp.G_xixiy / cp.G_xixixi;

    const double s = sigma;
    cp.res_Ft = cp.F_t + s * cp.t_c * cp.G_y * cp.F_y;
    cp.res_Fyt = cp.F_yt + s * cp.t_c * (cp.G_y * cp.F_yy + cp.G_yy * cp.F_y);
    cp.res_Fxit = cp.F_xit + s * cp.t_c * (cp.G_y * cp.F_xiy + cp.G_xiy * cp.F_y);
    auto rel = [](double res, double a, double b) {
        return std::abs(res) / std::max({1.0, std::abs(a), std::abs(b)});
    };
    cp.rel_res_Ft = rel(cp.res_Ft, cp.F_t, cp.t_c * cp.G_y * cp.F_y);
    cp.rel_res_Fyt = rel(cp.res_Fyt, cp.F_yt, cp.t_c * (cp.G_y * cp.F_yy + cp.G_yy * cp.F_y));
    cp.rel_res_Fxit = rel(cp.res_Fxit, cp.F_xit, cp.t_c * (cp.G_y * cp.F_xiy + cp.G_xiy * cp.F_y));

    const double curv = std::max({std::abs(cp.G_xixixi), std::abs(cp.G_xixiy), std::abs(cp.G_xiyy), 1e-300});
    cp.generic = std::abs(cp.G_xixixi) > 1e-6 * curv && std::abs(cp.G_xixiy) > 1e-6 * curv &&
                 std::abs(cp.G_xiyy) > 1e-6 * curv;
    return cp;
}

BreakupSearch::BreakupSearch(FlowDriver& flow, double t_end, int nt) : flow_(flow), t_end_(t_end) {
    if (nt < 1) throw bad_input("BreakupSearch: nt must be >= 1");
    h_ = (t_end - flow.time()) / nt;
    if (!(h_ > 0.0)) throw bad_input("BreakupSearch: t_end must exceed the flow time");
}

double BreakupSearch::monitored_delta() const {
    SpectralField F = SpectralField::from_coeffs(flow_.grid(), flow_.state());
    return masked_min_delta(F, flow_.time(), flow_.order_n(), exclusions_);
}

std::optional<Bracket> BreakupSearch::find_next_bracket() {
    double prev_delta = monitored_delta();
    if (history_.empty()) history_.emplace_back(flow_.time(), flow_.state());
    while (flow_.time() < t_end_ - 0.5 * h_) {
        flow_.advance(h_);
        double d = monitored_delta();
        if (d < 0.0 && prev_delta >= 0.0) {
            Bracket b;
            b.t_hi = flow_.time();
            b.delta_hi = d;
            b.state_hi = flow_.state();
            b.t_lo = history_.back().first;
            b.delta_lo = prev_delta;
            b.state_lo = history_.back().second;
            b.h = h_;
            return b;
        }
        prev_delta = d;
        history_.emplace_back(flow_.time(), flow_.state());
        while (history_.size() > 3) history_.pop_front();
    }
    return std::nullopt;
}

Bracket BreakupSearch::refine(Bracket b, int levels, int nt_refine) {
    for (int level = 0; level < levels; ++level) {
        bool found = false;
        for (int attempt = 0; attempt < 2 && !found; ++attempt) {
            double span = (b.t_hi - b.t_lo) * (attempt == 0 ? 1.0 : 2.0);
            double h = span / nt_refine;
            flow_.seek(b.t_lo, b.state_lo);
            double prev_t = b.t_lo;
            cvec prev_state = b.state_lo;
            double prev_delta = b.delta_lo;
            for (int k = 0; k < nt_refine; ++k) {
                flow_.advance(h);
                double d = monitored_delta();
                if (d < 0.0) {
                    Bracket nb;
                    nb.t_lo = prev_t;
                    nb.delta_lo = prev_delta;
                    nb.state_lo = std::move(prev_state);
                    nb.t_hi = flow_.time();
                    nb.delta_hi = d;
                    nb.state_hi = flow_.state();
                    nb.h = h;
                    b = std::move(nb);
                    found = true;
                    break;
                }
                prev_t = flow_.time();
                prev_state = flow_.state();
                prev_delta = d;
            }
        }
        if (!found) throw numeric_failure("refine_tc: sign change lost on refinement");
    }
    return b;
}

BreakupHit BreakupSearch::find_next(const BreakupOptions& opt) {
    auto b0 = find_next_bracket();
    if (!b0) throw numeric_failure("bracket_tc: no break-up in window");

    // Base state for the time stencil: earliest rolling history entry.
    double base_t = history_.front().first;
    cvec base_state = history_.front().second;

    Bracket fine = refine(*b0, opt.levels, opt.nt_refine);
    double t_c = 0.5 * (fine.t_lo + fine.t_hi);

    // Field at t_c: half a refined step from the bracket floor.
    flow_.seek(fine.t_lo, fine.state_lo);
    if (t_c > fine.t_lo) flow_.advance(t_c - fine.t_lo);
    SpectralField F_tc = SpectralField::from_coeffs(flow_.grid(), flow_.state());

    LocateResult loc = locate_critical_xy(F_tc, t_c, flow_.order_n(), exclusions_);

    double dt = 0.5 * b0->h;
    if (base_t > t_c - 2.0 * dt) dt = 0.5 * (t_c - base_t); // degenerate early bracket
    StencilSnapshots snaps = collect_stencil(flow_, base_t, base_state, t_c, dt);
    CriticalPoint cp = extract_bundle(snaps, loc.xi_c, loc.y_c, flow_.order_n(), flow_.flow_sigma());

    BreakupHit hit;
    hit.cp = cp;
    hit.locate = loc;
    hit.bracket_width = fine.width();
    hit.index = ++hits_;
    add_exclusion(loc.xi_c, loc.y_c);

    // Resume the coarse walk just past this break-up.
    flow_.seek(b0->t_hi, b0->state_hi);
    history_.clear();
    history_.emplace_back(flow_.time(), flow_.state());
    hit.refined = std::move(fine);
    return hit;
}

} // namespace kp
