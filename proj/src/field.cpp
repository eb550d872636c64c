#include "kp/field.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

SpectralField SpectralField::from_values(const GridSpec& g, std::vector<double> v) {
    if (v.size() != g.size()) throw bad_input("SpectralField: sample count does not match grid");
    SpectralField f;
    f.grid_ = g;
    f.values_ = std::move(v);
    f.has_values_ = true;
    return f;
}

SpectralField SpectralField::from_coeffs(const GridSpec& g, cvec c) {
    if (c.size() != g.size()) throw bad_input("SpectralField: coefficient count does not match grid");
    SpectralField f;
    f.grid_ = g;
    f.coeffs_ = std::move(c);
    f.has_coeffs_ = true;
    return f;
}

const cvec& SpectralField::coeffs() const {
    if (!has_coeffs_) {
        for (double v : values_)
            if (!std::isfinite(v)) throw numeric_failure("transform: non-finite sample");
        fft::forward_real(grid_, values_, coeffs_);
        has_coeffs_ = true;
    }
    return coeffs_;
}

const std::vector<double>& SpectralField::values() const {
    if (!has_values_) {
        fft::inverse_real(grid_, coeffs_, values_);
        has_values_ = true;
    }
    return values_;
}

cvec& SpectralField::mutable_coeffs() {
    coeffs(); // ensure present
    has_values_ = false;
    return coeffs_;
}

std::vector<double>& SpectralField::mutable_values() {
    values();
    has_coeffs_ = false;
    return values_;
}

SpectralField partial(const SpectralField& f, Axis axis, int order) {
    if (order < 1 || order > 4) throw bad_input("partial: order must be in 1..4");
    const GridSpec& g = f.grid();
    cvec c = f.coeffs();
    const bool odd = order % 2 == 1;
    if (axis == Axis::X) {
        std::vector<cx> fac(g.nx);
        for (int ix = 0; ix < g.nx; ++ix) {
            if (odd && g.nyquist_x(ix)) { fac[ix] = 0.0; continue; }
            fac[ix] = std::pow(cx(0.0, g.kx(ix)), order);
        }
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) c[g.idx(ix, iy)] *= fac[ix];
    } else {
        for (int iy = 0; iy < g.ny; ++iy) {
            cx fac = (odd && g.nyquist_y(iy)) ? cx(0.0) : std::pow(cx(0.0, g.ky(iy)), order);
            for (int ix = 0; ix < g.nx; ++ix) c[g.idx(ix, iy)] *= fac;
        }
    }
    return SpectralField::from_coeffs(g, std::move(c));
}

SpectralField antiderivative_x(const SpectralField& f, double regularization) {
    const GridSpec& g = f.grid();
    const double reg = regularization < 0.0 ? 1e-16 * g.kx_max() : regularization;
    cvec c = f.coeffs();
    std::vector<cx> inv(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) {
        if (g.mode_x(ix) == 0) { inv[ix] = 0.0; continue; }
        double k = g.kx(ix);
        double s = k > 0 ? 1.0 : -1.0;
        inv[ix] = 1.0 / (cx(0.0, 1.0) * cx(k, reg * s));
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) c[g.idx(ix, iy)] *= inv[ix];
    return SpectralField::from_coeffs(g, std::move(c));
}

void krasny_filter_inplace(cvec& coeffs, double threshold) {
    if (threshold < 0.0) throw bad_input("krasny_filter: negative threshold");
    if (threshold == 0.0) return;
    const double t2 = threshold * threshold;
    for (auto& c : coeffs)
        if (std::norm(c) < t2) c = 0.0;
}

SpectralField krasny_filter(const SpectralField& f, double threshold) {
    cvec c = f.coeffs();
    krasny_filter_inplace(c, threshold);
    return SpectralField::from_coeffs(f.grid(), std::move(c));
}

namespace {

// Phase/derivative factor tables for one axis: e^{ikq} (i k)^order, with
// odd-order Nyquist zeroed as in partial(). Coefficients are phase-true, so
// no grid-origin shift appears here.
std::vector<cx> axis_factors(int n, double L, bool /*is_y*/, double q, int order) {
    std::vector<cx> t(n);
    for (int i = 0; i < n; ++i) {
        int m = (n == 1) ? 0 : (i < n / 2 ? i : i - n);
        double k = m / L;
        cx ph = std::exp(cx(0.0, k * q));
        cx d = order == 0 ? cx(1.0) : std::pow(cx(0.0, k), order);
        if (order % 2 == 1 && n > 1 && i == n / 2) d = 0.0;
        t[i] = ph * d;
    }
    return t;
}

} // namespace

double evaluate_series(const SpectralField& f, double x, double y, int dx_order, int dy_order) {
    if (dx_order < 0 || dx_order > 3 || dy_order < 0 || dy_order > 3)
        throw bad_input("evaluate_series: derivative orders must be in 0..3");
    const GridSpec& g = f.grid();
    const cvec& c = f.coeffs();
    auto ex = axis_factors(g.nx, g.lx, false, x, dx_order);
    auto ey = axis_factors(g.ny, g.ly, true, y, dy_order);
    cx total = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const cx* row = c.data() + g.idx(0, iy);
        cx rowsum = 0.0;
        for (int ix = 0; ix < g.nx; ++ix) rowsum += row[ix] * ex[ix];
        total += ey[iy] * rowsum;
    }
    return total.real();
}

std::vector<double> evaluate_series_grid(const SpectralField& f, const std::vector<double>& xs,
                                         const std::vector<double>& ys, int dx_order, int dy_order) {
    const GridSpec& g = f.grid();
    const cvec& c = f.coeffs();
    const std::size_t na = xs.size(), nb = ys.size();
    // Stage 1: contract over ky per x-mode.
    std::vector<cx> s(nb * g.nx, cx(0.0));
    for (std::size_t b = 0; b < nb; ++b) {
        auto ey = axis_factors(g.ny, g.ly, true, ys[b], dy_order);
        cx* srow = s.data() + b * g.nx;
        for (int iy = 0; iy < g.ny; ++iy) {
            const cx eyv = ey[iy];
            if (eyv == cx(0.0)) continue;
            const cx* row = c.data() + g.idx(0, iy);
            for (int ix = 0; ix < g.nx; ++ix) srow[ix] += eyv * row[ix];
        }
    }
    // Stage 2: contract over kx per target x.
    std::vector<double> out(na * nb, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
        auto ex = axis_factors(g.nx, g.lx, false, xs[a], dx_order);
        for (std::size_t b = 0; b < nb; ++b) {
            const cx* srow = s.data() + b * g.nx;
            cx total = 0.0;
            for (int ix = 0; ix < g.nx; ++ix) total += srow[ix] * ex[ix];
            out[b * na + a] = total.real();
        }
    }
    return out;
}

std::vector<double> evaluate_series_batch(const SpectralField& f, double x, double y,
                                          const std::vector<std::pair<int, int>>& orders) {
    const GridSpec& g = f.grid();
    const cvec& c = f.coeffs();
    bool need_x[4] = {false, false, false, false};
    bool need_y[4] = {false, false, false, false};
    for (auto [a, b] : orders) {
        if (a < 0 || a > 3 || b < 0 || b > 3) throw bad_input("evaluate_series_batch: orders in 0..3");
        need_x[a] = true;
        need_y[b] = true;
    }
    std::vector<cx> ex[4], ey[4];
    for (int a = 0; a < 4; ++a)
        if (need_x[a]) ex[a] = axis_factors(g.nx, g.lx, false, x, a);
    for (int b = 0; b < 4; ++b)
        if (need_y[b]) ey[b] = axis_factors(g.ny, g.ly, true, y, b);

    // Row sums per x-derivative order, one pass over the coefficients.
    std::vector<cx> rows[4];
    for (int a = 0; a < 4; ++a)
        if (need_x[a]) rows[a].assign(g.ny, cx(0.0));
    for (int iy = 0; iy < g.ny; ++iy) {
        const cx* row = c.data() + g.idx(0, iy);
        for (int a = 0; a < 4; ++a) {
            if (!need_x[a]) continue;
            cx s = 0.0;
            const cx* e = ex[a].data();
            for (int ix = 0; ix < g.nx; ++ix) s += row[ix] * e[ix];
            rows[a][iy] = s;
        }
    }
    std::vector<double> out;
    out.reserve(orders.size());
    for (auto [a, b] : orders) {
        cx total = 0.0;
        for (int iy = 0; iy < g.ny; ++iy) total += ey[b][iy] * rows[a][iy];
        out.push_back(total.real());
    }
    return out;
}

double l2_norm(const SpectralField& f) {
    const cvec& c = f.coeffs();
    double s = 0.0;
    for (const auto& v : c) s += std::norm(v);
    return std::sqrt(f.grid().area() * s);
}

std::optional<double> relative_l2_drift(const SpectralField& current, const SpectralField& initial) {
    double n0 = l2_norm(initial);
    if (n0 == 0.0) return std::nullopt;
    return std::abs(l2_norm(current) - n0) / n0;
}

DecayReport decay_report(const SpectralField& f) {
    const GridSpec& g = f.grid();
    const cvec& c = f.coeffs();
    DecayReport r;
    const double bx = 0.9 * (g.nx / 2);
    const double by = 0.9 * (g.ny / 2);
    for (int iy = 0; iy < g.ny; ++iy) {
        bool yband = g.ny > 1 && std::abs(g.mode_y(iy)) >= by;
        for (int ix = 0; ix < g.nx; ++ix) {
            double m = std::abs(c[g.idx(ix, iy)]);
            r.linf_coeff = std::max(r.linf_coeff, m);
            if (yband || (g.nx > 1 && std::abs(g.mode_x(ix)) >= bx))
                r.max_modulus_outer_band = std::max(r.max_modulus_outer_band, m);
        }
    }
    return r;
}

} // namespace kp
