#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kp/dkp.hpp"
#include "kp/initial_data.hpp"

#include <cmath>

using namespace kp;

namespace {

// independent slow projection onto the modes, physical coordinates
cvec slow_forward(const GridSpec& g, const std::vector<double>& v) {
    cvec out(g.size(), cx(0.0));
    for (int my = 0; my < g.ny; ++my)
        for (int mx = 0; mx < g.nx; ++mx) {
            cx s = 0.0;
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix)
                    s += v[g.idx(ix, iy)] *
                         std::exp(cx(0.0, -(g.kx(mx) * g.x(ix) + g.ky(my) * g.y(iy))));
            out[g.idx(mx, my)] = s / double(g.size());
        }
    return out;
}

std::vector<double> slow_inverse(const GridSpec& g, const cvec& c) {
    std::vector<double> out(g.size(), 0.0);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            cx s = 0.0;
            for (int my = 0; my < g.ny; ++my)
                for (int mx = 0; mx < g.nx; ++mx)
                    s += c[g.idx(mx, my)] *
                         std::exp(cx(0.0, g.kx(mx) * g.x(ix) + g.ky(my) * g.y(iy)));
            out[g.idx(ix, iy)] = s.real();
        }
    return out;
}

} // namespace

TEST_CASE("dkp_symbol: values and policy") {
    GridSpec g(8, 8, 1.0, 1.0);
    LinearSymbol L = dkp_symbol(g, 1);
    CHECK(std::abs(L.values[g.idx(1, 1)] - cx(0.0, 1.0)) < 1e-12); // ky^2/kxi = 1
    for (int iy = 0; iy < g.ny; ++iy) CHECK(L.values[g.idx(0, iy)] == cx(0.0));

    GridSpec g2(16, 8, 0.8, 1.9);
    LinearSymbol L2 = dkp_symbol(g2, -1);
    for (int iy = 0; iy < g2.ny; ++iy)
        for (int ix = 0; ix < g2.nx; ++ix) {
            cx expected = 0.0;
            if (g2.mode_x(ix) != 0 && !g2.nyquist_x(ix))
                expected = cx(0.0, -g2.ky(iy) * g2.ky(iy) / g2.kx(ix));
            CHECK(std::abs(L2.values[g2.idx(ix, iy)] - expected) < 1e-9 * (1.0 + std::abs(expected)));
        }
}

TEST_CASE("dkp_nonlinearity: vanishes at t = 0 and for y-independent data") {
    GridSpec g(16, 16, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = std::sin(g.x(ix)) * (1.0 + 0.5 * std::cos(g.y(iy)));
    SpectralField f = SpectralField::from_values(g, v);
    cvec out;
    dkp_nonlinearity(g, f.coeffs(), 0.0, 2, 1, out);
    for (const auto& c : out) CHECK(std::abs(c) < 1e-15);

    std::vector<double> v1(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v1[g.idx(ix, iy)] = std::sin(2.0 * g.x(ix));
    SpectralField f1 = SpectralField::from_values(g, v1);
    dkp_nonlinearity(g, f1.coeffs(), 0.7, 3, 1, out);
    double worst = 0.0;
    for (const auto& c : out) worst = std::max(worst, std::abs(c));
    CHECK(worst < 1e-13);

    CHECK_THROWS_AS(dkp_nonlinearity(g, f.coeffs(), -0.1, 1, 1, out), bad_input);
}

TEST_CASE("dkp_nonlinearity: matches a brute-force chain on 8x8") {
    GridSpec g(8, 8, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = 0.4 * std::sin(g.x(ix)) * std::cos(g.y(iy)) + 0.1 * std::cos(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    const int n = 3, sigma = -1;
    const double t = 0.5;
    cvec out;
    dkp_nonlinearity(g, f.coeffs(), t, n, sigma, out);

    // oracle: every factor from the slow transform, same symbol conventions
    cvec fc = slow_forward(g, v);
    const double reg = 1e-16 * g.kx_max();
    cvec cfxi(g.size()), cfy(g.size()), cp(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            std::size_t i = g.idx(ix, iy);
            cfxi[i] = g.nyquist_x(ix) ? cx(0.0) : cx(0.0, g.kx(ix)) * fc[i];
            cfy[i] = g.nyquist_y(iy) ? cx(0.0) : cx(0.0, g.ky(iy)) * fc[i];
            if (g.mode_x(ix) == 0) {
                cp[i] = 0.0;
            } else {
                double kx = g.kx(ix);
                double s = kx > 0 ? 1.0 : -1.0;
                cp[i] = -g.ky(iy) * g.ky(iy) * fc[i] / (cx(0.0, 1.0) * cx(kx, reg * s));
            }
        }
    auto Fxi = slow_inverse(g, cfxi);
    auto Fy = slow_inverse(g, cfy);
    auto P = slow_inverse(g, cp);
    std::vector<double> prod(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double fac = sigma * t * n;
        for (int j = 0; j < n - 1; ++j) fac *= v[i];
        prod[i] = fac * (Fxi[i] * P[i] - Fy[i] * Fy[i]);
    }
    cvec ref = slow_forward(g, prod);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(out[i] - ref[i]) < 1e-9);
}

TEST_CASE("evolve_F: y-independent data are frozen in time") {
    GridSpec g(64, 4, 2.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double x = g.x(ix);
            double s = 1.0 / std::cosh(x * x);
            v[g.idx(ix, iy)] = 24.0 * x * s * s * std::tanh(x * x);
        }
    DkpProblem p;
    p.grid = g;
    p.f0 = SpectralField::from_values(g, v);
    p.t_end = 0.2;
    p.nt = 100;
    EvolveResult r = evolve_F(p);
    const auto& fv = r.final_field.values();
    double worst = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) worst = std::max(worst, std::abs(fv[i] - v[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("delta_field: identity at t = 0 and pointwise match for a bump") {
    GridSpec g(64, 8, 2.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = std::exp(-g.x(ix) * g.x(ix)) * (1.0 + 0.2 * std::cos(g.y(iy)));
    SpectralField f = SpectralField::from_values(g, v);

    SpectralField df0 = delta_field(f, 0.0, 2);
    const auto& d0 = df0.values();
    for (double d : d0) CHECK(d == doctest::Approx(1.0).epsilon(1e-14));

    const int n = 2;
    const double t = 0.05;
    SpectralField gx = partial(f, Axis::X, 1);
    const auto& gxv = gx.values();
    SpectralField dfn = delta_field(f, t, n);
    const auto& dv = dfn.values();
    double worst = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            // d/dxi(F^2) = 2 F F_xi for this n = 2 case
            std::size_t i = g.idx(ix, iy);
            double expected = 1.0 + t * 2.0 * v[i] * gxv[i];
            worst = std::max(worst, std::abs(dv[i] - expected));
        }
    CHECK(worst < 1e-8);
    CHECK(min_delta(f, t, n) <= 1.0);
}

TEST_CASE("reconstruct_u: t = 0 resamples the initial data") {
    GridSpec g(128, 4, 2.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::exp(-2.0 * g.x(ix) * g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    std::vector<double> targets;
    for (int ix = 0; ix < g.nx; ++ix) targets.push_back(g.x(ix));
    ReconstructedField r = reconstruct_u(f, 0.0, 1, targets);
    for (int iy = 0; iy < g.ny; ++iy) {
        CHECK(r.rows[iy].monotone);
        for (int a = 0; a < g.nx; ++a)
            CHECK(r.u[iy * targets.size() + a] == doctest::Approx(v[g.idx(a, iy)]).epsilon(1e-12));
    }
}

TEST_CASE("reconstruct_u: Hopf characteristics reproduced before break-up") {
    // y-independent data: u(x,t) = u0(xi), x = t u0(xi) + xi
    GridSpec g(1 << 14, 2, 2.0, 1.0);
    auto u0 = [](double x) {
        double s = 1.0 / std::cosh(x * x);
        return 24.0 * x * s * s * std::tanh(x * x);
    };
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = u0(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);

    // 1D Hopf breaking time of this profile: t_c = -1/min(u0')
    SpectralField fx = partial(f, Axis::X, 1);
    double mind = 0.0;
    for (double d : fx.values()) mind = std::min(mind, d);
    const double t_c = -1.0 / mind;
    const double t = 0.5 * t_c;
    std::vector<double> targets;
    for (int a = -40; a <= 40; ++a) targets.push_back(0.05 * a);
    ReconstructedField r = reconstruct_u(f, t, 1, targets);

    for (std::size_t a = 0; a < targets.size(); ++a) {
        // oracle: solve x = t u0(xi) + xi by bisection on a bracket
        double x = targets[a];
        double lo = x - 3.0, hi = x + 3.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (t * u0(mid) + mid < x) lo = mid;
            else hi = mid;
        }
        double expected = u0(0.5 * (lo + hi));
        CHECK(r.u[0 * targets.size() + a] == doctest::Approx(expected).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("reconstruct_u: steepest gradient grows like 1/(t_c - t)") {
    GridSpec g(1 << 12, 2, 2.0, 1.0);
    auto u0 = [](double x) {
        double s = 1.0 / std::cosh(x * x);
        return 24.0 * x * s * s * std::tanh(x * x);
    };
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = u0(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);

    // frozen F: exact t_c = -1/min(u0') on the grid
    SpectralField fx = partial(f, Axis::X, 1);
    double mind = 0.0;
    for (double d : fx.values()) mind = std::min(mind, d);
    double t_c = -1.0 / mind;

    auto max_slope = [&](double t) {
        CharacteristicSlice s = characteristic_slice(f, t, 1, 0, true);
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
            m = std::max(m, std::abs((s.u[i + 1] - s.u[i]) / (s.x[i + 1] - s.x[i])));
        return m;
    };
    double d = 0.1 * t_c;
    double ratio = max_slope(t_c - 0.5 * d) / max_slope(t_c - d);
    CHECK(ratio > 1.0);
    CHECK(ratio < 4.0);
}

TEST_CASE("evolve_F: non-monotone rows are flagged, not interpolated") {
    GridSpec g(256, 2, 2.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double x = g.x(ix);
            v[g.idx(ix, iy)] = 4.0 * x * std::exp(-x * x);
        }
    SpectralField f = SpectralField::from_values(g, v);
    // past the fold: du0/dx min is about -4/e^1.5... pick t beyond 1/|min|
    double t = 2.0;
    ReconstructedField r = reconstruct_u(f, t, 1, {0.0, 0.5});
    CHECK(!r.rows[0].monotone);
    CHECK(r.u[0] == 0.0);
}
