#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kp/field.hpp"
#include "kp/gkp.hpp"

#include <cmath>
#include <random>

using namespace kp;

namespace {

SpectralField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = dist(rng);
    return SpectralField::from_values(g, std::move(v));
}

// Direct O(N^2) projection onto e^{i(kx x + ky y)} with the physical grid
// coordinates, as an independent reference for the transform convention.
cvec brute_dft(const GridSpec& g, const std::vector<double>& v) {
    cvec out(g.size(), cx(0.0));
    for (int my = 0; my < g.ny; ++my)
        for (int mx = 0; mx < g.nx; ++mx) {
            cx s = 0.0;
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    double ph = -(g.kx(mx) * g.x(ix) + g.ky(my) * g.y(iy));
                    s += v[g.idx(ix, iy)] * std::exp(cx(0.0, ph));
                }
            out[g.idx(mx, my)] = s / double(g.size());
        }
    return out;
}

} // namespace

TEST_CASE("transform: single cosine mode lands on +-1 coefficients") {
    GridSpec g(16, 8, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::cos(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    const cvec& c = f.coeffs();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            cx expected = 0.0;
            if (iy == 0 && (g.mode_x(ix) == 1 || g.mode_x(ix) == -1)) expected = 0.5;
            CHECK(std::abs(c[g.idx(ix, iy)] - expected) < 1e-12);
        }
}

TEST_CASE("transform: zero field has zero coefficients") {
    GridSpec g(8, 8, 1.0, 1.0);
    SpectralField f(g);
    for (const auto& c : f.coeffs()) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("transform: matches direct DFT summation on a random 8x8 field") {
    GridSpec g(8, 8, 1.3, 0.7);
    SpectralField f = random_field(g, 17);
    cvec ref = brute_dft(g, f.values());
    const cvec& c = f.coeffs();
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(c[i] - ref[i]) < 1e-12);
}

TEST_CASE("transform: non-finite samples are rejected") {
    GridSpec g(8, 8, 1.0, 1.0);
    std::vector<double> v(g.size(), 0.0);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    SpectralField f = SpectralField::from_values(g, v);
    CHECK_THROWS_AS(f.coeffs(), numeric_failure);
}

TEST_CASE("transform: round trip is the identity up to 64x64") {
    for (int n : {2, 4, 8, 16, 32, 64}) {
        GridSpec g(n, n, 0.9, 1.4);
        SpectralField f = random_field(g, 100 + n);
        std::vector<double> orig = f.values();
        f.coeffs();
        SpectralField back = SpectralField::from_coeffs(g, f.coeffs());
        const auto& v = back.values();
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            scale = std::max(scale, std::abs(orig[i]));
            err = std::max(err, std::abs(v[i] - orig[i]));
        }
        CHECK(err < 1e-12 * scale);
    }
}

TEST_CASE("transform: real fields have conjugate-symmetric coefficients") {
    GridSpec g(16, 16, 1.0, 1.0);
    SpectralField f = random_field(g, 3);
    const cvec& c = f.coeffs();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            int jx = (g.nx - ix) % g.nx;
            int jy = (g.ny - iy) % g.ny;
            CHECK(std::abs(c[g.idx(ix, iy)] - std::conj(c[g.idx(jx, jy)])) < 1e-13);
        }
}

TEST_CASE("partial: d/dx sin(x) = cos(x)") {
    GridSpec g(32, 4, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::sin(g.x(ix));
    SpectralField d = partial(SpectralField::from_values(g, v), Axis::X, 1);
    const auto& dv = d.values();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            CHECK(std::abs(dv[g.idx(ix, iy)] - std::cos(g.x(ix))) < 1e-12);
}

TEST_CASE("partial: y derivative of an x-only field vanishes") {
    GridSpec g(16, 16, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::sin(2.0 * g.x(ix));
    SpectralField d = partial(SpectralField::from_values(g, v), Axis::Y, 1);
    for (double x : d.values()) CHECK(std::abs(x) < 1e-13);
}

TEST_CASE("partial: d/dx exp(-x^2) matches the analytic derivative") {
    GridSpec g(256, 2, 2.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::exp(-g.x(ix) * g.x(ix));
    SpectralField d = partial(SpectralField::from_values(g, v), Axis::X, 1);
    const auto& dv = d.values();
    for (int ix = 0; ix < g.nx; ++ix) {
        double x = g.x(ix);
        CHECK(std::abs(dv[g.idx(ix, 0)] - (-2.0 * x * std::exp(-x * x))) < 1e-10);
    }
}

TEST_CASE("partial: mixed derivatives commute and bad orders are rejected") {
    GridSpec g(16, 16, 1.0, 1.0);
    SpectralField f = random_field(g, 5);
    SpectralField a = partial(partial(f, Axis::X, 1), Axis::Y, 1);
    SpectralField b = partial(partial(f, Axis::Y, 1), Axis::X, 1);
    const auto& av = a.values();
    const auto& bv = b.values();
    double scale = 0.0;
    for (double x : av) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < av.size(); ++i) CHECK(std::abs(av[i] - bv[i]) < 1e-12 * scale);
    CHECK_THROWS_AS(partial(f, Axis::X, 0), bad_input);
    CHECK_THROWS_AS(partial(f, Axis::X, 5), bad_input);
}

TEST_CASE("antiderivative_x: integrates cos to sin") {
    GridSpec g(32, 2, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::cos(g.x(ix));
    SpectralField a = antiderivative_x(SpectralField::from_values(g, v));
    const auto& av = a.values();
    for (int ix = 0; ix < g.nx; ++ix) CHECK(std::abs(av[g.idx(ix, 0)] - std::sin(g.x(ix))) < 1e-12);
}

TEST_CASE("antiderivative_x: left-inverse of d/dx on zero-x-mean fields") {
    GridSpec g(32, 8, 1.1, 0.8);
    SpectralField f = random_field(g, 9);
    cvec c = f.coeffs();
    project_out_x_mean(g, c);
    // band-limit: the odd-order derivative zeroes the x-Nyquist column
    for (int iy = 0; iy < g.ny; ++iy) c[g.idx(g.nx / 2, iy)] = 0.0;
    SpectralField zf = SpectralField::from_coeffs(g, std::move(c));
    SpectralField back = antiderivative_x(partial(zf, Axis::X, 1));
    const auto& bv = back.values();
    const auto& ov = zf.values();
    double scale = 0.0;
    for (double x : ov) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < bv.size(); ++i) CHECK(std::abs(bv[i] - ov[i]) < 1e-11 * scale);
}

TEST_CASE("antiderivative_x: annihilates kx=0 content, matches symbol oracle") {
    GridSpec g(8, 8, 1.0, 1.0);
    SpectralField f = random_field(g, 23); // generic: has nonzero kx=0 content
    SpectralField a = antiderivative_x(f);
    const cvec& ac = a.coeffs();
    const cvec& fc = f.coeffs();
    double reg = 1e-16 * g.kx_max();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            cx expected = 0.0;
            if (g.mode_x(ix) != 0) {
                double k = g.kx(ix);
                double s = k > 0 ? 1.0 : -1.0;
                expected = fc[g.idx(ix, iy)] / (cx(0.0, 1.0) * cx(k, reg * s));
            }
            CHECK(std::abs(ac[g.idx(ix, iy)] - expected) < 1e-14);
        }
}

TEST_CASE("krasny_filter: zero threshold is the identity, small entries zeroed") {
    GridSpec g(8, 8, 1.0, 1.0);
    SpectralField f = random_field(g, 31);
    SpectralField same = krasny_filter(f, 0.0);
    const cvec& a = f.coeffs();
    const cvec& b = same.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    cvec c(g.size(), cx(0.0));
    c[0] = 1.0;
    c[5] = 1e-12;
    SpectralField t = krasny_filter(SpectralField::from_coeffs(g, c), 1e-10);
    CHECK(t.coeffs()[0] == cx(1.0));
    CHECK(t.coeffs()[5] == cx(0.0));

    CHECK_THROWS_AS(krasny_filter(f, -1.0), bad_input);
}

TEST_CASE("krasny_filter: matches elementwise masking and is idempotent") {
    GridSpec g(16, 16, 1.0, 1.0);
    SpectralField f = random_field(g, 37);
    cvec scaled = f.coeffs();
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] *= std::pow(10.0, -double(i % 13));
    SpectralField src = SpectralField::from_coeffs(g, scaled);
    double thr = 1e-6;
    SpectralField once = krasny_filter(src, thr);
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        cx expected = std::abs(scaled[i]) < thr ? cx(0.0) : scaled[i];
        CHECK(once.coeffs()[i] == expected);
    }
    SpectralField twice = krasny_filter(once, thr);
    for (std::size_t i = 0; i < scaled.size(); ++i) CHECK(once.coeffs()[i] == twice.coeffs()[i]);
}

TEST_CASE("evaluate_series: reproduces samples at grid nodes") {
    GridSpec g(16, 8, 1.2, 0.9);
    SpectralField f = random_field(g, 41);
    const auto& v = f.values();
    for (int iy = 0; iy < g.ny; iy += 3)
        for (int ix = 0; ix < g.nx; ix += 5)
            CHECK(std::abs(evaluate_series(f, g.x(ix), g.y(iy)) - v[g.idx(ix, iy)]) < 1e-12);
}

TEST_CASE("evaluate_series: first derivative of sin at the origin") {
    GridSpec g(32, 2, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::sin(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    CHECK(evaluate_series(f, 0.0, 0.0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_series: mixed derivative agrees with finite differences off-grid") {
    GridSpec g(16, 16, 1.0, 1.0);
    SpectralField raw = random_field(g, 47);
    // band-limit: odd-order derivatives zero the Nyquist lines by policy
    cvec c = raw.coeffs();
    for (int iy = 0; iy < g.ny; ++iy) c[g.idx(g.nx / 2, iy)] = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) c[g.idx(ix, g.ny / 2)] = 0.0;
    SpectralField f = SpectralField::from_coeffs(g, std::move(c));
    double x0 = 0.3137, y0 = -0.7161;
    // 4th-order centered cross difference of the order-(0,0) series
    double h = 1e-3;
    auto at = [&](double x, double y) { return evaluate_series(f, x, y); };
    auto dy4 = [&](double x) {
        return (at(x, y0 - 2 * h) - 8 * at(x, y0 - h) + 8 * at(x, y0 + h) - at(x, y0 + 2 * h)) /
               (12 * h);
    };
    double fd = (dy4(x0 - 2 * h) - 8 * dy4(x0 - h) + 8 * dy4(x0 + h) - dy4(x0 + 2 * h)) / (12 * h);
    CHECK(evaluate_series(f, x0, y0, 1, 1) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("evaluate_series_batch and grid agree with pointwise evaluation") {
    GridSpec g(16, 8, 1.0, 1.3);
    SpectralField f = random_field(g, 53);
    auto b = evaluate_series_batch(f, 0.17, -0.42, {{0, 0}, {2, 0}, {1, 1}});
    CHECK(b[0] == doctest::Approx(evaluate_series(f, 0.17, -0.42, 0, 0)).epsilon(1e-13));
    CHECK(b[1] == doctest::Approx(evaluate_series(f, 0.17, -0.42, 2, 0)).epsilon(1e-13));
    CHECK(b[2] == doctest::Approx(evaluate_series(f, 0.17, -0.42, 1, 1)).epsilon(1e-13));

    std::vector<double> xs{-0.5, 0.1, 0.9}, ys{-1.0, 0.4};
    auto gr = evaluate_series_grid(f, xs, ys, 1, 0);
    for (std::size_t b2 = 0; b2 < ys.size(); ++b2)
        for (std::size_t a = 0; a < xs.size(); ++a)
            CHECK(gr[b2 * xs.size() + a] ==
                  doctest::Approx(evaluate_series(f, xs[a], ys[b2], 1, 0)).epsilon(1e-12));
}

TEST_CASE("l2_norm: unit single mode, Parseval vs quadrature, drift") {
    GridSpec g(32, 16, 1.0, 2.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = std::cos(g.x(ix));
    SpectralField mode = SpectralField::from_values(g, v);
    CHECK(l2_norm(mode) == doctest::Approx(std::sqrt(g.area() / 2.0)).epsilon(1e-12));

    SpectralField f = random_field(g, 59);
    double quad = 0.0;
    for (double x : f.values()) quad += x * x;
    quad = std::sqrt(quad * g.dx() * g.dy());
    CHECK(l2_norm(f) == doctest::Approx(quad).epsilon(1e-12));

    CHECK(relative_l2_drift(f, f).value() == 0.0);
    SpectralField zero(g);
    CHECK(!relative_l2_drift(f, zero).has_value());
}

TEST_CASE("decay_report: outer band bounded by the overall max") {
    GridSpec g(32, 32, 1.0, 1.0);
    SpectralField f = random_field(g, 61);
    DecayReport r = decay_report(f);
    CHECK(r.max_modulus_outer_band <= r.linf_coeff);
    CHECK(r.linf_coeff > 0.0);
}
