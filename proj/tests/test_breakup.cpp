#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kp/breakup.hpp"
#include "kp/simplex.hpp"

#include <cmath>

using namespace kp;

namespace {

// Periodic surrogate with the jet -xi + xi^3/6 + xi^2 y at the origin:
// F = -sin(xi) + 2 sin(y) (1 - cos(xi)). Frozen in time it has a gradient
// catastrophe at exactly t = 1, xi = y = 0, with G_xixixi = 1, G_xixiy = 2.
SpectralField synthetic_cubic(const GridSpec& g) {
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = -std::sin(g.x(ix)) + 2.0 * std::sin(g.y(iy)) * (1.0 - std::cos(g.x(ix)));
    return SpectralField::from_values(g, std::move(v));
}

} // namespace

TEST_CASE("nelder_mead: converges on a shifted quadratic") {
    auto f = [](const std::vector<double>& p) {
        double a = p[0] - 1.25, b = p[1] + 0.5;
        return 3.0 * a * a + 0.7 * b * b + a * b;
    };
    SimplexOptions so;
    so.initial_step = 0.3;
    so.f_abs_target = 1e-24;
    SimplexResult r = nelder_mead(f, {0.0, 0.0}, so);
    CHECK(std::abs(r.x[0] - 1.25) < 1e-7);
    CHECK(std::abs(r.x[1] + 0.5) < 1e-7);
}

TEST_CASE("bracket_tc: frozen linear-slope field crosses at exactly t = 1") {
    GridSpec g(64, 64, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = -std::sin(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    FrozenFlow flow(g, f.coeffs());
    BreakupSearch search(flow, 1.5, 150);
    auto b = search.find_next_bracket();
    REQUIRE(b.has_value());
    CHECK(b->t_lo < 1.0);
    CHECK(b->t_hi >= 1.0);
    // min Delta = 1 - t exactly on this grid
    CHECK(b->delta_lo == doctest::Approx(1.0 - b->t_lo).epsilon(1e-12));

    // t_c sits machine-exactly on a coarse step here, which exercises the
    // widen-and-retry path; the width bound is 2x the nominal one per level.
    Bracket fine = search.refine(*b, 2, 100);
    CHECK(fine.width() <= 4.0 * b->width() / 100.0 / 100.0);
    CHECK(fine.t_lo <= 1.0);
    CHECK(fine.t_hi >= 1.0);
}

TEST_CASE("bracket_tc: reports when no break-up occurs in the window") {
    GridSpec g(32, 32, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = -std::sin(g.x(ix));
    SpectralField f = SpectralField::from_values(g, v);
    FrozenFlow flow(g, f.coeffs());
    BreakupSearch search(flow, 0.5, 50);
    CHECK(!search.find_next_bracket().has_value());
    CHECK_THROWS_AS(search.find_next(), numeric_failure);
}

// Even-coupled surrogate whose first catastrophe is exactly t = 1 at the
// origin: F = -sin(xi) (0.7 + 0.3 cos(y)).
static SpectralField synthetic_even(const GridSpec& g) {
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = -std::sin(g.x(ix)) * (0.7 + 0.3 * std::cos(g.y(iy)));
    return SpectralField::from_values(g, std::move(v));
}

TEST_CASE("locate_critical_xy: stationarity residuals vanish at the located point") {
    GridSpec g(64, 64, 1.0, 1.0);
    SpectralField f = synthetic_even(g);
    LocateResult lr = locate_critical_xy(f, 1.0, 1);
    CHECK(std::abs(lr.xi_c) < 1e-6);
    CHECK(std::abs(lr.g_xixi) < 1e-8);
    CHECK(std::abs(lr.g_xiy) < 1e-8);
}

TEST_CASE("locate_critical_xy: even-in-y data return y_c = 0") {
    GridSpec g(64, 64, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            v[g.idx(ix, iy)] = -std::sin(g.x(ix)) * (1.0 + 0.3 * std::cos(g.y(iy)));
    SpectralField f = SpectralField::from_values(g, std::move(v));
    double t_c = 1.0 / 1.3;
    LocateResult lr = locate_critical_xy(f, t_c, 1);
    CHECK(std::abs(lr.y_c) < 1e-6);
    CHECK(std::abs(lr.xi_c) < 1e-6);
}

TEST_CASE("extract_bundle: frozen synthetic reproduces the analytic bundle") {
    GridSpec g(64, 64, 1.0, 1.0);
    SpectralField f = synthetic_cubic(g);
    FrozenFlow flow(g, f.coeffs());
    StencilSnapshots snaps = collect_stencil(flow, 0.9, f.coeffs(), 1.0, 0.01);
    CriticalPoint cp = extract_bundle(snaps, 0.0, 0.0, 1, 1);

    CHECK(cp.G_xi == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(cp.G_xixi) < 1e-10);
    CHECK(std::abs(cp.G_xiy) < 1e-10);
    CHECK(cp.G_xixixi == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cp.G_xixiy == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(cp.delta_at_c) < 1e-10);
    CHECK(cp.k == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cp.kappa == doctest::Approx(-36.0).epsilon(1e-8));
    // beta_bar = F_y - F_xi G_xixiy / G_xixixi = 0 - (-1)(2/1) = 2
    CHECK(cp.beta_bar == doctest::Approx(2.0).epsilon(1e-8));
    // frozen flow: all time derivatives and constraint residuals vanish
    CHECK(std::abs(cp.G_t) < 1e-12);
    CHECK(std::abs(cp.res_Ft) < 1e-12);
    CHECK(std::abs(cp.res_Fyt) < 1e-12);
    CHECK(std::abs(cp.res_Fxit) < 1e-12);
    // x_c = t_c F^n + xi_c with F(0,0) = 0
    CHECK(std::abs(cp.x_c) < 1e-10);
    CHECK(std::abs(cp.u_c) < 1e-10);
}

TEST_CASE("extract_bundle: kappa is negative when G_xixixi > 0") {
    GridSpec g(64, 64, 1.0, 1.0);
    SpectralField f = synthetic_cubic(g);
    FrozenFlow flow(g, f.coeffs());
    StencilSnapshots snaps = collect_stencil(flow, 0.9, f.coeffs(), 1.0, 0.01);
    CriticalPoint cp = extract_bundle(snaps, 0.0, 0.0, 1, 1);
    CHECK(cp.G_xixixi > 0.0);
    CHECK(cp.kappa < 0.0);
}

TEST_CASE("masked_min_delta: excluded negative region is skipped") {
    GridSpec g(128, 16, 1.0, 1.0);
    std::vector<double> v(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) v[g.idx(ix, iy)] = -std::sin(g.x(ix));
    SpectralField f = SpectralField::from_values(g, std::move(v));
    double t = 1.05; // Delta = 1 - 1.05 cos(xi) < 0 only near xi = 0
    double plain = masked_min_delta(f, t, 1, {});
    CHECK(plain < 0.0);
    double masked = masked_min_delta(f, t, 1, {{0.0, 0.0}});
    CHECK(masked >= 0.0);
}

TEST_CASE("find_next: frozen flow end-to-end on the even surrogate") {
    GridSpec g(64, 64, 1.0, 1.0);
    SpectralField f = synthetic_even(g);
    FrozenFlow flow(g, f.coeffs());
    BreakupSearch search(flow, 1.4, 140);
    BreakupOptions opt;
    opt.levels = 2;
    opt.nt_refine = 64;
    BreakupHit hit = search.find_next(opt);
    CHECK(hit.index == 1);
    // levels=2 with nt_refine=64 gives a bracket of width (0.01)/64^2
    CHECK(hit.cp.t_c == doctest::Approx(1.0).epsilon(3e-6));
    CHECK(std::abs(hit.cp.xi_c) < 1e-5);
    CHECK(hit.cp.G_xixixi == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hit.cp.kappa == doctest::Approx(-36.0).epsilon(2e-5));
    CHECK(std::abs(hit.cp.beta_bar) < 1e-8);
    CHECK(std::abs(hit.cp.G_xiyy - 0.3) < 1e-6);
    CHECK(!hit.cp.generic); // even data: G_xixiy = 0
    CHECK(search.exclusions().size() == 1);
}
