#include "kp/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace kp {

XTPoint map_to_XT(const AsymptoticParams& p, double x, double y, double t) {
    const CriticalPoint& c = p.cp;
    const double xb = x - c.x_c;
    const double yb = y - c.y_c;
    const double tb = t - c.t_c;
    const double tc = c.t_c;

    XTPoint out;
    out.ybar = yb;
    if (p.symmetric) {
        out.X = xb - c.G * tb - 0.5 * tc * c.G_yy * yb * yb;
        out.T = tb - 0.5 * tc * tc * yb * yb * c.G_xiyy;
        return out;
    }
    const double r = c.G_xixiy / c.G_xixixi;
    out.X = xb - tb * (c.G + tc * c.G_t) - tb * yb * (c.G_y + tc * c.G_yt) -
            tc * (c.G_y * yb + 0.5 * c.G_yy * yb * yb + c.G_yyy * yb * yb * yb / 6.0) -
            tc * r * r * c.G_xixiy * yb * yb * yb / 3.0 +
            0.5 * tc * r * c.G_xiyy * yb * yb * yb + c.G_xi * r * yb * tb;
    out.T = tb + 0.5 * tc * tc * yb * yb * (c.G_xixiy * r - c.G_xiyy);
    return out;
}

double eval_kp12(const AsymptoticParams& p, const Pi2Solution& pi2, double x, double y, double t) {
    const CriticalPoint& c = p.cp;
    if (c.kappa == 0.0) throw bad_input("eval_kp12: kappa must be nonzero");
    if (c.n > 1 && c.u_c == 0.0) throw bad_input("eval_kp12: u_c = 0 with n > 1");

    XTPoint w = map_to_XT(p, x, y, t);
    const double eps = p.epsilon;
    const double ak = std::abs(c.kappa);
    const double sx = std::pow(ak * std::pow(eps, 6), 1.0 / 7.0);
    const double st = std::pow(ak * ak * ak * std::pow(eps, 4), 1.0 / 7.0);
    const double amp = std::pow(eps * eps / (c.kappa * c.kappa), 1.0 / 7.0);

    double pref = 6.0 * amp;
    for (int j = 1; j < c.n; ++j) pref /= c.u_c;
    pref /= c.n;

    double U = eval_U(pi2, w.X / sx, w.T / st);
    return c.u_c + pref * U + w.ybar * c.beta_bar;
}

double KdvProfile::deriv1(double x) const {
    if (df) return df(x);
    const double h = 1e-4 * (1.0 + std::abs(x));
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

double KdvProfile::deriv3(double x) const {
    if (d3f) return d3f(x);
    const double h = 1e-2 * (1.0 + std::abs(x));
    return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) -
            f(x + 3 * h)) /
           (8 * h * h * h);
}

KdvBreakup kdv_breakup(double beta, const KdvProfile& u0, double a, double b) {
    auto tof = [&](double xi) {
        double s = beta * u0.deriv1(xi);
        return s < 0.0 ? -1.0 / s : std::numeric_limits<double>::infinity();
    };
    // dense scan
    const int M = 4096;
    double best = std::numeric_limits<double>::infinity(), xib = a;
    for (int i = 0; i <= M; ++i) {
        double xi = a + (b - a) * i / M;
        double v = tof(xi);
        if (v < best) {
            best = v;
            xib = xi;
        }
    }
    if (!std::isfinite(best)) throw bad_input("kdv_breakup: no compressive region in interval");
    // golden-section polish
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = xib - (b - a) / M, hi = xib + (b - a) / M;
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = tof(c1), f2 = tof(c2);
    for (int it = 0; it < 120 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
        if (f1 < f2) {
            hi = c2; c2 = c1; f2 = f1;
            c1 = hi - gr * (hi - lo); f1 = tof(c1);
        } else {
            lo = c1; c1 = c2; f1 = f2;
            c2 = lo + gr * (hi - lo); f2 = tof(c2);
        }
    }
    // parabolic refinement through three nearby samples
    double xm = 0.5 * (lo + hi), h = std::max(1e-7, 1e-9 * (1.0 + std::abs(xm)));
    double fm1 = tof(xm - h), f0 = tof(xm), fp1 = tof(xm + h);
    double denom = fm1 - 2 * f0 + fp1;
    if (denom > 0.0) xm += 0.5 * h * (fm1 - fp1) / denom;

    KdvBreakup r;
    r.xi_c = xm;
    r.t_c = tof(xm);
    r.u_c = u0.f(xm);
    r.x_c = beta * r.u_c * r.t_c + r.xi_c;
    return r;
}

KdvAsymptotics kdv_asymptotic_params(double beta, double rho, const KdvProfile& u0, double xi_c,
                                     double t_c) {
    double u3 = u0.deriv3(xi_c);
    if (std::abs(u3) < 1e-10) throw bad_input("kdv_asymptotic_params: u0'''(xi_c) = 0, non-generic");
    KdvAsymptotics ka;
    ka.beta = beta;
    ka.rho = rho;
    ka.t_c = t_c;
    ka.xi_c = xi_c;
    ka.u_c = u0.f(xi_c);
    ka.x_c = beta * ka.u_c * t_c + xi_c;
    ka.b = 12.0 * rho / beta;
    ka.gamma = -std::pow(t_c, 4) * beta * beta * beta * u3;
    return ka;
}

double eval_kdv_asymptotic(const KdvAsymptotics& ka, const Pi2Solution& pi2, double x, double t,
                           double eps) {
    const double tb = t - ka.t_c;
    const double xb = x - ka.x_c - ka.beta * ka.u_c * tb;
    const double ab = std::abs(ka.b), ag = std::abs(ka.gamma);
    const double amp = std::pow(18.0 * eps * eps * ab / (ka.gamma * ka.gamma), 1.0 / 7.0);
    const double sx = std::pow(std::pow(eps, 6) * ab * ab * ab * ag, 1.0 / 7.0);
    const double st = std::pow(81.0 * 4.0 * std::pow(eps, 4) * ab * ab * ag * ag * ag, 1.0 / 7.0);
    const double c48 = std::pow(48.0, 1.0 / 7.0);
    return ka.u_c + amp * eval_U(pi2, c48 * xb / sx, ka.beta * tb / st);
}

ComparisonReport compare(const SpectralField& u_num, double t, const AsymptoticParams& p,
                         const Pi2Solution& pi2, const CompareWindow& window) {
    const GridSpec& g = u_num.grid();
    const CriticalPoint& c = p.cp;
    const double eps = p.epsilon;
    double wx = window.half_x;
    double wy = window.half_y;
    if (wx <= 0.0) wx = 10.0 * std::pow(std::abs(c.kappa) * std::pow(eps, 6), 1.0 / 7.0);
    if (wy <= 0.0) wy = 2.0 * std::pow(eps, 2.0 / 7.0) * window.y_scale;

    std::vector<int> ixs, iys;
    for (int ix = 0; ix < g.nx; ++ix)
        if (std::abs(g.x(ix) - c.x_c) <= wx) ixs.push_back(ix);
    for (int iy = 0; iy < g.ny; ++iy)
        if (std::abs(g.y(iy) - c.y_c) <= wy) iys.push_back(iy);
    if (ixs.empty() || iys.empty()) throw bad_input("compare: empty window");

    const auto& vals = u_num.values();
    ComparisonReport rep;
    rep.t = t;
    rep.window_half_x = wx;
    rep.window_half_y = wy;
    rep.nx_window = static_cast<int>(ixs.size());
    rep.ny_window = static_cast<int>(iys.size());

    double sumsq = 0.0;
    for (int iy : iys)
        for (int ix : ixs) {
            double un = vals[g.idx(ix, iy)];
            double ua = eval_kp12(p, pi2, g.x(ix), g.y(iy), t);
            double d = std::abs(un - ua);
            rep.linf_error = std::max(rep.linf_error, d);
            sumsq += d * d;
            rep.window_amplitude = std::max(rep.window_amplitude, std::abs(un - c.u_c));
        }
    rep.l2_error = std::sqrt(sumsq / (ixs.size() * iys.size()));

    // slices through the critical point
    int iyc = iys.front(), ixc = ixs.front();
    for (int iy : iys)
        if (std::abs(g.y(iy) - c.y_c) < std::abs(g.y(iyc) - c.y_c)) iyc = iy;
    for (int ix : ixs)
        if (std::abs(g.x(ix) - c.x_c) < std::abs(g.x(ixc) - c.x_c)) ixc = ix;
    for (int ix : ixs)
        rep.x_slice.push_back({g.x(ix), vals[g.idx(ix, iyc)], eval_kp12(p, pi2, g.x(ix), g.y(iyc), t)});
    for (int iy : iys)
        rep.y_slice.push_back({g.y(iy), vals[g.idx(ixc, iy)], eval_kp12(p, pi2, g.x(ixc), g.y(iy), t)});
    return rep;
}

} // namespace kp
