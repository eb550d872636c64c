#pragma once

#include "kp/breakup.hpp"
#include "kp/field.hpp"
#include "kp/pi2.hpp"

#include <array>
#include <functional>

namespace kp {

struct AsymptoticParams {
    CriticalPoint cp;
    double epsilon = 0.1;
    bool symmetric = false; // even-in-y reduction
};

struct XTPoint {
    double X = 0.0, T = 0.0, ybar = 0.0;
};

// Shifted coordinates near the critical point. The symmetric mode drops all
// odd-y bundle entries, which collapses the map to the even-data reduction.
XTPoint map_to_XT(const AsymptoticParams& p, double x, double y, double t);

// Local approximation
//   u = u_c + 6/(n u_c^{n-1}) (eps^2/kappa^2)^{1/7} U(X/sx, T/st) + ybar*beta_bar
// with sx = (|kappa| eps^6)^{1/7}, st = (|kappa|^3 eps^4)^{1/7}. The positive
// scale factors pair the computed U branch (U ~ -sign(X)|X|^{1/3}) with the
// outer cubic root for k > 0; see the report's branch note.
double eval_kp12(const AsymptoticParams& p, const Pi2Solution& pi2, double x, double y, double t);

// 1D profile with optional analytic derivatives; numeric fallbacks are
// high-order centered differences.
struct KdvProfile {
    std::function<double(double)> f;
    std::function<double(double)> df;   // optional
    std::function<double(double)> d3f;  // optional
    double deriv1(double x) const;
    double deriv3(double x) const;
};

struct KdvBreakup {
    double t_c = 0.0, xi_c = 0.0, u_c = 0.0, x_c = 0.0;
};

// Hopf break-up of u_t + beta u u_x: t_c = min over xi of -1/(beta u0'(xi)),
// located by scan plus golden-section/parabolic polish on [a, b].
KdvBreakup kdv_breakup(double beta, const KdvProfile& u0, double a, double b);

struct KdvAsymptotics {
    double b = 0.0, gamma = 0.0;
    double beta = 0.0, rho = 0.0;
    double t_c = 0.0, xi_c = 0.0, u_c = 0.0, x_c = 0.0;
};

// Constants of the KdV critical expansion: b = 12 rho/beta,
// gamma = -t_c^4 beta^3 u0'''(xi_c). Rejects non-generic u0'''(xi_c) = 0.
KdvAsymptotics kdv_asymptotic_params(double beta, double rho, const KdvProfile& u0, double xi_c,
                                     double t_c);

// u = u_c + (18 eps^2 b/gamma^2)^{1/7} U(48^{1/7} xbar / (eps^6 b^3 |gamma|)^{1/7},
//       beta tbar / (3^4 2^2 eps^4 b^2 |gamma|^3)^{1/7}),  xbar = x - x_c - beta u_c tbar.
double eval_kdv_asymptotic(const KdvAsymptotics& ka, const Pi2Solution& pi2, double x, double t,
                           double eps);

struct CompareWindow {
    double half_x = -1.0; // <= 0: default 10 (|kappa| eps^6)^{1/7}
    double half_y = -1.0; // <= 0: default 2 eps^{2/7} * y_scale
    double y_scale = 1.0;
};

struct ComparisonReport {
    double t = 0.0;
    double window_half_x = 0.0, window_half_y = 0.0;
    int nx_window = 0, ny_window = 0;
    double linf_error = 0.0;
    double l2_error = 0.0; // rms over the window
    double window_amplitude = 0.0; // max |u_num - u_c|
    std::vector<std::array<double, 3>> x_slice; // (x, u_num, u_asym) at y = y_c
    std::vector<std::array<double, 3>> y_slice; // (y, u_num, u_asym) at x = x_c
};

ComparisonReport compare(const SpectralField& u_num, double t, const AsymptoticParams& p,
                         const Pi2Solution& pi2, const CompareWindow& window = {});

} // namespace kp
