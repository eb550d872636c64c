#include "kp/etd.hpp"

#include <cmath>

namespace kp {

namespace {

struct PhiValues {
    cx E, E2, W, f1, f2, f3;
};

// Closed-form Cox-Matthews weights at z = hL, scaled by h afterwards.
PhiValues phi_closed(cx z) {
    cx ez = std::exp(z);
    cx ez2 = std::exp(0.5 * z);
    cx z3 = z * z * z;
    PhiValues p;
    p.E = ez;
    p.E2 = ez2;
    p.W = (ez2 - 1.0) / z;
    p.f1 = (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
    p.f2 = 2.0 * (2.0 + z + ez * (-2.0 + z)) / z3;
    p.f3 = (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    return p;
}

} // namespace

EtdCoefficients etd_precompute(const LinearSymbol& L, const StepperConfig& config) {
    if (!(config.h > 0.0)) throw bad_input("etd_precompute: step size must be positive");
    if (config.contour_points < 16) throw bad_input("etd_precompute: contour_points must be >= 16");
    const std::size_t n = L.values.size();
    EtdCoefficients co;
    co.h = config.h;
    co.E.resize(n);
    co.E2.resize(n);
    co.W.resize(n);
    co.f1.resize(n);
    co.f2.resize(n);
    co.f3.resize(n);

    const int M = config.contour_points;
    std::vector<cx> ring(M);
    for (int j = 0; j < M; ++j) {
        double th = 2.0 * pi * (j + 0.5) / M;
        ring[j] = config.contour_radius * std::exp(cx(0.0, th));
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(L.values[i].real()) || !std::isfinite(L.values[i].imag()))
            throw bad_input("etd_precompute: non-finite symbol value");
        cx z = config.h * L.values[i];
        co.E[i] = std::exp(z);
        co.E2[i] = std::exp(0.5 * z);
        if (std::abs(z) >= config.small_z_threshold) {
            PhiValues p = phi_closed(z);
            co.W[i] = config.h * p.W;
            co.f1[i] = config.h * p.f1;
            co.f2[i] = config.h * p.f2;
            co.f3[i] = config.h * p.f3;
        } else {
            // The weights are entire functions of z, so their mean over a
            // circle around z equals the value at z while every sample stays
            // away from the z^3 cancellation.
            cx w = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
            for (int j = 0; j < M; ++j) {
                PhiValues p = phi_closed(z + ring[j]);
                w += p.W;
                f1 += p.f1;
                f2 += p.f2;
                f3 += p.f3;
            }
            const double inv = config.h / M;
            co.W[i] = w * inv;
            co.f1[i] = f1 * inv;
            co.f2[i] = f2 * inv;
            co.f3[i] = f3 * inv;
        }
    }
    return co;
}

void EtdStepper::step(cvec& u, double t, const NonlinearFn& N) {
    const std::size_t n = u.size();
    if (co_.E.size() != n) throw bad_input("EtdStepper: state size does not match coefficients");
    const double h = co_.h;

    N(u, t, n1_);
    if (n1_.size() != n) throw bad_input("EtdStepper: nonlinearity returned wrong shape");

    a_.resize(n);
    for (std::size_t i = 0; i < n; ++i) a_[i] = co_.E2[i] * u[i] + co_.W[i] * n1_[i];
    N(a_, t + 0.5 * h, n2_);

    b_.resize(n);
    for (std::size_t i = 0; i < n; ++i) b_[i] = co_.E2[i] * u[i] + co_.W[i] * n2_[i];
    N(b_, t + 0.5 * h, n3_);

    c_.resize(n);
    for (std::size_t i = 0; i < n; ++i) c_[i] = co_.E2[i] * a_[i] + co_.W[i] * (2.0 * n3_[i] - n1_[i]);
    N(c_, t + h, n4_);

    for (std::size_t i = 0; i < n; ++i)
        u[i] = co_.E[i] * u[i] + co_.f1[i] * n1_[i] + co_.f2[i] * (n2_[i] + n3_[i]) + co_.f3[i] * n4_[i];

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag()))
            throw numeric_failure("EtdStepper: overflow, non-finite state after step");
    }
}

} // namespace kp
