#include "kp/pi2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace kp {

double pi2_asymptotic(double X, double T) {
    double a = std::cbrt(std::abs(X));
    double v = a + 2.0 * T / a;
    return X >= 0.0 ? -v : v;
}

double cubic_branch_root(double X, double T) {
    // f(U) = U^3 - 6TU + X, strictly increasing for T < 0.
    double u = pi2_asymptotic(X, T);
    if (!std::isfinite(u)) u = 0.0;
    for (int it = 0; it < 200; ++it) {
        double f = u * u * u - 6.0 * T * u + X;
        double fp = 3.0 * u * u - 6.0 * T;
        double du = f / fp;
        u -= du;
        if (std::abs(du) < 1e-14 * (1.0 + std::abs(u))) break;
    }
    return u;
}

namespace {

using ld = long double;

// 4th-order centered stencils, offsets -3..3. The h^4 division in the
// fourth-derivative stencil amplifies rounding noise, so the solve and the
// residual run in extended precision; doubles would floor the residual near
// 1e-8 on fine grids.
constexpr ld D1[7] = {0.0L, 1.0L / 12, -8.0L / 12, 0.0L, 8.0L / 12, -1.0L / 12, 0.0L};
constexpr ld D2[7] = {0.0L, -1.0L / 12, 16.0L / 12, -30.0L / 12, 16.0L / 12, -1.0L / 12, 0.0L};
constexpr ld D4[7] = {-1.0L / 6, 2.0L, -13.0L / 2, 28.0L / 3, -13.0L / 2, 2.0L, -1.0L / 6};

struct Stencils {
    ld d1[7], d2[7], d4[7];
    explicit Stencils(ld h) {
        for (int o = 0; o < 7; ++o) {
            d1[o] = D1[o] / h;
            d2[o] = D2[o] / (h * h);
            d4[o] = D4[o] / (h * h * h * h);
        }
    }
};

inline ld xcoord(int i, int N, ld L) { return -L + 2.0L * L * i / (N - 1); }

inline ld interior_residual(const Stencils& st, const std::vector<ld>& U, ld T, ld X, int i) {
    ld ux = 0.0L, uxx = 0.0L, uxxxx = 0.0L;
    for (int o = -3; o <= 3; ++o) {
        ld v = U[i + o];
        ux += st.d1[o + 3] * v;
        uxx += st.d2[o + 3] * v;
        uxxxx += st.d4[o + 3] * v;
    }
    return 6.0L * T * U[i] - U[i] * U[i] * U[i] - 0.5L * ux * ux - U[i] * uxx - 0.1L * uxxxx - X;
}

// Banded LU with partial pivoting (LAPACK gb layout: KL extra rows for
// fill). Solves in place; long double throughout.
struct BandedLU {
    int n, kl, ku;
    std::vector<ld> ab; // (2kl+ku+1) x n, column-major
    std::vector<int> piv;

    BandedLU(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_), ab((2 * kl_ + ku_ + 1) * n_, 0.0L), piv(n_) {}

    ld& at(int i, int j) { return ab[static_cast<std::size_t>(j) * (2 * kl + ku + 1) + kl + ku + i - j]; }

    bool factor() {
        const int kv = kl + ku; // superdiagonal span after fill
        for (int j = 0; j < n; ++j) {
            // pivot search in column j, rows j..min(j+kl, n-1)
            int jp = j;
            ld amax = std::abs(at(j, j));
            for (int i = j + 1; i <= std::min(j + kl, n - 1); ++i) {
                ld v = std::abs(at(i, j));
                if (v > amax) {
                    amax = v;
                    jp = i;
                }
            }
            piv[j] = jp;
            if (amax == 0.0L) return false;
            // swap rows j and jp across the band
            if (jp != j) {
                for (int c = j; c <= std::min(j + kv, n - 1); ++c) std::swap(at(j, c), at(jp, c));
            }
            // eliminate
            ld diag = at(j, j);
            for (int i = j + 1; i <= std::min(j + kl, n - 1); ++i) {
                ld m = at(i, j) / diag;
                at(i, j) = m;
                for (int c = j + 1; c <= std::min(j + kv, n - 1); ++c) at(i, c) -= m * at(j, c);
            }
        }
        return true;
    }

    void solve(std::vector<ld>& b) {
        for (int j = 0; j < n; ++j) {
            if (piv[j] != j) std::swap(b[j], b[piv[j]]);
            for (int i = j + 1; i <= std::min(j + kl, n - 1); ++i) b[i] -= at(i, j) * b[j];
        }
        const int kv = kl + ku;
        for (int j = n - 1; j >= 0; --j) {
            for (int c = j + 1; c <= std::min(j + kv, n - 1); ++c) b[j] -= at(j, c) * b[c];
            b[j] /= at(j, j);
        }
    }
};

} // namespace

std::vector<double> pi2_residual(const std::vector<double>& U, double T, double L) {
    const int N = static_cast<int>(U.size());
    const ld h = 2.0L * static_cast<ld>(L) / (N - 1);
    Stencils st(h);
    std::vector<ld> Ul(U.begin(), U.end());
    std::vector<double> r(N, 0.0);
    for (int i = 3; i < N - 3; ++i)
        r[i] = static_cast<double>(interior_residual(st, Ul, T, xcoord(i, N, L), i));
    return r;
}

std::vector<double> solve_at_T(double T, std::vector<double> guess, double L, double newton_tol,
                               int max_iters, int* iters_out) {
    const int N = static_cast<int>(guess.size());
    const ld h = 2.0L * static_cast<ld>(L) / (N - 1);
    Stencils st(h);
    const int KL = 3, KU = 3;

    std::vector<ld> U(guess.begin(), guess.end());
    std::vector<ld> r(N);

    // rounding floor of the residual evaluation in extended precision
    ld umax = 0.0L;
    for (ld v : U) umax = std::max(umax, std::abs(v));
    const ld eps = std::numeric_limits<ld>::epsilon();
    const ld floor_est = 8.0L * eps * (umax + 1.0L) *
                         (2.7L / (h * h * h * h) + 6.0L * std::abs((ld)T) + 3.0L * umax * umax + 1.0L);
    const ld tol = std::max<ld>(newton_tol, floor_est);

    ld best = std::numeric_limits<ld>::infinity();
    int it = 0;
    for (; it < max_iters; ++it) {
        for (int i = 0; i < N; ++i) {
            if (i < 3 || i >= N - 3) r[i] = U[i] - static_cast<ld>(pi2_asymptotic(
                                                      static_cast<double>(xcoord(i, N, L)), T));
            else r[i] = interior_residual(st, U, T, xcoord(i, N, L), i);
        }
        ld rmax = 0.0L;
        for (ld v : r) rmax = std::max(rmax, std::abs(v));
        if (!std::isfinite((double)rmax)) throw numeric_failure("pi2 Newton: non-finite residual");
        if (rmax < tol) break;
        if (rmax > 1e6L * best + 1e6L) throw numeric_failure("pi2 Newton: divergence");
        best = std::min(best, rmax);

        BandedLU lu(N, KL, KU);
        for (int i = 3; i < N - 3; ++i) {
            ld ux = 0.0L, uxx = 0.0L;
            for (int o = -3; o <= 3; ++o) {
                ux += st.d1[o + 3] * U[i + o];
                uxx += st.d2[o + 3] * U[i + o];
            }
            for (int o = -3; o <= 3; ++o) {
                ld v = -ux * st.d1[o + 3] - U[i] * st.d2[o + 3] - 0.1L * st.d4[o + 3];
                if (o == 0) v += 6.0L * (ld)T - 3.0L * U[i] * U[i] - uxx;
                lu.at(i, i + o) = v;
            }
        }
        for (int i : {0, 1, 2, N - 3, N - 2, N - 1}) lu.at(i, i) = 1.0L;
        if (!lu.factor()) throw numeric_failure("pi2 Newton: singular banded Jacobian");
        for (int i = 0; i < N; ++i) r[i] = -r[i];
        lu.solve(r);
        for (int i = 0; i < N; ++i) U[i] += r[i];
    }
    if (it >= max_iters) throw numeric_failure("pi2 Newton: no convergence");
    if (iters_out) *iters_out = it + 1;
    return std::vector<double>(U.begin(), U.end());
}

namespace {

int count_oscillations(const std::vector<double>& U, double prominence) {
    int count = 0;
    const int N = static_cast<int>(U.size());
    for (int i = 1; i + 1 < N; ++i) {
        bool is_max = U[i] > U[i - 1] && U[i] > U[i + 1];
        bool is_min = U[i] < U[i - 1] && U[i] < U[i + 1];
        if (!is_max && !is_min) continue;
        double left = 0.0, right = 0.0;
        for (int j = i - 1; j >= 0 && left < prominence; --j)
            left = std::max(left, std::abs(U[j] - U[i]));
        for (int j = i + 1; j < N && right < prominence; ++j)
            right = std::max(right, std::abs(U[j] - U[i]));
        if (left >= prominence && right >= prominence) ++count;
    }
    return count;
}

// 6th-order first and third derivative stencils for the cross-slice check.
constexpr double C1_6[7] = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
constexpr double C3_6[9] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0,
                            -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};

} // namespace

Pi2Solution continue_in_T(const Pi2Config& cfg) {
    if (!(cfg.T_min < 0.0)) throw bad_input("continue_in_T: T_min must be negative");
    double tabs = std::max(std::abs(cfg.T_min), std::abs(cfg.T_max));
    const double L = cfg.L > 0.0 ? cfg.L : std::max(60.0, 8.0 * std::pow(tabs, 1.5) + 60.0);
    const int N = cfg.N;
    const double h = 2.0 * L / (N - 1);

    Pi2Solution sol;
    sol.L = L;
    sol.N = N;

    auto xc = [&](int i) { return -L + 2.0 * L * i / (N - 1); };

    // stored window
    int i_lo = 0, i_hi = N - 1;
    for (int i = 0; i < N; ++i) {
        if (xc(i) < -cfg.store_xmax) i_lo = i + 1;
        if (xc(i) <= cfg.store_xmax) i_hi = i;
    }
    for (int i = i_lo; i <= i_hi; ++i) sol.X.push_back(xc(i));

    // slice times: coarse spacing below fine_from, fine above
    std::vector<double> times;
    double t = cfg.T_min;
    times.push_back(t);
    while (t < cfg.T_max - 1e-12) {
        double step = cfg.T_step;
        if (t >= cfg.fine_from - 1e-12) step = cfg.T_step / cfg.fine_factor;
        t = std::min(t + step, cfg.T_max);
        times.push_back(t);
    }

    std::vector<double> U(N);
    for (int i = 0; i < N; ++i) U[i] = cubic_branch_root(xc(i), cfg.T_min);

    std::deque<std::pair<double, std::vector<double>>> window; // rolling full slices
    // The cross-slice check covers the stored |X| window; rows near +-L carry
    // the exponentially localized mismatch of the truncated boundary values.
    auto kdv_check = [&]() {
        if (window.size() < 7) return;
        double dt0 = window[1].first - window[0].first;
        for (std::size_t j = 1; j + 1 < window.size(); ++j)
            if (std::abs((window[j + 1].first - window[j].first) - dt0) > 1e-9 * std::abs(dt0)) return;
        const auto& mid = window[3].second;
        double worst = 0.0;
        for (int i = std::max(4, i_lo); i <= std::min(N - 5, i_hi); ++i) {
            double ut = 0.0;
            for (int s = 0; s < 7; ++s) ut += C1_6[s] * window[s].second[i];
            ut /= dt0;
            double ux = 0.0;
            for (int s = -3; s <= 3; ++s) ux += C1_6[s + 3] * mid[i + s];
            ux /= h;
            double uxxx = 0.0;
            for (int s = -4; s <= 4; ++s) uxxx += C3_6[s + 4] * mid[i + s];
            uxxx /= h * h * h;
            worst = std::max(worst, std::abs(ut + 6.0 * mid[i] * ux + uxxx));
        }
        sol.max_kdv_residual = std::max(sol.max_kdv_residual, worst);
    };

    double t_prev = cfg.T_min;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double target = times[j];
        int iters_total = 0;
        if (j > 0) {
            // continuation with step halving on divergence
            std::vector<double> seed = U;
            double step = target - t_prev;
            double at = t_prev;
            while (at < target - 1e-14) {
                double trial = std::min(step, target - at);
                if (trial < 1e-4 * cfg.T_step)
                    throw numeric_failure("continue_in_T: step underflow at T = " + std::to_string(at));
                try {
                    int its = 0;
                    std::vector<double> Unew =
                        solve_at_T(at + trial, seed, L, cfg.newton_tol, cfg.max_newton_iters, &its);
                    iters_total = std::max(iters_total, its);
                    seed = std::move(Unew);
                    at += trial;
                } catch (const numeric_failure&) {
                    step = trial / 2.0;
                }
            }
            U = std::move(seed);
        } else {
            int its = 0;
            U = solve_at_T(target, std::move(U), L, cfg.newton_tol, cfg.max_newton_iters, &its);
            iters_total = its;
        }
        t_prev = target;

        Pi2SliceStats stats;
        stats.T = target;
        stats.newton_iters = iters_total;
        auto r = pi2_residual(U, target, L);
        for (double v : r) stats.ode_residual = std::max(stats.ode_residual, std::abs(v));
        stats.oscillation_count = count_oscillations(U, 1e-3);
        for (double v : U) stats.max_abs_u = std::max(stats.max_abs_u, std::abs(v));
        sol.max_ode_residual = std::max(sol.max_ode_residual, stats.ode_residual);
        sol.max_newton_iters_seen = std::max(sol.max_newton_iters_seen, iters_total);
        sol.stats.push_back(stats);

        // store the table window and its derivative
        sol.T.push_back(target);
        std::vector<double> uw(sol.X.size()), uxw(sol.X.size());
        for (int i = i_lo; i <= i_hi; ++i) {
            uw[i - i_lo] = U[i];
            double ux = 0.0;
            for (int o = -3; o <= 3; ++o)
                ux += static_cast<double>(D1[o + 3]) * U[std::clamp(i + o, 0, N - 1)];
            uxw[i - i_lo] = ux / h;
        }
        sol.U.push_back(std::move(uw));
        sol.U_X.push_back(std::move(uxw));

        window.emplace_back(target, U);
        if (window.size() > 7) window.pop_front();
        kdv_check();
    }
    return sol;
}

double eval_U(const Pi2Solution& sol, double X, double T) {
    if (sol.T.empty()) throw bad_input("eval_U: empty solution");
    if (T < sol.T.front() - 1e-12 || T > sol.T.back() + 1e-12)
        throw bad_input("eval_U: T outside the swept range");

    auto slice_value = [&](std::size_t j, double x) -> double {
        const auto& Xs = sol.X;
        const auto& Us = sol.U[j];
        if (x < Xs.front() || x > Xs.back()) return pi2_asymptotic(x, sol.T[j]);
        double hx = Xs[1] - Xs[0];
        int i = static_cast<int>((x - Xs.front()) / hx);
        i = std::clamp(i, 1, static_cast<int>(Xs.size()) - 3);
        // 4-point Lagrange on i-1..i+2
        double s = (x - Xs[i]) / hx;
        double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        return w0 * Us[i - 1] + w1 * Us[i] + w2 * Us[i + 1] + w3 * Us[i + 2];
    };

    auto it = std::lower_bound(sol.T.begin(), sol.T.end(), T);
    std::size_t j1 = std::clamp<std::size_t>(it - sol.T.begin(), 1, sol.T.size() - 1);
    std::size_t j0 = j1 - 1;
    double w = (T - sol.T[j0]) / (sol.T[j1] - sol.T[j0]);
    w = std::clamp(w, 0.0, 1.0);
    return (1.0 - w) * slice_value(j0, X) + w * slice_value(j1, X);
}

} // namespace kp
