#pragma once

#include "kp/dkp.hpp"
#include "kp/field.hpp"

#include <array>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

namespace kp {

// Time-stepping source the detector drives. Production wraps the F solver;
// tests can plug a frozen field.
class FlowDriver {
  public:
    virtual ~FlowDriver() = default;
    virtual const GridSpec& grid() const = 0;
    virtual int order_n() const = 0;
    virtual int flow_sigma() const = 0;
    virtual double time() const = 0;
    virtual const cvec& state() const = 0;
    virtual void seek(double t, const cvec& state) = 0;
    virtual void advance(double h) = 0;
};

class DkpFlow : public FlowDriver {
  public:
    DkpFlow(const DkpProblem& p);
    const GridSpec& grid() const override { return grid_; }
    int order_n() const override { return n_; }
    int flow_sigma() const override { return sigma_; }
    double time() const override { return t_; }
    const cvec& state() const override { return fhat_; }
    void seek(double t, const cvec& state) override;
    void advance(double h) override;

  private:
    GridSpec grid_;
    int n_, sigma_;
    double krasny_;
    double t_ = 0.0;
    cvec fhat_;
    double cached_h_ = -1.0;
    std::unique_ptr<EtdStepper> stepper_;
};

// Frozen-in-time field; advance only moves the clock.
class FrozenFlow : public FlowDriver {
  public:
    FrozenFlow(const GridSpec& g, cvec state, int n = 1, int sigma = 1)
        : grid_(g), fhat_(std::move(state)), n_(n), sigma_(sigma) {}
    const GridSpec& grid() const override { return grid_; }
    int order_n() const override { return n_; }
    int flow_sigma() const override { return sigma_; }
    double time() const override { return t_; }
    const cvec& state() const override { return fhat_; }
    void seek(double t, const cvec& state) override { t_ = t; fhat_ = state; }
    void advance(double h) override { t_ += h; }

  private:
    GridSpec grid_;
    cvec fhat_;
    int n_, sigma_;
    double t_ = 0.0;
};

struct Bracket {
    double t_lo = 0.0, t_hi = 0.0;
    double delta_lo = 0.0, delta_hi = 0.0;
    cvec state_lo, state_hi;
    double h = 0.0;
    double width() const { return t_hi - t_lo; }
};

// min Delta over the grid, skipping the connected Delta<0 components around
// previously found critical points.
double masked_min_delta(const SpectralField& F, double t, int n,
                        const std::vector<std::pair<double, double>>& exclusions);

struct LocateResult {
    double xi_c = 0.0, y_c = 0.0;
    double g_xixi = 0.0, g_xiy = 0.0; // stationarity residuals
    double objective = 0.0;
    bool converged = false;
    int iters = 0;
};

// Grid argmin of Delta seeds a simplex solve of G_xixi = G_xiy = 0 through
// the exact truncated series. Exclusions keep the seed away from already
// found break-up regions.
LocateResult locate_critical_xy(const SpectralField& F_at_tc, double t_c, int n,
                                const std::vector<std::pair<double, double>>& exclusions = {});

struct CriticalPoint {
    double t_c = 0, xi_c = 0, y_c = 0, x_c = 0, u_c = 0;
    double G = 0, G_xi = 0, G_xixi = 0, G_xiy = 0, G_xixixi = 0, G_xixiy = 0, G_xiyy = 0;
    double G_y = 0, G_yy = 0, G_yyy = 0;
    double G_t = 0, G_yt = 0, G_xit = 0;
    double F_xi = 0, F_y = 0, F_yy = 0, F_xiy = 0, F_t = 0, F_yt = 0, F_xit = 0;
    double k = 0, kappa = 0, beta_bar = 0;
    double delta_at_c = 0;
    double res_Ft = 0, res_Fyt = 0, res_Fxit = 0;
    double rel_res_Ft = 0, rel_res_Fyt = 0, rel_res_Fxit = 0;
    bool generic = false;
    int n = 1, sigma = 1;
};

struct StencilSnapshots {
    double t_c = 0.0, dt = 0.0;
    std::array<SpectralField, 5> F; // at t_c + j*dt, j = -2..2
};

// Five-snapshot time stencil centered on t_c, re-evolved from an earlier
// state (base must satisfy base_t <= t_c - 2*dt).
StencilSnapshots collect_stencil(FlowDriver& flow, double base_t, const cvec& base_state,
                                 double t_c, double dt);

CriticalPoint extract_bundle(const StencilSnapshots& snaps, double xi_c, double y_c,
                             int n, int sigma);

struct BreakupHit {
    CriticalPoint cp;
    LocateResult locate;
    Bracket refined;
    double bracket_width = 0.0;
    int index = 0; // 1 = first break-up
};

struct BreakupOptions {
    int levels = 2;
    int nt_refine = 1000;
};

// Walks the flow from its current time to t_end in nt coarse steps, finds
// break-ups one at a time, refines each bracket by restart, and extracts the
// critical bundle. After each hit the search continues from the coarse
// bracket end with the found point excluded from the Delta monitor.
class BreakupSearch {
  public:
    BreakupSearch(FlowDriver& flow, double t_end, int nt);

    std::optional<Bracket> find_next_bracket();
    Bracket refine(Bracket b, int levels, int nt_refine);
    BreakupHit find_next(const BreakupOptions& opt = {});

    const std::vector<std::pair<double, double>>& exclusions() const { return exclusions_; }
    void add_exclusion(double xi, double y) { exclusions_.emplace_back(xi, y); }

  private:
    double monitored_delta() const;

    FlowDriver& flow_;
    double t_end_;
    double h_;
    std::vector<std::pair<double, double>> exclusions_;
    std::deque<std::pair<double, cvec>> history_; // recent coarse states
    int hits_ = 0;
};

} // namespace kp
