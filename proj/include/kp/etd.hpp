#pragma once

#include "kp/fft.hpp"
#include "kp/grid.hpp"

#include <functional>

namespace kp {

// Diagonal linear symbol L evaluated per mode (any shape; 2D grids are
// flattened row-major, scalars are vectors of length one).
struct LinearSymbol {
    cvec values;
};

struct StepperConfig {
    double h = 0.0;
    int contour_points = 32;
    double contour_radius = 1.0;
    double small_z_threshold = 0.5;
};

// Exponential coefficient tables of the fourth-order Cox-Matthews scheme.
// W = L^-1 (e^{hL/2} - 1); f1, f2, f3 are the standard final-stage weights.
// In the hL -> 0 limit W -> h/2, f1 -> h/6, f2 -> h/3, f3 -> h/6.
struct EtdCoefficients {
    double h = 0.0;
    cvec E, E2, W, f1, f2, f3;
};

// Coefficient evaluation switches to a contour average (mean of the closed
// form over contour_points points on a circle around hL) below the small-z
// threshold, where the closed forms cancel catastrophically.
EtdCoefficients etd_precompute(const LinearSymbol& L, const StepperConfig& config);

using NonlinearFn = std::function<void(const cvec& uhat, double t, cvec& out)>;

// One ETDRK4 step; advances uhat from t to t+h in place. The nonlinearity is
// evaluated at stage times t, t+h/2, t+h/2, t+h. Throws numeric_failure if
// the result is non-finite.
class EtdStepper {
  public:
    explicit EtdStepper(EtdCoefficients co) : co_(std::move(co)) {}

    double h() const { return co_.h; }
    const EtdCoefficients& coefficients() const { return co_; }

    void step(cvec& uhat, double t, const NonlinearFn& N);

  private:
    EtdCoefficients co_;
    cvec n1_, n2_, n3_, n4_, a_, b_, c_;
};

} // namespace kp
