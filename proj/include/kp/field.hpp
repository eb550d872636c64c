#pragma once

#include "kp/fft.hpp"
#include "kp/grid.hpp"

#include <optional>
#include <vector>

namespace kp {

enum class Axis { X, Y };

struct DecayReport {
    double max_modulus_outer_band = 0.0; // largest |c| in the top 10% of |kx| or |ky|
    double linf_coeff = 0.0;
};

// 2D periodic real field holding physical samples and/or normalized Fourier
// coefficients, synchronized lazily. Values are row-major, x fastest.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid_(g), values_(g.size(), 0.0), has_values_(true) {}

    static SpectralField from_values(const GridSpec& g, std::vector<double> v);
    static SpectralField from_coeffs(const GridSpec& g, cvec c);

    const GridSpec& grid() const { return grid_; }

    // Throws numeric_failure on non-finite samples.
    const cvec& coeffs() const;
    const std::vector<double>& values() const;
    cvec& mutable_coeffs();             // invalidates samples
    std::vector<double>& mutable_values(); // invalidates coefficients

    bool has_coeffs() const { return has_coeffs_; }
    bool has_values() const { return has_values_; }

  private:
    GridSpec grid_;
    mutable std::vector<double> values_;
    mutable cvec coeffs_;
    mutable bool has_values_ = false;
    mutable bool has_coeffs_ = false;
};

// Spectral derivative of given order along an axis; multiplies coefficients
// by (i k)^order and zeroes the Nyquist mode for odd orders. order in 1..4.
SpectralField partial(const SpectralField& f, Axis axis, int order);

// x-antiderivative with the regularized symbol 1/(i(kx + i*reg*sgn(kx))).
// All kx = 0 modes are set to zero exactly. reg < 0 selects the default
// 1e-16 * max|kx|.
SpectralField antiderivative_x(const SpectralField& f, double regularization = -1.0);

// Zero every coefficient with modulus below the threshold. Negative
// thresholds are rejected.
SpectralField krasny_filter(const SpectralField& f, double threshold);
void krasny_filter_inplace(cvec& coeffs, double threshold);

// Exact evaluation of the truncated Fourier series (with optional derivative
// orders 0..3 per axis) at an arbitrary point of the domain.
double evaluate_series(const SpectralField& f, double x, double y, int dx_order = 0, int dy_order = 0);

// Tensor-product batch version: result[b*xs.size()+a] = series(xs[a], ys[b]).
std::vector<double> evaluate_series_grid(const SpectralField& f, const std::vector<double>& xs,
                                         const std::vector<double>& ys, int dx_order = 0, int dy_order = 0);

// Several derivative orders at one point in a single pass over the spectrum.
std::vector<double> evaluate_series_batch(const SpectralField& f, double x, double y,
                                          const std::vector<std::pair<int, int>>& orders);

// L2 norm over the domain via Parseval: sqrt(area * sum |c|^2).
double l2_norm(const SpectralField& f);
// |‖cur‖ - ‖init‖| / ‖init‖; nullopt when the initial norm vanishes.
std::optional<double> relative_l2_drift(const SpectralField& current, const SpectralField& initial);

DecayReport decay_report(const SpectralField& f);

} // namespace kp
