#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kp {

inline constexpr double pi = 3.14159265358979323846;

using cx = std::complex<double>;

struct bad_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Periodic grid on [-pi*Lx, pi*Lx) x [-pi*Ly, pi*Ly), sampled row-major with
// x fastest. Wavenumbers are k_m = m/L with m = -N/2 .. N/2-1 in FFT order.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    GridSpec() = default;
    GridSpec(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (!is_pow2(nx) || !is_pow2(ny))
            throw bad_input("GridSpec: Nx, Ny must be powers of two");
        if (!(lx > 0.0) || !(ly > 0.0))
            throw bad_input("GridSpec: Lx, Ly must be positive");
    }

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }

    int mode_x(int ix) const { return ix < nx / 2 ? ix : ix - nx; }
    int mode_y(int iy) const { return ny == 1 ? 0 : (iy < ny / 2 ? iy : iy - ny); }
    double kx(int ix) const { return mode_x(ix) / lx; }
    double ky(int iy) const { return mode_y(iy) / ly; }
    double kx_max() const { return (nx / 2) / lx; }
    double ky_max() const { return ny == 1 ? 0.0 : (ny / 2) / ly; }
    bool nyquist_x(int ix) const { return nx > 1 && ix == nx / 2; }
    bool nyquist_y(int iy) const { return ny > 1 && iy == ny / 2; }

    double x(int ix) const { return (2.0 * pi * ix / nx - pi) * lx; }
    double y(int iy) const { return ny == 1 ? 0.0 : (2.0 * pi * iy / ny - pi) * ly; }
    double dx() const { return 2.0 * pi * lx / nx; }
    double dy() const { return 2.0 * pi * ly / ny; }
    double area() const { return (2.0 * pi * lx) * (2.0 * pi * ly); }

    bool operator==(const GridSpec& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

} // namespace kp
