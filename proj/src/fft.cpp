#include "kp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace kp::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;
int g_threads = 1;
bool g_threads_init = false;

PlanPair& plans_for(const GridSpec& g) {
    std::lock_guard<std::mutex> lock(g_mutex);
    auto key = std::make_pair(g.nx, g.ny);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    if (!g_threads_init) {
        fftw_init_threads();
        g_threads_init = true;
    }
    fftw_plan_with_nthreads(g_threads);

    // Plan on aligned scratch; fftw_execute_dft then runs on any 64-byte
    // aligned buffers of the same shape.
    cvec a(g.size()), b(g.size());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_2d(g.ny, g.nx, reinterpret_cast<fftw_complex*>(a.data()),
                              reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    pp.bwd = fftw_plan_dft_2d(g.ny, g.nx, reinterpret_cast<fftw_complex*>(a.data()),
                              reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    auto [pos, ok] = g_plans.emplace(key, pp);
    return pos->second;
}

} // namespace

void set_threads(int n) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_threads = n < 1 ? 1 : n;
    // Existing plans keep their thread count; new shapes pick up the change.
}

int threads() { return g_threads; }

// The grid starts at -pi*L, so raw DFT coefficients differ from the
// coefficients of e^{ikx} by (-1)^{mx+my}. Stored coefficients are the
// phase-true ones; the twist is its own inverse.
namespace {
void origin_twist(const GridSpec& g, cvec& c) {
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = (iy & 1) ? 0 : 1; ix < g.nx; ix += 2) c[g.idx(ix, iy)] = -c[g.idx(ix, iy)];
}
} // namespace

void forward(const GridSpec& g, const cvec& in, cvec& out) {
    auto& pp = plans_for(g);
    out.resize(g.size());
    fftw_execute_dft(pp.fwd, reinterpret_cast<fftw_complex*>(const_cast<cx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / static_cast<double>(g.size());
    for (auto& c : out) c *= s;
    origin_twist(g, out);
}

void inverse(const GridSpec& g, const cvec& in, cvec& out) {
    auto& pp = plans_for(g);
    cvec scratch = in;
    origin_twist(g, scratch);
    out.resize(g.size());
    fftw_execute_dft(pp.bwd, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void forward_real(const GridSpec& g, const std::vector<double>& in, cvec& out) {
    cvec scratch(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) scratch[i] = cx(in[i], 0.0);
    forward(g, scratch, out);
}

void inverse_real(const GridSpec& g, const cvec& in, std::vector<double>& out) {
    cvec scratch;
    inverse(g, in, scratch);
    out.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = scratch[i].real();
}

} // namespace kp::fft
