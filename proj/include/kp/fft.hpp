#pragma once

#include "kp/grid.hpp"

#include <complex>
#include <cstdlib>
#include <memory>
#include <new>
#include <vector>

namespace kp {

// 64-byte aligned allocator so buffers satisfy FFTW's SIMD alignment and
// plans can be reused across fields of the same shape.
template <class T>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <class U>
    AlignedAlloc(const AlignedAlloc<U>&) {}
    T* allocate(std::size_t n) {
        void* p = std::aligned_alloc(64, ((n * sizeof(T) + 63) / 64) * 64);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }
    template <class U>
    bool operator==(const AlignedAlloc<U>&) const { return true; }
};

using cvec = std::vector<cx, AlignedAlloc<cx>>;

// Cached-plan interface to FFTW for 2D complex transforms, row-major with x
// fastest (shape [ny][nx]). Forward carries the 1/(nx*ny) normalization so
// coefficients are O(field amplitude); inverse is unnormalized.
// Plans use FFTW_ESTIMATE: the planner choice is then deterministic, which
// keeps repeated runs bit-identical.
namespace fft {

// Number of threads FFTW uses for transforms created after the call.
void set_threads(int n);
int threads();

void forward(const GridSpec& g, const cvec& in, cvec& out);
void inverse(const GridSpec& g, const cvec& in, cvec& out);

// Physical real samples -> normalized coefficients.
void forward_real(const GridSpec& g, const std::vector<double>& in, cvec& out);
// Coefficients -> physical samples (real part of the inverse transform).
void inverse_real(const GridSpec& g, const cvec& in, std::vector<double>& out);

} // namespace fft

} // namespace kp
