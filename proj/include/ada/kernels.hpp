#pragma once

#include <cstddef>

namespace ada::kern {

// Dense double-precision primitives behind the network and DP solvers.
// Two implementations exist: a scalar reference and an AVX2 variant, picked
// once at runtime. Elementwise kernels (axpy, scal, adam) produce bit-identical
// results across backends; reductions (dot, sumsq, matvec) may differ by
// rounding only and are equivalence-tested against the scalar reference.
struct Backend {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sumsq)(const double* x, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scal)(double alpha, double* x, std::size_t n);
    // out = W x (+ bias when bias != nullptr); W is rows x cols, row-major
    void (*matvec)(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* out);
    // dx = W^T dy (overwrites dx); row-major W as above
    void (*matvec_t)(const double* w, std::size_t rows, std::size_t cols,
                     const double* dy, double* dx);
    // W += alpha * y x^T (outer-product accumulate)
    void (*ger)(double alpha, const double* y, std::size_t rows,
                const double* x, std::size_t cols, double* w);
    // bias-corrected Adam step on one flat tensor
    void (*adam)(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bias_corr1, double bias_corr2);
};

const Backend& scalar_backend();
const Backend* avx2_backend(); // nullptr when not compiled in or unsupported

/// Backend selected at startup: AVX2 when the CPU supports it, else scalar.
/// ADA_SIMD=scalar|avx2 in the environment overrides the choice.
const Backend& active();

/// Force a backend by name ("scalar", "avx2"); throws on unknown/unavailable.
/// Intended for tests and benchmarks.
void force_backend(const char* name);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scal(double alpha, double* x, std::size_t n) { active().scal(alpha, x, n); }
inline void matvec(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* out) {
    active().matvec(w, rows, cols, x, bias, out);
}
inline void matvec_t(const double* w, std::size_t rows, std::size_t cols,
                     const double* dy, double* dx) {
    active().matvec_t(w, rows, cols, dy, dx);
}
inline void ger(double alpha, const double* y, std::size_t rows,
                const double* x, std::size_t cols, double* w) {
    active().ger(alpha, y, rows, x, cols, w);
}
inline void adam(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bias_corr1, double bias_corr2) {
    active().adam(p, g, m, v, n, lr, beta1, beta2, eps, bias_corr1, bias_corr2);
}

} // namespace ada::kern
