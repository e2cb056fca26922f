#include "ada/kernels.hpp"

#include <cmath>

// Reference kernels. Straight loops, one accumulator, no reassociation:
// these define the numeric ground truth the SIMD variants are tested against.

namespace ada::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = dot_scalar(w + r * cols, x, cols);
        out[r] = bias ? acc + bias[r] : acc;
    }
}

void matvec_t_scalar(const double* w, std::size_t rows, std::size_t cols,
                     const double* dy, double* dx) {
    for (std::size_t c = 0; c < cols; ++c) dx[c] = 0.0;
    // row-major traversal; one axpy per row keeps the access pattern linear
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(dy[r], w + r * cols, dx, cols);
}

void ger_scalar(double alpha, const double* y, std::size_t rows,
                const double* x, std::size_t cols, double* w) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(alpha * y[r], x, w + r * cols, cols);
}

void adam_scalar(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bias_corr1, double bias_corr2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        double m_hat = m[i] / bias_corr1;
        double v_hat = v[i] / bias_corr2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace

const Backend& scalar_backend() {
    static const Backend backend = {
        "scalar",
        dot_scalar,
        sumsq_scalar,
        axpy_scalar,
        scal_scalar,
        matvec_scalar,
        matvec_t_scalar,
        ger_scalar,
        adam_scalar,
    };
    return backend;
}

} // namespace ada::kern
