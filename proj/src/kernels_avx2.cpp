#include "ada/kernels.hpp"

// AVX2 variants. This translation unit is compiled with -mavx2 -mfma
// -ffp-contract=off: FMA appears only where written explicitly, so the
// elementwise kernels (axpy, scal, adam) round exactly like the scalar
// reference and match it bit for bit. The reductions (dot, sumsq, matvec)
// use four FMA accumulators and differ from scalar by rounding only.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>
#include <cmath>

namespace ada::kern {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    acc0 = _mm256_add_pd(acc0, acc1);
    acc2 = _mm256_add_pd(acc2, acc3);
    return hsum(_mm256_add_pd(acc0, acc2)) + tail;
}

double sumsq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v1 = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * x[i];
    return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

// mul+add on purpose (no FMA): keeps results bit-identical to scalar
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = dot_avx2(w + r * cols, x, cols);
        out[r] = bias ? acc + bias[r] : acc;
    }
}

void matvec_t_avx2(const double* w, std::size_t rows, std::size_t cols,
                   const double* dy, double* dx) {
    std::size_t c = 0;
    __m256d zero = _mm256_setzero_pd();
    for (; c + 4 <= cols; c += 4) _mm256_storeu_pd(dx + c, zero);
    for (; c < cols; ++c) dx[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(dy[r], w + r * cols, dx, cols);
}

void ger_avx2(double alpha, const double* y, std::size_t rows,
              const double* x, std::size_t cols, double* w) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(alpha * y[r], x, w + r * cols, cols);
}

void adam_avx2(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bias_corr1, double bias_corr2) {
    __m256d vb1 = _mm256_set1_pd(beta1);
    __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
    __m256d vb2 = _mm256_set1_pd(beta2);
    __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
    __m256d vlr = _mm256_set1_pd(lr);
    __m256d veps = _mm256_set1_pd(eps);
    __m256d vc1 = _mm256_set1_pd(bias_corr1);
    __m256d vc2 = _mm256_set1_pd(bias_corr2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(vb1c, gi));
        __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(vb2c, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d m_hat = _mm256_div_pd(mi, vc1);
        __m256d v_hat = _mm256_div_pd(vi, vc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), veps);
        __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, m_hat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        double m_hat = m[i] / bias_corr1;
        double v_hat = v[i] / bias_corr2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace

const Backend* avx2_backend() {
    static const Backend backend = {
        "avx2",
        dot_avx2,
        sumsq_avx2,
        axpy_avx2,
        scal_avx2,
        matvec_avx2,
        matvec_t_avx2,
        ger_avx2,
        adam_avx2,
    };
    return &backend;
}

} // namespace ada::kern

#else // non-x86 or AVX2 not enabled for this TU

namespace ada::kern {
const Backend* avx2_backend() { return nullptr; }
} // namespace ada::kern

#endif
