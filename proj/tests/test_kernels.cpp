#include <doctest.h>

#include "ada/kernels.hpp"
#include "ada/rng.hpp"

#include <cmath>
#include <vector>

using namespace ada;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = (2.0 * rng.uniform() - 1.0) * scale;
    return v;
}

} // namespace

TEST_CASE("kernel backends agree") {
    const kern::Backend& scalar = kern::scalar_backend();
    const kern::Backend* avx2 = kern::avx2_backend();
    if (!avx2) {
        MESSAGE("AVX2 backend not built; scalar-only platform");
        return;
    }
    Rng rng(42);
    for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4), std::size_t(7),
                          std::size_t(16), std::size_t(33), std::size_t(100), std::size_t(1000)}) {
        std::vector<double> a = random_vec(rng, n);
        std::vector<double> b = random_vec(rng, n);

        // reductions: rounding-level agreement
        double ds = scalar.dot(a.data(), b.data(), n);
        double dv = avx2->dot(a.data(), b.data(), n);
        CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + static_cast<double>(n)));

        double ss = scalar.sumsq(a.data(), n);
        double sv = avx2->sumsq(a.data(), n);
        CHECK(std::abs(ss - sv) <= 1e-13 * (1.0 + static_cast<double>(n)));

        // elementwise: bit-identical
        std::vector<double> y1 = b, y2 = b;
        scalar.axpy(0.37, a.data(), y1.data(), n);
        avx2->axpy(0.37, a.data(), y2.data(), n);
        CHECK(y1 == y2);

        std::vector<double> s1 = a, s2 = a;
        scalar.scal(-1.25, s1.data(), n);
        avx2->scal(-1.25, s2.data(), n);
        CHECK(s1 == s2);
    }
}

TEST_CASE("matvec variants match scalar reference") {
    const kern::Backend& scalar = kern::scalar_backend();
    const kern::Backend* avx2 = kern::avx2_backend();
    if (!avx2) return;
    Rng rng(7);
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1},
                              {3, 5},
                              {8, 8},
                              {17, 64},
                              {64, 2500}}) {
        std::vector<double> w = random_vec(rng, rows * cols);
        std::vector<double> x = random_vec(rng, cols);
        std::vector<double> bias = random_vec(rng, rows);
        std::vector<double> out_s(rows), out_v(rows);
        scalar.matvec(w.data(), rows, cols, x.data(), bias.data(), out_s.data());
        avx2->matvec(w.data(), rows, cols, x.data(), bias.data(), out_v.data());
        for (std::size_t r = 0; r < rows; ++r)
            CHECK(std::abs(out_s[r] - out_v[r]) <= 1e-13 * (1.0 + static_cast<double>(cols)));

        std::vector<double> dy = random_vec(rng, rows);
        std::vector<double> dx_s(cols), dx_v(cols);
        scalar.matvec_t(w.data(), rows, cols, dy.data(), dx_s.data());
        avx2->matvec_t(w.data(), rows, cols, dy.data(), dx_v.data());
        CHECK(dx_s == dx_v); // per-row axpy: elementwise ops only

        std::vector<double> w1 = w, w2 = w;
        scalar.ger(0.73, dy.data(), rows, x.data(), cols, w1.data());
        avx2->ger(0.73, dy.data(), rows, x.data(), cols, w2.data());
        CHECK(w1 == w2);
    }
}

TEST_CASE("adam kernel bit-identical across backends") {
    const kern::Backend& scalar = kern::scalar_backend();
    const kern::Backend* avx2 = kern::avx2_backend();
    if (!avx2) return;
    Rng rng(11);
    const std::size_t n = 103;
    std::vector<double> p1 = random_vec(rng, n), g = random_vec(rng, n);
    std::vector<double> m1(n, 0.0), v1(n, 0.0);
    std::vector<double> p2 = p1, m2 = m1, v2 = v1;
    for (int step = 1; step <= 5; ++step) {
        double bc1 = 1.0 - std::pow(0.9, step);
        double bc2 = 1.0 - std::pow(0.999, step);
        scalar.adam(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3, 0.9, 0.999, 1e-8, bc1, bc2);
        avx2->adam(p2.data(), g.data(), m2.data(), v2.data(), n, 1e-3, 0.9, 0.999, 1e-8, bc1, bc2);
    }
    CHECK(p1 == p2);
    CHECK(m1 == m2);
    CHECK(v1 == v2);
}

TEST_CASE("dot matches a long-double reference") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(rng.below(512));
        std::vector<double> a = random_vec(rng, n), b = random_vec(rng, n);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            ref += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
        double got = kern::dot(a.data(), b.data(), n);
        CHECK(std::abs(static_cast<double>(ref) - got) <=
              1e-12 * (1.0 + static_cast<double>(n)));
    }
}
