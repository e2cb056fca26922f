#include "ada/kernels.hpp"

#include "ada/error.hpp"

#include <cstdlib>
#include <string>

namespace ada::kern {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Backend* resolve() {
    const Backend* avx2 = cpu_has_avx2() ? avx2_backend() : nullptr;
    if (const char* want = std::getenv("ADA_SIMD")) {
        std::string name(want);
        if (name == "scalar") return &scalar_backend();
        if (name == "avx2") {
            if (!avx2) throw config_error("ADA_SIMD=avx2 requested but AVX2 is unavailable");
            return avx2;
        }
        throw config_error("unknown ADA_SIMD value: " + name);
    }
    return avx2 ? avx2 : &scalar_backend();
}

const Backend*& current() {
    static const Backend* backend = resolve();
    return backend;
}

} // namespace

const Backend& active() { return *current(); }

void force_backend(const char* name) {
    std::string n(name);
    if (n == "scalar") {
        current() = &scalar_backend();
    } else if (n == "avx2") {
        const Backend* avx2 = cpu_has_avx2() ? avx2_backend() : nullptr;
        if (!avx2) throw config_error("AVX2 backend unavailable on this machine");
        current() = avx2;
    } else {
        throw config_error("unknown kernel backend: " + n);
    }
}

} // namespace ada::kern
