#include "pragmarank/kernels/kernels.hpp"

#include <cstdlib>

namespace prk::kernels {
namespace {

const Kernels* detect() {
    if (const char* env = std::getenv("PRAGMARANK_KERNELS")) {
        std::string want(env);
        if (want == "scalar") return &scalar_kernels();
#if defined(__x86_64__)
        if (want == "avx2" && avx2_available()) return &avx2_kernels();
#endif
#if defined(__aarch64__)
        if (want == "neon") return &neon_kernels();
#endif
        return &scalar_kernels();
    }
#if defined(__x86_64__)
    if (avx2_available()) return &avx2_kernels();
#endif
#if defined(__aarch64__)
    return &neon_kernels();
#else
    return &scalar_kernels();
#endif
}

const Kernels*& current() {
    static const Kernels* k = detect();
    return k;
}

}  // namespace

const Kernels& active_kernels() { return *current(); }

const Kernels& select_kernels(const std::string& name) {
    if (name.empty()) {
        current() = detect();
    } else if (name == "scalar") {
        current() = &scalar_kernels();
#if defined(__x86_64__)
    } else if (name == "avx2" && avx2_available()) {
        current() = &avx2_kernels();
#endif
#if defined(__aarch64__)
    } else if (name == "neon") {
        current() = &neon_kernels();
#endif
    } else {
        current() = &scalar_kernels();
    }
    return *current();
}

}  // namespace prk::kernels
