#pragma once

#include <cstddef>
#include <string>

// Dense f64 inner-loop kernels. Scalar reference implementations always
// exist; an AVX2 (x86-64) or NEON (aarch64) variant is selected at runtime
// when the CPU supports it. All variants share the accumulation structure
// of the scalar reference so results agree to within a few ulps; the
// elementwise kernels agree bit-exactly.
namespace prk::kernels {

struct Kernels {
    const char* name;

    // out[i] = a[i] (op) b[i]
    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // out[i] = max(a[i], 0)
    void (*relu)(const double* a, double* out, std::size_t n);
    // out[i] = x[i] > 0 ? g[i] : 0   (subgradient at 0 is 0)
    void (*relu_bwd)(const double* x, const double* g, double* out, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = c * a[i]
    void (*scale)(const double* a, double c, double* out, std::size_t n);
    void (*exp_)(const double* a, double* out, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*max)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);

    // Row-major matrix products. accumulate=false zeroes C first.
    // nn: C[m×n] = A[m×k] · B[k×n]
    void (*matmul_nn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n, bool accumulate);
    // nt: C[m×n] = A[m×k] · B[n×k]ᵀ
    void (*matmul_nt)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n, bool accumulate);
    // tn: C[m×n] = A[k×m]ᵀ · B[k×n]
    void (*matmul_tn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n, bool accumulate);
};

const Kernels& scalar_kernels();

// Best variant for this CPU, honoring the PRAGMARANK_KERNELS environment
// variable ("scalar", "avx2", "neon") when set.
const Kernels& active_kernels();

// Force a specific backend by name; empty string re-runs auto-detection.
// Returns the backend now active. Unknown names fall back to scalar.
const Kernels& select_kernels(const std::string& name);

#if defined(__x86_64__)
bool avx2_available();
const Kernels& avx2_kernels();
#endif
#if defined(__aarch64__)
const Kernels& neon_kernels();
#endif

}  // namespace prk::kernels
