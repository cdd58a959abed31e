#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels used by the inner loops of the solvers
// (coordinate descent, dual SVM, k-means). Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant; the backend is
// chosen once at runtime. Results of the two backends may differ in the
// last few ulps (different accumulation order), never more.
namespace dyslex::kernels {

enum class Backend { scalar, avx2 };

// Sum of a[i] * b[i].
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i].
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Sum of a[i].
double sum(const double* a, std::size_t n);

// Sum of a[i]^2.
double sumsq(const double* a, std::size_t n);

// Sum of (a[i] - b[i])^2.
double squared_distance(const double* a, const double* b, std::size_t n);

bool avx2_available();

// Backend in use. Resolved on first call: DYSLEX_KERNELS=scalar|avx2 if set
// and usable, otherwise the widest backend the CPU supports.
Backend active_backend();
std::string_view backend_name();

// Test hook; throws std::invalid_argument if the backend is not available.
void force_backend(Backend b);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
double sumsq_scalar(const double* a, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);

#if defined(DYSLEX_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
double sumsq_avx2(const double* a, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
#endif
}  // namespace detail

}  // namespace dyslex::kernels
